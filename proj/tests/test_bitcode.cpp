#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "binembed/bitcode.hpp"
#include "binembed/error.hpp"
#include "binembed/rng.hpp"
#include "test_support.hpp"

using namespace binembed;

TEST_CASE("bitcode construction and bit order") {
    BitCode code(128);
    CHECK(code.n_bits() == 128);
    CHECK(code.n_blocks() == 2);
    CHECK(code.blocks()[0] == 0);

    code.set_bit(0, true);
    CHECK(code.blocks()[0] == 1);
    code.set_bit(64, true);
    CHECK(code.blocks()[1] == 1);
    code.set_bit(65, true);
    CHECK(code.blocks()[1] == 3);
    CHECK(code.bit(0));
    CHECK(!code.bit(1));
    code.set_bit(0, false);
    CHECK(!code.bit(0));

    CHECK_THROWS_AS(BitCode(0), ConfigError);
    CHECK_THROWS_AS(BitCode(100), ConfigError);
    uint64_t one = 1;
    CHECK_THROWS_AS(BitCode(128, std::span<const uint64_t>(&one, 1)), DimensionError);
}

TEST_CASE("sokal_michener basic values") {
    Rng rng(11);
    BitCode a = testsup::random_code(64, rng);
    CHECK(sokal_michener(a, a) == 1.0);
    CHECK(sokal_michener(a, ~a) == 0.0);

    BitCode zero(64);
    BitCode half(64);
    half.blocks()[0] = 0x00000000FFFFFFFFull;
    CHECK(sokal_michener(zero, half) == 0.5);

    BitCode longer(128);
    CHECK_THROWS_AS(sokal_michener(a, longer), DimensionError);
}

TEST_CASE("hamming against the bit-iteration oracle") {
    BitCode x(64);
    BitCode y(64);
    CHECK(hamming(x, y) == 0);
    y.set_bit(0, true);
    CHECK(hamming(x, y) == 1);

    Rng rng(22);
    for (size_t n_bits : {64u, 128u, 256u, 512u}) {
        for (int rep = 0; rep < 50; ++rep) {
            BitCode a = testsup::random_code(n_bits, rng);
            BitCode b = testsup::random_code(n_bits, rng);
            CHECK(hamming(a, b) == testsup::hamming_oracle(a, b));
        }
    }
}

TEST_CASE("hamming metric axioms on random samples") {
    Rng rng(33);
    for (int rep = 0; rep < 40; ++rep) {
        BitCode a = testsup::random_code(128, rng);
        BitCode b = testsup::random_code(128, rng);
        BitCode c = testsup::random_code(128, rng);
        CHECK(hamming(a, a) == 0);
        CHECK(hamming(a, b) == hamming(b, a));
        CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
    }
}

TEST_CASE("similarity identities") {
    Rng rng(44);
    for (size_t n_bits : {64u, 128u, 256u, 512u}) {
        for (int rep = 0; rep < 100; ++rep) {
            BitCode a = testsup::random_code(n_bits, rng);
            BitCode b = testsup::random_code(n_bits, rng);
            double n = static_cast<double>(n_bits);
            CHECK(sokal_michener(a, b) == 1.0 - static_cast<double>(hamming(a, b)) / n);
            CHECK(sokal_michener(a, b) == sokal_michener(~a, ~b));
        }
    }
}

TEST_CASE("analogy_code") {
    Rng rng(55);
    BitCode zeros(64);
    BitCode b = testsup::random_code(64, rng);
    BitCode c = testsup::random_code(64, rng);

    SUBCASE("all-zero a reduces to b OR c") {
        BitCode expected(64);
        expected.blocks()[0] = b.blocks()[0] | c.blocks()[0];
        CHECK(analogy_code(zeros, b, c) == expected);
    }
    SUBCASE("a == b absorbs to c") {
        for (int rep = 0; rep < 20; ++rep) {
            BitCode bb = testsup::random_code(64, rng);
            BitCode cc = testsup::random_code(64, rng);
            CHECK(analogy_code(bb, bb, cc) == cc);
        }
    }
    SUBCASE("worked example 0xF, 0xFF, 0x1 -> 0xF1") {
        BitCode a(64);
        a.blocks()[0] = 0xF;
        BitCode bx(64);
        bx.blocks()[0] = 0xFF;
        BitCode cx(64);
        cx.blocks()[0] = 0x1;
        CHECK(analogy_code(a, bx, cx).blocks()[0] == 0xF1);
    }
    SUBCASE("both variants match the per-position oracle") {
        for (int rep = 0; rep < 30; ++rep) {
            BitCode a = testsup::random_code(128, rng);
            BitCode bb = testsup::random_code(128, rng);
            BitCode cc = testsup::random_code(128, rng);
            CHECK(analogy_code(a, bb, cc, AnalogyVariant::kSubtractFirst) ==
                  testsup::analogy_oracle(a, bb, cc, true));
            CHECK(analogy_code(a, bb, cc, AnalogyVariant::kAddFirst) ==
                  testsup::analogy_oracle(a, bb, cc, false));
        }
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(analogy_code(BitCode(128), b, c), DimensionError);
    }
}

TEST_CASE("binary embedding container") {
    BinaryEmbedding be(64);
    BitCode a(64);
    a.set_bit(3, true);
    be.append("alpha", a);
    CHECK_THROWS_AS(be.append("alpha", a), DataError);
    CHECK_THROWS_AS(be.append("beta", BitCode(128)), DimensionError);
    be.append("beta", ~a);
    CHECK(be.size() == 2);
    CHECK(be.find("beta") == 1);
    CHECK(!be.find("gamma").has_value());
    CHECK(be.code(0) == a);
}

TEST_CASE("hex serialization format") {
    BinaryEmbedding be(64);
    BitCode bit0(64);
    bit0.set_bit(0, true);
    be.append("w", bit0);
    std::ostringstream out;
    serialize_hex(be, out);
    CHECK(out.str() == "1 64\nw 0000000000000001\n");

    BinaryEmbedding wide(128);
    BitCode ones = ~BitCode(128);
    wide.append("w", ones);
    std::ostringstream out2;
    serialize_hex(wide, out2);
    CHECK(out2.str() == "1 128\nw ffffffffffffffff ffffffffffffffff\n");
}

TEST_CASE("hex round trip is bit-exact") {
    Rng rng(66);
    for (size_t n_bits : {64u, 128u, 256u, 512u}) {
        for (int rep = 0; rep < 25; ++rep) {
            BinaryEmbedding be(n_bits);
            size_t vocab = 1 + rng.index(12);
            for (size_t w = 0; w < vocab; ++w) {
                be.append("word" + std::to_string(w), testsup::random_code(n_bits, rng));
            }
            std::stringstream buffer;
            serialize_hex(be, buffer);
            BinaryEmbedding back = deserialize_hex(buffer);
            REQUIRE(back.size() == be.size());
            REQUIRE(back.n_bits() == be.n_bits());
            for (size_t w = 0; w < vocab; ++w) {
                CHECK(back.word(w) == be.word(w));
                CHECK(back.code(w) == be.code(w));
            }
        }
    }
}

TEST_CASE("hex deserialization errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return deserialize_hex(in, "test");
    };

    SUBCASE("empty vocabulary header") {
        BinaryEmbedding be = parse("0 64\n");
        CHECK(be.size() == 0);
        CHECK(be.n_bits() == 64);
    }
    SUBCASE("wrong block count") {
        CHECK_THROWS_AS(parse("1 128\nw 0000000000000001\n"), ParseError);
    }
    SUBCASE("malformed hex") {
        CHECK_THROWS_AS(parse("1 64\nw 00000000000000zz\n"), ParseError);
        CHECK_THROWS_AS(parse("1 64\nw 0000000000000001ff\n"), ParseError);
        CHECK_THROWS_AS(parse("1 64\nw 00000000000000AB\n"), ParseError); // uppercase
    }
    SUBCASE("bad header") {
        CHECK_THROWS_AS(parse(""), ParseError);
        CHECK_THROWS_AS(parse("x 64\n"), ParseError);
        CHECK_THROWS_AS(parse("1 60\n"), ParseError);
    }
    SUBCASE("vocab count mismatch") {
        CHECK_THROWS_AS(parse("2 64\nw 0000000000000001\n"), ParseError);
    }
    SUBCASE("duplicate word") {
        CHECK_THROWS_AS(parse("2 64\nw 0000000000000001\nw 0000000000000002\n"), ParseError);
    }
    SUBCASE("parse error carries the line number") {
        try {
            parse("1 64\nw badhex\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("test:2") != std::string::npos);
        }
    }
}

TEST_CASE("hex file round trip on disk") {
    Rng rng(77);
    BinaryEmbedding be(256);
    for (size_t w = 0; w < 5; ++w) {
        be.append("w" + std::to_string(w), testsup::random_code(256, rng));
    }
    std::string path = "bitcode_roundtrip.hex";
    serialize_hex(be, path);
    BinaryEmbedding back = deserialize_hex(path);
    CHECK(back.size() == 5);
    for (size_t w = 0; w < 5; ++w) {
        CHECK(back.code(w) == be.code(w));
    }
    std::remove(path.c_str());
}
