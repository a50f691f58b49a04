#include "binembed/bitcode.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "binembed/error.hpp"

namespace binembed {

namespace {

void check_n_bits(size_t n_bits) {
    if (n_bits == 0 || n_bits % kBlockBits != 0) {
        throw ConfigError("code length must be a positive multiple of 64, got " +
                          std::to_string(n_bits));
    }
}

void check_same_length(size_t a, size_t b) {
    if (a != b) {
        throw DimensionError("code length mismatch: " + std::to_string(a) +
                             " vs " + std::to_string(b) + " bits");
    }
}

} // namespace

BitCode::BitCode(size_t n_bits) : n_bits_(n_bits), blocks_(n_bits / kBlockBits, 0) {
    check_n_bits(n_bits);
}

BitCode::BitCode(size_t n_bits, std::span<const uint64_t> blocks)
    : n_bits_(n_bits), blocks_(blocks.begin(), blocks.end()) {
    check_n_bits(n_bits);
    if (blocks.size() != n_bits / kBlockBits) {
        throw DimensionError("expected " + std::to_string(n_bits / kBlockBits) +
                             " blocks for " + std::to_string(n_bits) + " bits, got " +
                             std::to_string(blocks.size()));
    }
}

bool BitCode::bit(size_t i) const {
    return (blocks_[i / kBlockBits] >> (i % kBlockBits)) & 1u;
}

void BitCode::set_bit(size_t i, bool value) {
    uint64_t mask = uint64_t{1} << (i % kBlockBits);
    if (value) {
        blocks_[i / kBlockBits] |= mask;
    } else {
        blocks_[i / kBlockBits] &= ~mask;
    }
}

BitCode BitCode::operator~() const {
    BitCode out(n_bits_);
    for (size_t i = 0; i < blocks_.size(); ++i) {
        out.blocks_[i] = ~blocks_[i];
    }
    return out;
}

size_t hamming(const BitCode& a, const BitCode& b) {
    check_same_length(a.n_bits(), b.n_bits());
    return static_cast<size_t>(
        hamming_blocks(a.blocks().data(), b.blocks().data(), a.n_blocks()));
}

double sokal_michener(const BitCode& a, const BitCode& b) {
    size_t h = hamming(a, b);
    return 1.0 - static_cast<double>(h) / static_cast<double>(a.n_bits());
}

BitCode analogy_code(const BitCode& a, const BitCode& b, const BitCode& c,
                     AnalogyVariant variant) {
    check_same_length(a.n_bits(), b.n_bits());
    check_same_length(a.n_bits(), c.n_bits());
    BitCode out(a.n_bits());
    auto pa = a.blocks();
    auto pb = b.blocks();
    auto pc = c.blocks();
    auto po = out.blocks();
    if (variant == AnalogyVariant::kSubtractFirst) {
        for (size_t i = 0; i < po.size(); ++i) {
            po[i] = (pb[i] & ~pa[i]) | pc[i];
        }
    } else {
        for (size_t i = 0; i < po.size(); ++i) {
            po[i] = (pb[i] | pc[i]) & ~pa[i];
        }
    }
    return out;
}

BinaryEmbedding::BinaryEmbedding(size_t n_bits) : n_bits_(n_bits) {
    check_n_bits(n_bits);
}

void BinaryEmbedding::append(std::string word, const BitCode& code) {
    if (n_bits_ == 0) {
        check_n_bits(code.n_bits());
        n_bits_ = code.n_bits();
    }
    check_same_length(n_bits_, code.n_bits());
    if (index_.contains(word)) {
        throw DataError("duplicate word in binary embedding: " + word);
    }
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    blocks_.insert(blocks_.end(), code.blocks().begin(), code.blocks().end());
}

BitCode BinaryEmbedding::code(size_t i) const {
    return BitCode(n_bits_, code_blocks(i));
}

std::optional<size_t> BinaryEmbedding::find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void serialize_hex(const BinaryEmbedding& be, std::ostream& out) {
    out << be.size() << ' ' << be.n_bits() << '\n';
    char buf[17];
    for (size_t i = 0; i < be.size(); ++i) {
        out << be.word(i);
        for (uint64_t block : be.code_blocks(i)) {
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(block));
            out << ' ' << buf;
        }
        out << '\n';
    }
}

void serialize_hex(const BinaryEmbedding& be, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path + ": " + std::strerror(errno));
    }
    serialize_hex(be, out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path + ": " + std::strerror(errno));
    }
}

namespace {

// Exactly 16 lowercase hex digits, value into `out`.
bool parse_hex_block(const std::string& field, uint64_t& out) {
    if (field.size() != 16) {
        return false;
    }
    for (char ch : field) {
        bool ok = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
        if (!ok) {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + 16, out, 16);
    return ec == std::errc{} && ptr == field.data() + 16;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) {
            fields.emplace_back(line.substr(start, i - start));
        }
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

} // namespace

BinaryEmbedding deserialize_hex(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source, 1, "missing header line");
    }
    strip_cr(line);
    auto header = split_ws(line);
    size_t vocab = 0;
    size_t n_bits = 0;
    auto parse_uint = [](const std::string& s, size_t& v) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    if (header.size() != 2 || !parse_uint(header[0], vocab) || !parse_uint(header[1], n_bits)) {
        throw ParseError(source, 1, "expected header '<vocab> <n_bits>', got '" + line + "'");
    }
    if (n_bits == 0 || n_bits % kBlockBits != 0) {
        throw ParseError(source, 1,
                         "n_bits must be a positive multiple of 64, got " + std::to_string(n_bits));
    }

    BinaryEmbedding be(n_bits);
    size_t blocks_per_code = n_bits / kBlockBits;
    size_t line_no = 1;
    BitCode code(n_bits);
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = split_ws(line);
        if (fields.size() != 1 + blocks_per_code) {
            throw ParseError(source, line_no,
                             "expected word + " + std::to_string(blocks_per_code) +
                                 " hex blocks, got " + std::to_string(fields.size()) + " fields");
        }
        auto blocks = code.blocks();
        for (size_t j = 0; j < blocks_per_code; ++j) {
            if (!parse_hex_block(fields[1 + j], blocks[j])) {
                throw ParseError(source, line_no,
                                 "malformed hex block '" + fields[1 + j] +
                                     "' (need exactly 16 lowercase hex digits)");
            }
        }
        try {
            be.append(fields[0], code);
        } catch (const DataError& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    if (be.size() != vocab) {
        throw ParseError(source, line_no,
                         "header announced " + std::to_string(vocab) + " words, file has " +
                             std::to_string(be.size()));
    }
    return be;
}

BinaryEmbedding deserialize_hex(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path + ": " + std::strerror(errno));
    }
    return deserialize_hex(in, path);
}

} // namespace binembed
