#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace binembed {

inline constexpr size_t kBlockBits = 64;

// Packed n-bit binary word vector, n a positive multiple of 64 so every code
// is whole machine words and similarity needs no tail masking.
//
// Bit order contract (load-bearing for bit-exact serialization): bit i lives
// in block i/64 at in-block position i%64, i.e. mask 1<<(i%64). Bit i of an
// encoded vector corresponds to row i of the encoder matrix.
class BitCode {
public:
    BitCode() = default;

    // All bits clear. n_bits must be a positive multiple of 64.
    explicit BitCode(size_t n_bits);

    BitCode(size_t n_bits, std::span<const uint64_t> blocks);

    size_t n_bits() const { return n_bits_; }
    size_t n_blocks() const { return blocks_.size(); }

    bool bit(size_t i) const;
    void set_bit(size_t i, bool value);

    std::span<const uint64_t> blocks() const { return blocks_; }
    std::span<uint64_t> blocks() { return blocks_; }

    // Complement of all n bits.
    BitCode operator~() const;

    bool operator==(const BitCode&) const = default;

private:
    size_t n_bits_ = 0;
    std::vector<uint64_t> blocks_;
};

// Block-level XOR+popcount kernel shared by hamming() and the top-K scan.
// Lengths are the caller's responsibility.
inline uint64_t hamming_blocks(const uint64_t* a, const uint64_t* b, size_t n_blocks) {
    uint64_t acc = 0;
    for (size_t i = 0; i < n_blocks; ++i) {
        acc += static_cast<uint64_t>(std::popcount(a[i] ^ b[i]));
    }
    return acc;
}

// popcount(a XOR b). Throws DimensionError on mismatched lengths.
size_t hamming(const BitCode& a, const BitCode& b);

// Sokal & Michener similarity (n11 + n00)/n in [0,1]. Computed as
// 1 - hamming/n from the same popcounts, which is the identical quantity:
// n11 + n00 = n - hamming.
double sokal_michener(const BitCode& a, const BitCode& b);

// Operator grouping for the binary analogy surrogate of v_b - v_a + v_c.
// kSubtractFirst is the default reading (AND NOT applied before OR); the
// alternative grouping is kept for side-by-side evaluation.
enum class AnalogyVariant {
    kSubtractFirst, // (b AND NOT a) OR c
    kAddFirst,      // (b OR c) AND NOT a
};

BitCode analogy_code(const BitCode& a, const BitCode& b, const BitCode& c,
                     AnalogyVariant variant = AnalogyVariant::kSubtractFirst);

// A vocabulary of words with one equal-length code per word. Codes are
// stored in a single flat block array so linear scans stay cache-friendly.
class BinaryEmbedding {
public:
    BinaryEmbedding() = default;
    explicit BinaryEmbedding(size_t n_bits);

    // Appends a word and its code. Throws DataError on duplicate words and
    // DimensionError if the code length disagrees.
    void append(std::string word, const BitCode& code);

    size_t size() const { return words_.size(); }
    size_t n_bits() const { return n_bits_; }
    size_t blocks_per_code() const { return n_bits_ / kBlockBits; }

    const std::string& word(size_t i) const { return words_[i]; }
    const std::vector<std::string>& words() const { return words_; }

    std::span<const uint64_t> code_blocks(size_t i) const {
        return {blocks_.data() + i * blocks_per_code(), blocks_per_code()};
    }
    const uint64_t* raw_blocks() const { return blocks_.data(); }

    // Copy of row i as a standalone value.
    BitCode code(size_t i) const;

    std::optional<size_t> find(const std::string& w) const;

private:
    size_t n_bits_ = 0;
    std::vector<std::string> words_;
    std::vector<uint64_t> blocks_;
    std::unordered_map<std::string, size_t> index_;
};

// Hex code file format (bit-exact round trip):
//   line 1:  "<vocab> <n_bits>"
//   line k:  "word h0 h1 ... " with one 16-digit lowercase hex field per
//            64-bit block, block 0 first.
void serialize_hex(const BinaryEmbedding& be, std::ostream& out);
void serialize_hex(const BinaryEmbedding& be, const std::string& path);

BinaryEmbedding deserialize_hex(std::istream& in, const std::string& source = "<stream>");
BinaryEmbedding deserialize_hex(const std::string& path);

} // namespace binembed
