#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace binembed {

// Vocabulary of unique words with one m-dimensional real vector per word.
// Values are held as 32-bit floats (the size accounting the compression is
// measured against); parsing goes through doubles to avoid accumulation
// error.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    // values is |words| x dim, row-major. Throws DataError on duplicate
    // words, DimensionError if sizes disagree.
    EmbeddingMatrix(std::vector<std::string> words, std::vector<float> values, size_t dim);

    size_t size() const { return words_.size(); }
    size_t dim() const { return dim_; }

    std::span<const float> row(size_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::span<float> row(size_t i) { return {values_.data() + i * dim_, dim_}; }

    const std::string& word(size_t i) const { return words_[i]; }
    const std::vector<std::string>& words() const { return words_; }

    std::optional<size_t> find(const std::string& w) const;

private:
    size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<float> values_;
    std::unordered_map<std::string, size_t> index_;
};

struct LoadStats {
    size_t duplicates_dropped = 0;
    bool header_skipped = false;
};

// Text embedding format: one `word v1 v2 ... vm` line per word, with an
// optional `|V| m` header line (auto-detected: first line of exactly two
// unsigned integers). Duplicate words keep the first occurrence and are
// tallied in stats. Tokens are everything up to the first blank; values must
// be finite.
EmbeddingMatrix load_text_embeddings(const std::string& path,
                                     std::optional<size_t> expected_dim = std::nullopt,
                                     LoadStats* stats = nullptr);
EmbeddingMatrix load_text_embeddings(std::istream& in, const std::string& source,
                                     std::optional<size_t> expected_dim = std::nullopt,
                                     LoadStats* stats = nullptr);

// Clamps every value into [-1, 1]. Idempotent; in-range values unchanged.
EmbeddingMatrix clip_to_unit_range(EmbeddingMatrix emb);

// Writes the text format above (no header), 6 significant digits per value.
// Round-trips unit-range values within 1e-6 per component.
void save_text_embeddings(const EmbeddingMatrix& emb, std::ostream& out);
void save_text_embeddings(const EmbeddingMatrix& emb, const std::string& path);

} // namespace binembed
