#include "binembed/baselines.hpp"

#include <string>
#include <vector>

#include "binembed/error.hpp"
#include "binembed/rng.hpp"

namespace binembed {

BinaryEmbedding naive_binarize(const EmbeddingMatrix& emb) {
    size_t m = emb.dim();
    if (m == 0 || m % kBlockBits != 0) {
        throw DimensionError(
            "naive binarization keeps the input dimension, and " + std::to_string(m) +
            " is not a multiple of 64, so the codes would not be register-aligned; "
            "retrain the real-valued embedding at 64/128/256/512 dimensions first");
    }
    BinaryEmbedding be(m);
    BitCode code(m);
    for (size_t i = 0; i < emb.size(); ++i) {
        auto row = emb.row(i);
        auto blocks = code.blocks();
        for (auto& b : blocks) {
            b = 0;
        }
        for (size_t k = 0; k < m; ++k) {
            if (row[k] >= 0.0f) {
                blocks[k / kBlockBits] |= uint64_t{1} << (k % kBlockBits);
            }
        }
        be.append(emb.word(i), code);
    }
    return be;
}

BinaryEmbedding lsh_binarize(const EmbeddingMatrix& emb, size_t n_bits, uint64_t seed) {
    if (n_bits == 0 || n_bits % kBlockBits != 0) {
        throw ConfigError("LSH code size must be a positive multiple of 64, got " +
                          std::to_string(n_bits));
    }
    size_t m = emb.dim();
    Rng rng(seed);
    std::vector<double> hyperplanes(n_bits * m);
    for (double& h : hyperplanes) {
        h = rng.normal();
    }

    BinaryEmbedding be(n_bits);
    BitCode code(n_bits);
    for (size_t w = 0; w < emb.size(); ++w) {
        auto row = emb.row(w);
        auto blocks = code.blocks();
        for (auto& b : blocks) {
            b = 0;
        }
        for (size_t i = 0; i < n_bits; ++i) {
            const double* plane = hyperplanes.data() + i * m;
            double dot = 0.0;
            for (size_t k = 0; k < m; ++k) {
                dot += plane[k] * row[k];
            }
            if (dot >= 0.0) {
                blocks[i / kBlockBits] |= uint64_t{1} << (i % kBlockBits);
            }
        }
        be.append(emb.word(w), code);
    }
    return be;
}

} // namespace binembed
