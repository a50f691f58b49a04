#pragma once

// Test-only helpers: synthetic data generators and independent oracles.
// The oracles deliberately avoid the library's computation paths (bit
// iteration instead of blockwise popcount, O(k^2) rank counting instead of
// sort-based ranking, full sort instead of bounded-buffer selection).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"
#include "binembed/rng.hpp"

namespace testsup {

inline binembed::BitCode random_code(size_t n_bits, binembed::Rng& rng) {
    binembed::BitCode code(n_bits);
    for (auto& block : code.blocks()) {
        block = rng.next_u64();
    }
    return code;
}

// Oracle: count differing bits by walking every position.
inline size_t hamming_oracle(const binembed::BitCode& a, const binembed::BitCode& b) {
    size_t count = 0;
    for (size_t i = 0; i < a.n_bits(); ++i) {
        count += a.bit(i) != b.bit(i);
    }
    return count;
}

// Oracle: evaluate the analogy expression per bit position.
inline binembed::BitCode analogy_oracle(const binembed::BitCode& a, const binembed::BitCode& b,
                                        const binembed::BitCode& c, bool subtract_first) {
    binembed::BitCode out(a.n_bits());
    for (size_t i = 0; i < a.n_bits(); ++i) {
        bool v = subtract_first ? ((b.bit(i) && !a.bit(i)) || c.bit(i))
                                : ((b.bit(i) || c.bit(i)) && !a.bit(i));
        out.set_bit(i, v);
    }
    return out;
}

// Oracle: 1-based average ranks via O(k^2) counting.
inline std::vector<double> ranks_oracle(const std::vector<double>& xs) {
    std::vector<double> ranks(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        size_t less = 0;
        size_t equal = 0;
        for (size_t j = 0; j < xs.size(); ++j) {
            less += xs[j] < xs[i];
            equal += xs[j] == xs[i];
        }
        ranks[i] = static_cast<double>(less) + 1.0 + static_cast<double>(equal - 1) / 2.0;
    }
    return ranks;
}

// Oracle: Spearman via the oracle ranks. Uses the closed form when the
// ranks are tie-free, Pearson otherwise.
inline double spearman_oracle(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> rx = ranks_oracle(xs);
    std::vector<double> ry = ranks_oracle(ys);
    auto tie_free = [](const std::vector<double>& r) {
        for (double v : r) {
            if (v != std::floor(v)) {
                return false;
            }
        }
        std::vector<double> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    };
    size_t k = rx.size();
    if (tie_free(rx) && tie_free(ry)) {
        double d2 = 0.0;
        for (size_t i = 0; i < k; ++i) {
            d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
        }
        double n = static_cast<double>(k);
        return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
    }
    double ma = 0.0;
    double mb = 0.0;
    for (size_t i = 0; i < k; ++i) {
        ma += rx[i];
        mb += ry[i];
    }
    ma /= static_cast<double>(k);
    mb /= static_cast<double>(k);
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (size_t i = 0; i < k; ++i) {
        cov += (rx[i] - ma) * (ry[i] - mb);
        va += (rx[i] - ma) * (rx[i] - ma);
        vb += (ry[i] - mb) * (ry[i] - mb);
    }
    return cov / std::sqrt(va) / std::sqrt(vb);
}

// Synthetic Gaussian-cluster embedding, clipped to [-1,1]. Point i belongs
// to cluster i % n_clusters.
inline binembed::EmbeddingMatrix gaussian_clusters(size_t n_points, size_t dim,
                                                   size_t n_clusters, double center_sd,
                                                   double point_sd, uint64_t seed) {
    binembed::Rng rng(seed);
    std::vector<double> centers(n_clusters * dim);
    for (auto& c : centers) {
        c = center_sd * rng.normal();
    }
    std::vector<std::string> words;
    std::vector<float> values;
    words.reserve(n_points);
    values.reserve(n_points * dim);
    for (size_t i = 0; i < n_points; ++i) {
        size_t c = i % n_clusters;
        words.push_back("w" + std::to_string(i));
        for (size_t d = 0; d < dim; ++d) {
            values.push_back(static_cast<float>(centers[c * dim + d] + point_sd * rng.normal()));
        }
    }
    return binembed::clip_to_unit_range(
        binembed::EmbeddingMatrix(std::move(words), std::move(values), dim));
}

// The shared clustered dataset: 1000 points, 20 dims, 10 overlapping
// clusters. Parameters chosen so nearest-neighbor retrieval is neither
// trivial nor hopeless.
inline binembed::EmbeddingMatrix standard_clusters() {
    return gaussian_clusters(1000, 20, 10, 0.3, 0.4, 12345);
}

inline binembed::EmbeddingMatrix random_embedding(size_t n_points, size_t dim, uint64_t seed,
                                                  double scale = 1.0) {
    binembed::Rng rng(seed);
    std::vector<std::string> words;
    std::vector<float> values;
    for (size_t i = 0; i < n_points; ++i) {
        words.push_back("w" + std::to_string(i));
        for (size_t d = 0; d < dim; ++d) {
            values.push_back(static_cast<float>(rng.uniform(-scale, scale)));
        }
    }
    return binembed::EmbeddingMatrix(std::move(words), std::move(values), dim);
}

} // namespace testsup
