#pragma once

#include <cstdint>

#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"

namespace binembed {

// Sign binarization: bit k of word i is 1 iff vectors[i][k] >= 0 (zero maps
// to 1). Codes keep the input dimension, so m must already be a multiple of
// 64 — otherwise the codes would not be register-aligned and the call fails
// with a DimensionError suggesting retraining at an aligned dimension.
BinaryEmbedding naive_binarize(const EmbeddingMatrix& emb);

// Random-hyperplane hashing: draws n_bits hyperplanes with i.i.d. standard
// normal components (hyperplane 0 first, components in order) from the
// seeded generator; bit i of word w is 1 iff r_i . x_w >= 0. The hyperplanes
// are not orthogonalized. Bit-exactly reproducible for a given seed.
BinaryEmbedding lsh_binarize(const EmbeddingMatrix& emb, size_t n_bits, uint64_t seed);

} // namespace binembed
