#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"

namespace binembed {

// Binarizing autoencoder. One n x m matrix W is shared by both halves:
//
//   encode:  b = h(W x)          h = Heaviside step, h(0) = 0
//   decode:  y = tanh(W^T b + c) b treated as a 0/1 real vector
//
// Bit i of a code is the sign test of row i of W against the input.
// Parameters are kept in double precision; embeddings stay float32.
class AutoencoderModel {
public:
    // Zero parameters. n_bits must be a positive multiple of 64, dim >= 1.
    AutoencoderModel(size_t n_bits, size_t dim);

    // W entries i.i.d. uniform on [-1/sqrt(m), +1/sqrt(m)], bias zero.
    // Deterministic given (n_bits, dim, seed). The bound keeps initial
    // pre-activations O(1) so starting codes are balanced, not saturated.
    static AutoencoderModel random_init(size_t n_bits, size_t dim, uint64_t seed);

    size_t n_bits() const { return n_bits_; }
    size_t dim() const { return dim_; }

    // Row-major n_bits x dim.
    std::span<const double> weights() const { return w_; }
    std::span<double> weights() { return w_; }
    std::span<const double> bias() const { return c_; }
    std::span<double> bias() { return c_; }

    std::span<const double> weight_row(size_t i) const { return {w_.data() + i * dim_, dim_}; }

    BitCode encode(std::span<const float> x) const;
    std::vector<float> decode(const BitCode& b) const;

    // Checkpoint format: header "n m", then W row-major and c as text,
    // 9 significant digits. Round-trips within 1e-6.
    void save(std::ostream& out) const;
    void save(const std::string& path) const;
    static AutoencoderModel load(std::istream& in, const std::string& source = "<stream>");
    static AutoencoderModel load(const std::string& path);

private:
    size_t n_bits_ = 0;
    size_t dim_ = 0;
    std::vector<double> w_; // n_bits x dim, row-major
    std::vector<double> c_; // dim
};

struct TrainingConfig {
    size_t n_bits = 256;
    size_t batch_size = 75;
    size_t epochs = 10;
    double learning_rate = 0.001;
    double momentum = 0.95;
    double lambda_reg = 1.0;
    uint64_t seed = 42;
};

struct EpochStats {
    double mean_rec_loss;   // batch-size-weighted mean of per-example l_rec
    double reg_loss;        // l_reg evaluated at the end of the epoch
    double total_objective; // mean_rec_loss + lambda_reg * reg_loss
    double seconds;
};

struct TrainingReport {
    std::vector<EpochStats> epochs;
};

// Mean squared error over the components.
double reconstruction_loss(std::span<const float> x, std::span<const float> y_hat);

// 0.5 * ||W^T W - I||_F^2. Penalizes correlated bit dimensions. With
// n_bits < dim the minimum is strictly positive (rank deficiency), so this
// is reported, never asserted to reach zero.
double regularization_loss(const AutoencoderModel& model);

struct BatchGradients {
    std::vector<double> w; // n_bits x dim, row-major
    std::vector<double> c; // dim
    double rec_loss;       // mean l_rec over the batch
    double reg_loss;       // l_reg at the current W
};

// Straight-through gradients for one batch: codes b = encode(x) are treated
// as constants w.r.t. W, so W receives only the decoder path
// (averaged over the batch) plus lambda_reg * 2 W (W^T W - I), which is
// applied once per batch, unaveraged, mirroring the objective where the
// regularizer appears once beside the per-example sum.
BatchGradients batch_gradients(const AutoencoderModel& model, const EmbeddingMatrix& data,
                               std::span<const size_t> rows, double lambda_reg);

struct TrainingResult {
    AutoencoderModel model;
    TrainingReport report;
};

// SGD with momentum: v <- momentum*v - lr*grad; theta <- theta + v.
// Row order is reshuffled every epoch from the seeded generator; the last
// partial batch is trained, not dropped. Single-threaded and bit-identical
// across runs for a given seed and input.
TrainingResult train(const EmbeddingMatrix& emb, const TrainingConfig& cfg);

// Encodes every row, preserving word order.
BinaryEmbedding binarize_all(const AutoencoderModel& model, const EmbeddingMatrix& emb);

// Decodes every code, preserving word order. Outputs lie strictly in (-1,1).
EmbeddingMatrix reconstruct_all(const AutoencoderModel& model, const BinaryEmbedding& be);

} // namespace binembed
