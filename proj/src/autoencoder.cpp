#include "binembed/autoencoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "binembed/error.hpp"
#include "binembed/rng.hpp"

namespace binembed {

namespace {

void check_shape(size_t n_bits, size_t dim) {
    if (n_bits == 0 || n_bits % kBlockBits != 0) {
        throw ConfigError("code size must be a positive multiple of 64, got " +
                          std::to_string(n_bits));
    }
    if (dim == 0) {
        throw ConfigError("embedding dimension must be >= 1");
    }
}

} // namespace

AutoencoderModel::AutoencoderModel(size_t n_bits, size_t dim)
    : n_bits_(n_bits), dim_(dim), w_(n_bits * dim, 0.0), c_(dim, 0.0) {
    check_shape(n_bits, dim);
}

AutoencoderModel AutoencoderModel::random_init(size_t n_bits, size_t dim, uint64_t seed) {
    AutoencoderModel model(n_bits, dim);
    Rng rng(seed);
    double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    for (double& w : model.w_) { // row-major draw order
        w = rng.uniform(-bound, bound);
    }
    return model;
}

BitCode AutoencoderModel::encode(std::span<const float> x) const {
    if (x.size() != dim_) {
        throw DimensionError("encode: input has " + std::to_string(x.size()) +
                             " components, model expects " + std::to_string(dim_));
    }
    BitCode code(n_bits_);
    auto blocks = code.blocks();
    for (size_t i = 0; i < n_bits_; ++i) {
        const double* row = w_.data() + i * dim_;
        double dot = 0.0;
        for (size_t k = 0; k < dim_; ++k) {
            dot += row[k] * x[k];
        }
        if (dot > 0.0) { // h(0) = 0
            blocks[i / kBlockBits] |= uint64_t{1} << (i % kBlockBits);
        }
    }
    return code;
}

namespace {

// Pre-activation W^T b + c, with b as a 0/1 vector: sums the weight rows
// whose bits are set.
void preactivation(const AutoencoderModel& model, const BitCode& b, std::span<double> p) {
    std::copy(model.bias().begin(), model.bias().end(), p.begin());
    size_t dim = model.dim();
    auto blocks = b.blocks();
    for (size_t blk = 0; blk < blocks.size(); ++blk) {
        uint64_t bits = blocks[blk];
        while (bits != 0) {
            size_t j = blk * kBlockBits + static_cast<size_t>(std::countr_zero(bits));
            const double* row = model.weights().data() + j * dim;
            for (size_t k = 0; k < dim; ++k) {
                p[k] += row[k];
            }
            bits &= bits - 1;
        }
    }
}

} // namespace

std::vector<float> AutoencoderModel::decode(const BitCode& b) const {
    if (b.n_bits() != n_bits_) {
        throw DimensionError("decode: code has " + std::to_string(b.n_bits()) +
                             " bits, model expects " + std::to_string(n_bits_));
    }
    std::vector<double> p(dim_);
    preactivation(*this, b, p);
    std::vector<float> y(dim_);
    for (size_t k = 0; k < dim_; ++k) {
        float v = static_cast<float>(std::tanh(p[k]));
        // tanh is strictly inside (-1,1) in double but the float cast can
        // round onto the boundary; keep the open-interval contract.
        if (v >= 1.0f) {
            v = std::nextafterf(1.0f, 0.0f);
        } else if (v <= -1.0f) {
            v = std::nextafterf(-1.0f, 0.0f);
        }
        y[k] = v;
    }
    return y;
}

void AutoencoderModel::save(std::ostream& out) const {
    out << n_bits_ << ' ' << dim_ << '\n';
    char buf[40];
    for (size_t i = 0; i < n_bits_; ++i) {
        const double* row = w_.data() + i * dim_;
        for (size_t k = 0; k < dim_; ++k) {
            std::snprintf(buf, sizeof(buf), "%.9g", row[k]);
            out << buf << (k + 1 == dim_ ? '\n' : ' ');
        }
    }
    for (size_t k = 0; k < dim_; ++k) {
        std::snprintf(buf, sizeof(buf), "%.9g", c_[k]);
        out << buf << (k + 1 == dim_ ? '\n' : ' ');
    }
}

void AutoencoderModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path + ": " + std::strerror(errno));
    }
    save(out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path + ": " + std::strerror(errno));
    }
}

AutoencoderModel AutoencoderModel::load(std::istream& in, const std::string& source) {
    size_t n_bits = 0;
    size_t dim = 0;
    if (!(in >> n_bits >> dim)) {
        throw ParseError(source, 1, "expected model header '<n_bits> <dim>'");
    }
    if (n_bits == 0 || n_bits % kBlockBits != 0 || dim == 0) {
        throw ParseError(source, 1, "invalid model shape " + std::to_string(n_bits) + " x " +
                                        std::to_string(dim));
    }
    AutoencoderModel model(n_bits, dim);
    for (double& w : model.w_) {
        if (!(in >> w)) {
            throw ParseError(source + ": truncated weight matrix");
        }
    }
    for (double& c : model.c_) {
        if (!(in >> c)) {
            throw ParseError(source + ": truncated bias vector");
        }
    }
    return model;
}

AutoencoderModel AutoencoderModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path + ": " + std::strerror(errno));
    }
    return load(in, path);
}

double reconstruction_loss(std::span<const float> x, std::span<const float> y_hat) {
    if (x.size() != y_hat.size()) {
        throw DimensionError("reconstruction_loss: length mismatch " + std::to_string(x.size()) +
                             " vs " + std::to_string(y_hat.size()));
    }
    double sum = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        double d = static_cast<double>(x[k]) - static_cast<double>(y_hat[k]);
        sum += d * d;
    }
    return sum / static_cast<double>(x.size());
}

namespace {

// Gram matrix G = W^T W (dim x dim, row-major), accumulated over weight rows.
std::vector<double> gram_matrix(const AutoencoderModel& model) {
    size_t dim = model.dim();
    std::vector<double> g(dim * dim, 0.0);
    for (size_t j = 0; j < model.n_bits(); ++j) {
        const double* row = model.weights().data() + j * dim;
        for (size_t k = 0; k < dim; ++k) {
            double wk = row[k];
            double* grow = g.data() + k * dim;
            for (size_t l = 0; l < dim; ++l) {
                grow[l] += wk * row[l];
            }
        }
    }
    return g;
}

double reg_loss_from_gram(std::span<const double> gram, size_t dim) {
    double sum = 0.0;
    for (size_t k = 0; k < dim; ++k) {
        for (size_t l = 0; l < dim; ++l) {
            double d = gram[k * dim + l] - (k == l ? 1.0 : 0.0);
            sum += d * d;
        }
    }
    return 0.5 * sum;
}

} // namespace

double regularization_loss(const AutoencoderModel& model) {
    return reg_loss_from_gram(gram_matrix(model), model.dim());
}

BatchGradients batch_gradients(const AutoencoderModel& model, const EmbeddingMatrix& data,
                               std::span<const size_t> rows, double lambda_reg) {
    if (rows.empty()) {
        throw DataError("batch_gradients: empty batch");
    }
    if (data.dim() != model.dim()) {
        throw DimensionError("batch_gradients: data dim " + std::to_string(data.dim()) +
                             " vs model dim " + std::to_string(model.dim()));
    }
    size_t n = model.n_bits();
    size_t m = model.dim();

    BatchGradients g;
    g.w.assign(n * m, 0.0);
    g.c.assign(m, 0.0);

    std::vector<double> p(m);
    std::vector<double> delta(m);
    double rec_sum = 0.0;
    for (size_t r : rows) {
        auto x = data.row(r);
        BitCode b = model.encode(x);
        preactivation(model, b, p);
        double rec = 0.0;
        for (size_t k = 0; k < m; ++k) {
            double y = std::tanh(p[k]);
            double err = y - static_cast<double>(x[k]);
            rec += err * err;
            delta[k] = (2.0 / static_cast<double>(m)) * err * (1.0 - y * y);
            g.c[k] += delta[k];
        }
        rec_sum += rec / static_cast<double>(m);
        // Decoder path only: dW[j][k] = b_j * delta_k (straight-through,
        // the encoder contributes no gradient).
        auto blocks = b.blocks();
        for (size_t blk = 0; blk < blocks.size(); ++blk) {
            uint64_t bits = blocks[blk];
            while (bits != 0) {
                size_t j = blk * kBlockBits + static_cast<size_t>(std::countr_zero(bits));
                double* grow = g.w.data() + j * m;
                for (size_t k = 0; k < m; ++k) {
                    grow[k] += delta[k];
                }
                bits &= bits - 1;
            }
        }
    }

    double inv_batch = 1.0 / static_cast<double>(rows.size());
    for (double& v : g.w) {
        v *= inv_batch;
    }
    for (double& v : g.c) {
        v *= inv_batch;
    }
    g.rec_loss = rec_sum * inv_batch;

    auto gram = gram_matrix(model);
    g.reg_loss = reg_loss_from_gram(gram, m);
    if (lambda_reg != 0.0) {
        // d/dW 0.5*||W^T W - I||^2 = 2 W (W^T W - I), added once per batch.
        for (size_t k = 0; k < m; ++k) {
            gram[k * m + k] -= 1.0;
        }
        for (size_t j = 0; j < n; ++j) {
            const double* wrow = model.weights().data() + j * m;
            double* grow = g.w.data() + j * m;
            for (size_t k = 0; k < m; ++k) {
                double wk = 2.0 * lambda_reg * wrow[k];
                const double* gram_row = gram.data() + k * m;
                for (size_t l = 0; l < m; ++l) {
                    grow[l] += wk * gram_row[l];
                }
            }
        }
    }
    return g;
}

TrainingResult train(const EmbeddingMatrix& emb, const TrainingConfig& cfg) {
    if (emb.size() == 0) {
        throw DataError("train: empty embedding matrix");
    }
    check_shape(cfg.n_bits, emb.dim());
    if (cfg.batch_size == 0 || cfg.epochs == 0) {
        throw ConfigError("batch_size and epochs must be >= 1");
    }
    if (cfg.learning_rate < 0.0 || cfg.lambda_reg < 0.0) {
        throw ConfigError("learning_rate and lambda_reg must be non-negative");
    }
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
        throw ConfigError("momentum must lie in [0, 1)");
    }

    AutoencoderModel model = AutoencoderModel::random_init(cfg.n_bits, emb.dim(), cfg.seed);
    Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL); // separate stream from init

    size_t n = model.n_bits();
    size_t m = model.dim();
    std::vector<double> vel_w(n * m, 0.0);
    std::vector<double> vel_c(m, 0.0);
    std::vector<size_t> order(emb.size());
    std::iota(order.begin(), order.end(), size_t{0});

    TrainingResult result{std::move(model), {}};
    result.report.epochs.reserve(cfg.epochs);
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(std::span<size_t>(order));
        double rec_weighted = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            size_t count = std::min(cfg.batch_size, order.size() - start);
            auto rows = std::span<const size_t>(order).subspan(start, count);
            BatchGradients g = batch_gradients(result.model, emb, rows, cfg.lambda_reg);
            rec_weighted += g.rec_loss * static_cast<double>(count);

            auto w = result.model.weights();
            for (size_t i = 0; i < w.size(); ++i) {
                vel_w[i] = cfg.momentum * vel_w[i] - cfg.learning_rate * g.w[i];
                w[i] += vel_w[i];
            }
            auto c = result.model.bias();
            for (size_t k = 0; k < m; ++k) {
                vel_c[k] = cfg.momentum * vel_c[k] - cfg.learning_rate * g.c[k];
                c[k] += vel_c[k];
            }
        }
        double mean_rec = rec_weighted / static_cast<double>(emb.size());
        double reg = regularization_loss(result.model);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.report.epochs.push_back(
            {mean_rec, reg, mean_rec + cfg.lambda_reg * reg, seconds});
    }
    return result;
}

BinaryEmbedding binarize_all(const AutoencoderModel& model, const EmbeddingMatrix& emb) {
    if (emb.dim() != model.dim()) {
        throw DimensionError("binarize_all: data dim " + std::to_string(emb.dim()) +
                             " vs model dim " + std::to_string(model.dim()));
    }
    BinaryEmbedding be(model.n_bits());
    for (size_t i = 0; i < emb.size(); ++i) {
        be.append(emb.word(i), model.encode(emb.row(i)));
    }
    return be;
}

EmbeddingMatrix reconstruct_all(const AutoencoderModel& model, const BinaryEmbedding& be) {
    if (be.n_bits() != model.n_bits()) {
        throw DimensionError("reconstruct_all: codes are " + std::to_string(be.n_bits()) +
                             " bits, model expects " + std::to_string(model.n_bits()));
    }
    std::vector<float> values;
    values.reserve(be.size() * model.dim());
    for (size_t i = 0; i < be.size(); ++i) {
        std::vector<float> y = model.decode(be.code(i));
        values.insert(values.end(), y.begin(), y.end());
    }
    return EmbeddingMatrix(be.words(), std::move(values), model.dim());
}

} // namespace binembed
