#include "binembed/topk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>

#include "binembed/error.hpp"

namespace binembed {

namespace {

volatile uint64_t g_bench_sink = 0; // keeps measured scans observable

void check_k(size_t k) {
    if (k == 0) {
        throw ConfigError("k must be >= 1");
    }
}

} // namespace

TopKResult topk_binary(const BinaryEmbedding& be, const BitCode& query, size_t k) {
    check_k(k);
    if (query.n_bits() != be.n_bits()) {
        throw DimensionError("query has " + std::to_string(query.n_bits()) +
                             " bits, codes have " + std::to_string(be.n_bits()));
    }
    size_t bpc = be.blocks_per_code();
    const uint64_t* base = be.raw_blocks();
    const uint64_t* q = query.blocks().data();

    // Max-heap on (hamming, index): the top is the current worst entry, so
    // ties evict the higher vocabulary index first.
    using Entry = std::pair<uint64_t, size_t>;
    std::priority_queue<Entry> worst_first;
    for (size_t i = 0; i < be.size(); ++i) {
        uint64_t h = hamming_blocks(q, base + i * bpc, bpc);
        if (worst_first.size() < k) {
            worst_first.emplace(h, i);
        } else if (Entry(h, i) < worst_first.top()) {
            worst_first.pop();
            worst_first.emplace(h, i);
        }
    }

    TopKResult result{Metric::kSokalMichener, {}};
    result.entries.resize(worst_first.size());
    double n = static_cast<double>(be.n_bits());
    for (size_t i = result.entries.size(); i-- > 0;) {
        auto [h, idx] = worst_first.top();
        worst_first.pop();
        result.entries[i] = {idx, be.word(idx), 1.0 - static_cast<double>(h) / n};
    }
    return result;
}

TopKResult topk_real(const EmbeddingMatrix& emb, std::span<const float> query, size_t k) {
    check_k(k);
    if (query.size() != emb.dim()) {
        throw DimensionError("query has " + std::to_string(query.size()) +
                             " components, vectors have " + std::to_string(emb.dim()));
    }
    double qnorm = 0.0;
    for (float v : query) {
        qnorm += static_cast<double>(v) * v;
    }
    qnorm = std::sqrt(qnorm);
    if (qnorm == 0.0) {
        throw DataError("degenerate query: zero vector");
    }

    struct Entry {
        double score;
        size_t index;
    };
    // "less" = better, so the heap top is the worst entry under the
    // (score desc, index asc) order.
    auto better = [](const Entry& a, const Entry& b) {
        return a.score > b.score || (a.score == b.score && a.index < b.index);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(better)> worst_first(better);

    size_t m = emb.dim();
    for (size_t i = 0; i < emb.size(); ++i) {
        const float* row = emb.row(i).data();
        double dot = 0.0;
        double sumsq = 0.0;
        for (size_t d = 0; d < m; ++d) {
            dot += static_cast<double>(row[d]) * query[d];
            sumsq += static_cast<double>(row[d]) * row[d];
        }
        double score = sumsq == 0.0 ? -1.0 : dot / (qnorm * std::sqrt(sumsq));
        if (worst_first.size() < k) {
            worst_first.push({score, i});
        } else if (better({score, i}, worst_first.top())) {
            worst_first.pop();
            worst_first.push({score, i});
        }
    }

    TopKResult result{Metric::kCosine, {}};
    result.entries.resize(worst_first.size());
    for (size_t i = result.entries.size(); i-- > 0;) {
        Entry e = worst_first.top();
        worst_first.pop();
        result.entries[i] = {e.index, emb.word(e.index), e.score};
    }
    return result;
}

namespace {

struct Timing {
    double median_ms;
    double min_ms;
};

template <typename F>
Timing measure(F&& body, size_t reps) {
    body(); // warm-up
    std::vector<double> ms(reps);
    for (size_t r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        body();
        auto t1 = std::chrono::steady_clock::now();
        ms[r] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(ms.begin(), ms.end());
    double median = reps % 2 == 1 ? ms[reps / 2] : 0.5 * (ms[reps / 2 - 1] + ms[reps / 2]);
    return {median, ms.front()};
}

} // namespace

BenchReport bench_topk(const BinaryEmbedding& be, const EmbeddingMatrix& emb,
                       const BenchOptions& opts) {
    if (opts.reps < 5) {
        throw ConfigError("bench needs reps >= 5, got " + std::to_string(opts.reps));
    }
    if (opts.ks.empty()) {
        throw ConfigError("bench needs at least one K");
    }
    if (be.size() != emb.size()) {
        throw DataError("vocabulary mismatch: " + std::to_string(be.size()) + " codes vs " +
                        std::to_string(emb.size()) + " vectors");
    }
    for (size_t i = 0; i < be.size(); ++i) {
        if (be.word(i) != emb.word(i)) {
            throw DataError("vocabulary mismatch at row " + std::to_string(i) + ": '" +
                            be.word(i) + "' vs '" + emb.word(i) + "'");
        }
    }
    if (be.size() == 0) {
        throw DataError("bench: empty vocabulary");
    }
    if (opts.query_index >= be.size()) {
        throw ConfigError("query index out of range");
    }

    std::string bin_label = std::to_string(be.n_bits()) + "-bit";
    BitCode bin_query = be.code(opts.query_index);
    std::vector<float> real_query(emb.row(opts.query_index).begin(),
                                  emb.row(opts.query_index).end());

    BenchReport report;
    for (size_t k : opts.ks) {
        Timing tb = measure(
            [&] { g_bench_sink = g_bench_sink + topk_binary(be, bin_query, k).entries[0].index; },
            opts.reps);
        report.rows.push_back({bin_label, "scan", k, be.size(), opts.reps, tb.median_ms, tb.min_ms});
        Timing tr = measure(
            [&] { g_bench_sink = g_bench_sink + topk_real(emb, real_query, k).entries[0].index; },
            opts.reps);
        report.rows.push_back(
            {"real-valued", "scan", k, emb.size(), opts.reps, tr.median_ms, tr.min_ms});
    }

    if (!opts.codes_path.empty()) {
        Timing t = measure(
            [&] {
                BinaryEmbedding loaded = deserialize_hex(opts.codes_path);
                g_bench_sink = g_bench_sink +
                               topk_binary(loaded, loaded.code(opts.query_index), 10).entries[0].index;
            },
            opts.reps);
        report.rows.push_back(
            {bin_label, "load+query", 10, be.size(), opts.reps, t.median_ms, t.min_ms});
    }
    if (!opts.vectors_path.empty()) {
        Timing t = measure(
            [&] {
                EmbeddingMatrix loaded = load_text_embeddings(opts.vectors_path);
                std::vector<float> q(loaded.row(opts.query_index).begin(),
                                     loaded.row(opts.query_index).end());
                g_bench_sink = g_bench_sink + topk_real(loaded, q, 10).entries[0].index;
            },
            opts.reps);
        report.rows.push_back(
            {"real-valued", "load+query", 10, emb.size(), opts.reps, t.median_ms, t.min_ms});
    }
    return report;
}

std::string format_bench_table(const BenchReport& report) {
    // Pivot: one row per (phase, k), one column per vector representation.
    std::vector<std::string> configs;
    for (const auto& row : report.rows) {
        if (std::find(configs.begin(), configs.end(), row.vectors) == configs.end()) {
            configs.push_back(row.vectors);
        }
    }
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-18s", "median time (ms)");
    out << buf;
    for (const auto& c : configs) {
        std::snprintf(buf, sizeof(buf), "%14s", c.c_str());
        out << buf;
    }
    out << '\n';

    auto emit = [&](const std::string& phase, size_t k, const std::string& label) {
        bool any = false;
        std::ostringstream line;
        std::snprintf(buf, sizeof(buf), "%-18s", label.c_str());
        line << buf;
        for (const auto& c : configs) {
            auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const BenchRow& r) {
                return r.vectors == c && r.phase == phase && r.k == k;
            });
            if (it == report.rows.end()) {
                std::snprintf(buf, sizeof(buf), "%14s", "-");
            } else {
                std::snprintf(buf, sizeof(buf), "%14.3f", it->median_ms);
                any = true;
            }
            line << buf;
        }
        if (any) {
            out << line.str() << '\n';
        }
    };

    std::vector<size_t> ks;
    for (const auto& row : report.rows) {
        if (row.phase == "scan" && std::find(ks.begin(), ks.end(), row.k) == ks.end()) {
            ks.push_back(row.k);
        }
    }
    for (size_t k : ks) {
        emit("scan", k, "top-" + std::to_string(k));
    }
    emit("load+query", 10, "load + top-10");
    return out.str();
}

std::string format_bench_records(const BenchReport& report) {
    std::ostringstream out;
    char buf[200];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf),
                      "task=bench vectors=%s phase=%s k=%zu vocab=%zu reps=%zu median_ms=%.4f "
                      "min_ms=%.4f\n",
                      row.vectors.c_str(), row.phase.c_str(), row.k, row.vocab, row.reps,
                      row.median_ms, row.min_ms);
        out << buf;
    }
    return out.str();
}

} // namespace binembed
