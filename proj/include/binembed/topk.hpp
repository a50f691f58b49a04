#pragma once

#include <span>
#include <string>
#include <vector>

#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"

namespace binembed {

enum class Metric { kSokalMichener, kCosine };

struct TopKEntry {
    size_t index;
    std::string word;
    double score;
};

// Entries sorted by descending score, ties by ascending vocabulary index;
// length min(k, candidates).
struct TopKResult {
    Metric metric;
    std::vector<TopKEntry> entries;
};

// Exact top-k by Sokal & Michener over a single linear scan. The hot loop
// accumulates per-candidate Hamming distance blockwise (XOR + popcount) and
// keeps a bounded k-element buffer; scores are converted once at the end.
TopKResult topk_binary(const BinaryEmbedding& be, const BitCode& query, size_t k);

// Exact top-k by cosine similarity, single fused pass (dot product and
// candidate norm together). Zero-norm stored vectors score -1; a zero query
// is a DataError.
TopKResult topk_real(const EmbeddingMatrix& emb, std::span<const float> query, size_t k);

struct BenchRow {
    std::string vectors; // "256-bit" or "real-valued"
    std::string phase;   // "scan" or "load+query"
    size_t k;
    size_t vocab;
    size_t reps;
    double median_ms;
    double min_ms;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

struct BenchOptions {
    std::vector<size_t> ks{1, 10, 50};
    size_t reps = 9;          // >= 5; one warm-up pass precedes measurement
    size_t query_index = 0;   // vocabulary row used as the query
    std::string codes_path;   // non-empty: also time load-from-file + top-10
    std::string vectors_path; // non-empty: also time load-from-file + top-10
};

// Times single-threaded scan-only queries (median and min over reps) for the
// binary and the real-valued path, plus optional load+query rows. Both
// inputs must cover the same vocabulary in the same order.
BenchReport bench_topk(const BinaryEmbedding& be, const EmbeddingMatrix& emb,
                       const BenchOptions& opts);

// Aligned table with one row per K (and the load rows), binary and
// real-valued side by side; and line-delimited key=value records.
std::string format_bench_table(const BenchReport& report);
std::string format_bench_records(const BenchReport& report);

} // namespace binembed
