#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"

namespace binembed {

// Human-judged word pair similarities (MEN, RW, SimLex, SimVerb, WS353, ...).
struct SimilarityDataset {
    struct Pair {
        std::string word1;
        std::string word2;
        double gold;
    };
    std::string name;
    std::vector<Pair> pairs;
};

// Lines are `word1 word2 score`, whitespace- or tab-separated; extra
// trailing columns are rejected as a parse error. The dataset name defaults
// to the file stem.
SimilarityDataset load_similarity_dataset(const std::string& path);
SimilarityDataset parse_similarity_dataset(std::istream& in, std::string name,
                                           const std::string& source = "<stream>");

enum class AnalogySection { kSemantic, kSyntactic };

// "a is to b as c is to d" questions in the Google analogy format:
// `: section-name` headers followed by 4-word lines. Sections whose name
// starts with "gram" are tagged syntactic, all others semantic.
struct AnalogyDataset {
    struct Question {
        std::string a, b, c, d;
        AnalogySection section;
    };
    std::vector<Question> questions;
};

AnalogyDataset load_analogy_dataset(const std::string& path);
AnalogyDataset parse_analogy_dataset(std::istream& in, const std::string& source = "<stream>");

// Spearman rank correlation: Pearson correlation of fractional ranks with
// ties averaged. When neither side has ties this is evaluated through the
// algebraically identical closed form 1 - 6*sum(d^2)/(k(k^2-1)).
// Throws DataError for constant inputs (undefined correlation) and for
// fewer than 2 observations.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Word-pair scorer; nullopt marks an out-of-vocabulary pair.
using PairScorer = std::function<std::optional<double>(const std::string&, const std::string&)>;

PairScorer cosine_scorer(const EmbeddingMatrix& emb);
PairScorer sokal_michener_scorer(const BinaryEmbedding& be);

struct SimilarityScore {
    double rho_x100; // Spearman * 100
    size_t found;
    size_t oov;
};

// Scores every pair, skipping and counting OOV ones, then ranks scorer
// output against the gold judgments. Throws DataError when fewer than 2
// pairs are in vocabulary.
SimilarityScore eval_similarity(const PairScorer& scorer, const SimilarityDataset& ds);

struct AnalogySectionScore {
    size_t attempted = 0;
    size_t correct = 0;
    size_t skipped_oov = 0;
    double accuracy_pct() const {
        return attempted == 0 ? 0.0
                              : 100.0 * static_cast<double>(correct) / static_cast<double>(attempted);
    }
};

struct AnalogyScore {
    AnalogySectionScore semantic;
    AnalogySectionScore syntactic;
    AnalogySectionScore overall() const;
};

// Real-valued mode: target v_b - v_a + v_c, nearest candidate by cosine.
// Binary mode: target analogy_code(a,b,c), nearest by Sokal & Michener.
// The three query words are excluded from candidates by word identity;
// nearest-neighbor ties break toward the lower vocabulary index. Questions
// with any OOV word are skipped and counted.
AnalogyScore eval_analogy(const EmbeddingMatrix& emb, const AnalogyDataset& ds);
AnalogyScore eval_analogy(const BinaryEmbedding& be, const AnalogyDataset& ds,
                          AnalogyVariant variant = AnalogyVariant::kSubtractFirst);

// tanh(mean(atanh(rho_i))): averages correlations in Fisher-transformed
// space. Requires every |rho| < 1.
double fisher_average(std::span<const double> rhos);

// Aggregated report over one evaluation run.
struct EvalReport {
    struct SimilarityRow {
        std::string dataset;
        double rho_x100;
        size_t found;
        size_t oov;
    };
    std::vector<SimilarityRow> similarity;
    std::optional<double> fisher_x100; // set when >= 2 similarity datasets and defined
    std::optional<AnalogyScore> analogy;
};

// Aligned plain-text table and line-delimited key=value records.
std::string format_eval_table(const EvalReport& report);
std::string format_eval_records(const EvalReport& report);

} // namespace binembed
