#include "binembed/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "binembed/error.hpp"

namespace binembed {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) {
            fields.emplace_back(line.substr(start, i - start));
        }
    }
    return fields;
}

bool parse_double(const std::string& s, double& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(v);
}

} // namespace

SimilarityDataset parse_similarity_dataset(std::istream& in, std::string name,
                                           const std::string& source) {
    SimilarityDataset ds;
    ds.name = std::move(name);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        auto fields = split_ws(line);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(source, line_no,
                             "expected 'word1 word2 score', got " +
                                 std::to_string(fields.size()) + " fields");
        }
        double gold;
        if (!parse_double(fields[2], gold)) {
            throw ParseError(source, line_no, "non-numeric score '" + fields[2] + "'");
        }
        ds.pairs.push_back({std::move(fields[0]), std::move(fields[1]), gold});
    }
    return ds;
}

SimilarityDataset load_similarity_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path + ": " + std::strerror(errno));
    }
    return parse_similarity_dataset(in, std::filesystem::path(path).stem().string(), path);
}

AnalogyDataset parse_analogy_dataset(std::istream& in, const std::string& source) {
    AnalogyDataset ds;
    AnalogySection section = AnalogySection::kSemantic;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        auto fields = split_ws(line);
        if (fields.empty()) {
            continue;
        }
        if (fields[0] == ":") {
            // Google convention: grammar sections are named "gram...".
            std::string sec_name = fields.size() > 1 ? fields[1] : "";
            section = sec_name.starts_with("gram") ? AnalogySection::kSyntactic
                                                   : AnalogySection::kSemantic;
            continue;
        }
        if (fields.size() != 4) {
            throw ParseError(source, line_no,
                             "expected 4 words per analogy question, got " +
                                 std::to_string(fields.size()));
        }
        ds.questions.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]),
                                std::move(fields[3]), section});
    }
    return ds;
}

AnalogyDataset load_analogy_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path + ": " + std::strerror(errno));
    }
    return parse_analogy_dataset(in, path);
}

namespace {

// 1-based fractional ranks; ties get the average of the positions they
// cover. Sets had_ties when any run is longer than 1.
std::vector<double> fractional_ranks(std::span<const double> xs, bool& had_ties) {
    std::vector<size_t> order(xs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });

    had_ties = false;
    std::vector<double> ranks(xs.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) {
            ++j;
        }
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        if (j > i) {
            had_ties = true;
        }
        for (size_t t = i; t <= j; ++t) {
            ranks[order[t]] = avg_rank;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(a.size());
    mean_b /= static_cast<double>(a.size());
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - mean_a;
        double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        throw DataError("correlation undefined for constant input");
    }
    return cov / std::sqrt(var_a) / std::sqrt(var_b);
}

} // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DimensionError("spearman: length mismatch " + std::to_string(xs.size()) + " vs " +
                             std::to_string(ys.size()));
    }
    if (xs.size() < 2) {
        throw DataError("spearman: need at least 2 observations");
    }
    bool ties_x = false;
    bool ties_y = false;
    std::vector<double> rx = fractional_ranks(xs, ties_x);
    std::vector<double> ry = fractional_ranks(ys, ties_y);
    if (!ties_x && !ties_y) {
        // Tie-free ranks are permutations of 1..k; the classical formula is
        // exactly the Pearson correlation of those ranks.
        double d2 = 0.0;
        for (size_t i = 0; i < rx.size(); ++i) {
            double d = rx[i] - ry[i];
            d2 += d * d;
        }
        double k = static_cast<double>(rx.size());
        return 1.0 - 6.0 * d2 / (k * (k * k - 1.0));
    }
    return pearson(rx, ry);
}

PairScorer cosine_scorer(const EmbeddingMatrix& emb) {
    return [&emb](const std::string& w1, const std::string& w2) -> std::optional<double> {
        auto i = emb.find(w1);
        auto j = emb.find(w2);
        if (!i || !j) {
            return std::nullopt;
        }
        auto a = emb.row(*i);
        auto b = emb.row(*j);
        double dot = 0.0;
        double na = 0.0;
        double nb = 0.0;
        for (size_t k = 0; k < a.size(); ++k) {
            dot += static_cast<double>(a[k]) * b[k];
            na += static_cast<double>(a[k]) * a[k];
            nb += static_cast<double>(b[k]) * b[k];
        }
        double denom = std::sqrt(na) * std::sqrt(nb);
        return denom > 0.0 ? dot / denom : 0.0;
    };
}

PairScorer sokal_michener_scorer(const BinaryEmbedding& be) {
    return [&be](const std::string& w1, const std::string& w2) -> std::optional<double> {
        auto i = be.find(w1);
        auto j = be.find(w2);
        if (!i || !j) {
            return std::nullopt;
        }
        uint64_t h = hamming_blocks(be.code_blocks(*i).data(), be.code_blocks(*j).data(),
                                    be.blocks_per_code());
        return 1.0 - static_cast<double>(h) / static_cast<double>(be.n_bits());
    };
}

SimilarityScore eval_similarity(const PairScorer& scorer, const SimilarityDataset& ds) {
    std::vector<double> golds;
    std::vector<double> scores;
    size_t oov = 0;
    for (const auto& pair : ds.pairs) {
        auto s = scorer(pair.word1, pair.word2);
        if (!s) {
            ++oov;
            continue;
        }
        if (!std::isfinite(*s)) {
            throw DataError("scorer returned a non-finite value for pair '" + pair.word1 +
                            "' / '" + pair.word2 + "'");
        }
        golds.push_back(pair.gold);
        scores.push_back(*s);
    }
    if (golds.size() < 2) {
        throw DataError("dataset '" + ds.name + "': only " + std::to_string(golds.size()) +
                        " in-vocabulary pairs, need at least 2");
    }
    return {100.0 * spearman(golds, scores), golds.size(), oov};
}

AnalogySectionScore AnalogyScore::overall() const {
    return {semantic.attempted + syntactic.attempted, semantic.correct + syntactic.correct,
            semantic.skipped_oov + syntactic.skipped_oov};
}

namespace {

// Shared skeleton: per question, resolve the 4 words, build a target, scan
// all candidates except the 3 query words, tie-break toward the lower index.
template <typename Vectors, typename MakeTarget, typename Score>
AnalogyScore run_analogy(const Vectors& vectors, const AnalogyDataset& ds,
                         MakeTarget&& make_target, Score&& score) {
    if (ds.questions.empty()) {
        throw DataError("empty analogy dataset");
    }
    AnalogyScore result;
    for (const auto& q : ds.questions) {
        AnalogySectionScore& sec =
            q.section == AnalogySection::kSemantic ? result.semantic : result.syntactic;
        auto ia = vectors.find(q.a);
        auto ib = vectors.find(q.b);
        auto ic = vectors.find(q.c);
        auto id = vectors.find(q.d);
        if (!ia || !ib || !ic || !id) {
            ++sec.skipped_oov;
            continue;
        }
        ++sec.attempted;
        auto target = make_target(*ia, *ib, *ic);
        double best = -std::numeric_limits<double>::infinity();
        size_t best_idx = vectors.size();
        for (size_t cand = 0; cand < vectors.size(); ++cand) {
            if (cand == *ia || cand == *ib || cand == *ic) {
                continue;
            }
            double s = score(target, cand);
            if (s > best) {
                best = s;
                best_idx = cand;
            }
        }
        if (best_idx == *id) {
            ++sec.correct;
        }
    }
    return result;
}

} // namespace

AnalogyScore eval_analogy(const EmbeddingMatrix& emb, const AnalogyDataset& ds) {
    std::vector<double> norms(emb.size());
    for (size_t i = 0; i < emb.size(); ++i) {
        double n = 0.0;
        for (float v : emb.row(i)) {
            n += static_cast<double>(v) * v;
        }
        norms[i] = std::sqrt(n);
    }
    auto make_target = [&](size_t ia, size_t ib, size_t ic) {
        std::vector<double> t(emb.dim());
        auto va = emb.row(ia);
        auto vb = emb.row(ib);
        auto vc = emb.row(ic);
        double norm = 0.0;
        for (size_t k = 0; k < t.size(); ++k) {
            t[k] = static_cast<double>(vb[k]) - va[k] + vc[k];
            norm += t[k] * t[k];
        }
        t.push_back(std::sqrt(norm)); // carry |t| in the last slot
        return t;
    };
    auto score = [&](const std::vector<double>& t, size_t cand) {
        double tn = t.back();
        if (tn == 0.0 || norms[cand] == 0.0) {
            return -2.0; // below any cosine
        }
        auto v = emb.row(cand);
        double dot = 0.0;
        for (size_t k = 0; k < v.size(); ++k) {
            dot += t[k] * v[k];
        }
        return dot / (tn * norms[cand]);
    };
    return run_analogy(emb, ds, make_target, score);
}

AnalogyScore eval_analogy(const BinaryEmbedding& be, const AnalogyDataset& ds,
                          AnalogyVariant variant) {
    auto make_target = [&](size_t ia, size_t ib, size_t ic) {
        return analogy_code(be.code(ia), be.code(ib), be.code(ic), variant);
    };
    auto score = [&](const BitCode& target, size_t cand) {
        uint64_t h = hamming_blocks(target.blocks().data(), be.code_blocks(cand).data(),
                                    be.blocks_per_code());
        return 1.0 - static_cast<double>(h) / static_cast<double>(be.n_bits());
    };
    return run_analogy(be, ds, make_target, score);
}

double fisher_average(std::span<const double> rhos) {
    if (rhos.empty()) {
        throw DataError("fisher_average: empty input");
    }
    double sum = 0.0;
    for (double r : rhos) {
        if (!(std::abs(r) < 1.0)) {
            throw DataError("fisher_average: correlation " + std::to_string(r) +
                            " outside (-1, 1)");
        }
        sum += std::atanh(r);
    }
    return std::tanh(sum / static_cast<double>(rhos.size()));
}

std::string format_eval_table(const EvalReport& report) {
    std::ostringstream out;
    char buf[160];
    if (!report.similarity.empty()) {
        std::snprintf(buf, sizeof(buf), "%-12s %10s %8s %6s\n", "dataset", "spearman", "pairs",
                      "oov");
        out << buf;
        for (const auto& row : report.similarity) {
            std::snprintf(buf, sizeof(buf), "%-12s %10.2f %8zu %6zu\n", row.dataset.c_str(),
                          row.rho_x100, row.found, row.oov);
            out << buf;
        }
        if (report.fisher_x100) {
            std::snprintf(buf, sizeof(buf), "%-12s %10.2f\n", "fisher-avg", *report.fisher_x100);
            out << buf;
        }
    }
    if (report.analogy) {
        const auto& a = *report.analogy;
        std::snprintf(buf, sizeof(buf), "%-12s %10s %9s %9s %6s\n", "analogy", "accuracy",
                      "attempted", "correct", "oov");
        out << buf;
        auto line = [&](const char* name, const AnalogySectionScore& s) {
            std::snprintf(buf, sizeof(buf), "%-12s %10.2f %9zu %9zu %6zu\n", name,
                          s.accuracy_pct(), s.attempted, s.correct, s.skipped_oov);
            out << buf;
        };
        line("semantic", a.semantic);
        line("syntactic", a.syntactic);
        line("total", a.overall());
    }
    return out.str();
}

std::string format_eval_records(const EvalReport& report) {
    std::ostringstream out;
    char buf[200];
    for (const auto& row : report.similarity) {
        std::snprintf(buf, sizeof(buf), "task=similarity dataset=%s rho_x100=%.4f found=%zu oov=%zu\n",
                      row.dataset.c_str(), row.rho_x100, row.found, row.oov);
        out << buf;
    }
    if (report.fisher_x100) {
        std::snprintf(buf, sizeof(buf), "task=similarity metric=fisher_average rho_x100=%.4f\n",
                      *report.fisher_x100);
        out << buf;
    }
    if (report.analogy) {
        auto rec = [&](const char* sec, const AnalogySectionScore& s) {
            std::snprintf(buf, sizeof(buf),
                          "task=analogy section=%s accuracy=%.4f attempted=%zu correct=%zu oov=%zu\n",
                          sec, s.accuracy_pct(), s.attempted, s.correct, s.skipped_oov);
            out << buf;
        };
        rec("semantic", report.analogy->semantic);
        rec("syntactic", report.analogy->syntactic);
        rec("total", report.analogy->overall());
    }
    return out.str();
}

} // namespace binembed
