// binembed: compress real-valued word embeddings into register-aligned
// binary codes, reconstruct vectors from codes, and run bitwise top-K
// queries, evaluations and benchmarks over them.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "binembed/autoencoder.hpp"
#include "binembed/baselines.hpp"
#include "binembed/bitcode.hpp"
#include "binembed/embedding.hpp"
#include "binembed/error.hpp"
#include "binembed/evaluation.hpp"
#include "binembed/topk.hpp"

namespace {

using namespace binembed;

constexpr const char* kAllowedBits = "64, 128, 256, 512";

void check_bits(size_t bits) {
    if (bits != 64 && bits != 128 && bits != 256 && bits != 512) {
        throw ConfigError("--bits must be one of " + std::string(kAllowedBits) + ", got " +
                          std::to_string(bits));
    }
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ConfigError(flag + ": cannot parse '" + item + "' as a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError(flag + ": empty list");
    }
    return out;
}

std::vector<size_t> parse_size_list(const std::string& csv, const std::string& flag) {
    std::vector<size_t> out;
    for (double v : parse_double_list(csv, flag)) {
        if (v < 1 || v != static_cast<double>(static_cast<size_t>(v))) {
            throw ConfigError(flag + ": expected positive integers");
        }
        out.push_back(static_cast<size_t>(v));
    }
    return out;
}

// Distinguishes the hex code format (header `|V| n_bits`, 16-digit hex
// blocks) from the text embedding format by looking at the first two lines.
bool looks_like_hex_codes(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        return false;
    }
    std::istringstream header(line);
    size_t vocab = 0;
    size_t n_bits = 0;
    std::string extra;
    if (!(header >> vocab >> n_bits) || (header >> extra)) {
        return false;
    }
    if (n_bits == 0 || n_bits % 64 != 0) {
        return false;
    }
    if (!std::getline(in, line)) {
        return vocab == 0; // header-only file: codes iff it announces an empty vocabulary
    }
    std::istringstream row(line);
    std::string word, field;
    if (!(row >> word >> field)) {
        return false;
    }
    if (field.size() != 16) {
        return false;
    }
    return std::all_of(field.begin(), field.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

AnalogyVariant parse_variant(const std::string& name) {
    if (name == "subfirst") {
        return AnalogyVariant::kSubtractFirst;
    }
    if (name == "addfirst") {
        return AnalogyVariant::kAddFirst;
    }
    throw ConfigError("--analogy-variant must be 'subfirst' or 'addfirst', got '" + name + "'");
}

void print_epoch(const EpochStats& e, size_t idx, size_t total, const std::string& prefix) {
    std::printf("%sepoch %zu/%zu  rec=%.6f  reg=%.6f  total=%.6f  (%.2fs)\n", prefix.c_str(),
                idx + 1, total, e.mean_rec_loss, e.reg_loss, e.total_objective, e.seconds);
}

// --- train ------------------------------------------------------------

struct TrainArgs {
    std::string input;
    size_t bits = 256;
    size_t epochs = 10;
    size_t batch_size = 75;
    double lr = 0.001;
    double momentum = 0.95;
    std::string lambda_reg = "1";
    uint64_t seed = 42;
    std::string model_out;
    std::string codes_out;
};

void run_train(const TrainArgs& args) {
    check_bits(args.bits);
    std::vector<double> lambdas = parse_double_list(args.lambda_reg, "--lambda-reg");
    for (double l : lambdas) {
        if (l < 0) {
            throw ConfigError("--lambda-reg values must be non-negative");
        }
    }

    LoadStats stats;
    EmbeddingMatrix emb = clip_to_unit_range(load_text_embeddings(args.input, {}, &stats));
    if (stats.duplicates_dropped > 0) {
        std::fprintf(stderr, "warning: dropped %zu duplicate words (first occurrence kept)\n",
                     stats.duplicates_dropped);
    }
    std::printf("loaded %zu words x %zu dims from %s\n", emb.size(), emb.dim(),
                args.input.c_str());

    TrainingConfig cfg;
    cfg.n_bits = args.bits;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.learning_rate = args.lr;
    cfg.momentum = args.momentum;
    cfg.seed = args.seed;

    std::optional<TrainingResult> best;
    double best_objective = 0.0;
    double best_lambda = lambdas.front();
    for (double lambda : lambdas) {
        cfg.lambda_reg = lambda;
        std::string prefix =
            lambdas.size() > 1 ? "lambda=" + std::to_string(lambda) + "  " : std::string();
        TrainingResult result = train(emb, cfg);
        for (size_t e = 0; e < result.report.epochs.size(); ++e) {
            print_epoch(result.report.epochs[e], e, cfg.epochs, prefix);
        }
        double objective = result.report.epochs.back().total_objective;
        if (!best || objective < best_objective) {
            best_objective = objective;
            best_lambda = lambda;
            best.emplace(std::move(result));
        }
    }
    if (lambdas.size() > 1) {
        std::printf("selected lambda_reg=%g (final objective %.6f)\n", best_lambda,
                    best_objective);
    }

    best->model.save(args.model_out);
    serialize_hex(binarize_all(best->model, emb), args.codes_out);
    std::printf("wrote model to %s and %zu-bit codes to %s\n", args.model_out.c_str(), args.bits,
                args.codes_out.c_str());
}

// --- binarize ---------------------------------------------------------

struct BinarizeArgs {
    std::string method;
    std::string input;
    std::string output;
    std::string model;
    size_t bits = 0;
    uint64_t seed = 42;
    bool bits_set = false;
    bool seed_set = false;
};

void run_binarize(const BinarizeArgs& args) {
    if (args.method == "autoencoder") {
        if (args.model.empty()) {
            throw ConfigError("--method autoencoder requires --model");
        }
        if (args.bits_set) {
            throw ConfigError("--bits is not applicable to --method autoencoder "
                              "(the model fixes the code size)");
        }
    } else if (args.method == "naive") {
        if (!args.model.empty() || args.bits_set || args.seed_set) {
            throw ConfigError("--method naive takes no --model, --bits or --seed");
        }
    } else { // lsh
        if (!args.bits_set) {
            throw ConfigError("--method lsh requires --bits");
        }
        check_bits(args.bits);
        if (!args.model.empty()) {
            throw ConfigError("--model is not applicable to --method lsh");
        }
    }

    EmbeddingMatrix emb = clip_to_unit_range(load_text_embeddings(args.input));
    BinaryEmbedding codes;
    if (args.method == "autoencoder") {
        AutoencoderModel model = AutoencoderModel::load(args.model);
        codes = binarize_all(model, emb);
    } else if (args.method == "naive") {
        codes = naive_binarize(emb);
    } else {
        codes = lsh_binarize(emb, args.bits, args.seed);
    }
    serialize_hex(codes, args.output);
    std::printf("wrote %zu %zu-bit codes to %s\n", codes.size(), codes.n_bits(),
                args.output.c_str());
}

// --- reconstruct --------------------------------------------------------

struct ReconstructArgs {
    std::string model;
    std::string codes;
    std::string output;
};

void run_reconstruct(const ReconstructArgs& args) {
    AutoencoderModel model = AutoencoderModel::load(args.model);
    BinaryEmbedding codes = deserialize_hex(args.codes);
    EmbeddingMatrix rec = reconstruct_all(model, codes);
    save_text_embeddings(rec, args.output);
    std::printf("wrote %zu reconstructed %zu-dim vectors to %s\n", rec.size(), rec.dim(),
                args.output.c_str());
}

// --- eval ---------------------------------------------------------------

struct EvalArgs {
    std::vector<std::string> vectors;
    std::string task;
    std::vector<std::string> data;
    std::string variant = "subfirst";
};

EvalReport eval_one(const std::string& vectors_path, const EvalArgs& args, bool is_hex) {
    EvalReport report;
    std::optional<EmbeddingMatrix> emb;
    std::optional<BinaryEmbedding> codes;
    if (is_hex) {
        codes.emplace(deserialize_hex(vectors_path));
    } else {
        emb.emplace(load_text_embeddings(vectors_path));
    }

    if (args.task == "similarity") {
        PairScorer scorer = is_hex ? sokal_michener_scorer(*codes) : cosine_scorer(*emb);
        std::vector<double> rhos;
        for (const auto& file : args.data) {
            SimilarityDataset ds = load_similarity_dataset(file);
            SimilarityScore score = eval_similarity(scorer, ds);
            report.similarity.push_back({ds.name, score.rho_x100, score.found, score.oov});
            rhos.push_back(score.rho_x100 / 100.0);
        }
        if (rhos.size() >= 2) {
            try {
                report.fisher_x100 = 100.0 * fisher_average(rhos);
            } catch (const DataError&) {
                // |rho| = 1 on some dataset: the transform is undefined,
                // leave the aggregate out.
            }
        }
    } else { // analogy
        AnalogyDataset merged;
        for (const auto& file : args.data) {
            AnalogyDataset ds = load_analogy_dataset(file);
            merged.questions.insert(merged.questions.end(),
                                    std::make_move_iterator(ds.questions.begin()),
                                    std::make_move_iterator(ds.questions.end()));
        }
        report.analogy = is_hex ? eval_analogy(*codes, merged, parse_variant(args.variant))
                                : eval_analogy(*emb, merged);
    }
    return report;
}

void run_eval(const EvalArgs& args) {
    parse_variant(args.variant);

    std::vector<bool> is_hex;
    size_t hex_bits = 0;
    for (const auto& path : args.vectors) {
        bool hex = looks_like_hex_codes(path);
        is_hex.push_back(hex);
        if (hex) {
            std::ifstream in(path);
            std::string ignored;
            size_t bits = 0;
            in >> ignored >> bits;
            if (hex_bits != 0 && bits != hex_bits) {
                throw DataError("mixed code sizes across files: " + std::to_string(hex_bits) +
                                " vs " + std::to_string(bits) + " bits");
            }
            hex_bits = bits;
        }
    }

    for (size_t i = 0; i < args.vectors.size(); ++i) {
        EvalReport report = eval_one(args.vectors[i], args, is_hex[i]);
        if (args.vectors.size() > 1) {
            std::printf("== %s\n", args.vectors[i].c_str());
        }
        std::fputs(format_eval_table(report).c_str(), stdout);
        std::fputs(format_eval_records(report).c_str(), stdout);
    }
}

// --- query ----------------------------------------------------------------

struct QueryArgs {
    std::string codes;
    std::string vectors;
    std::string word;
    std::string query_hex;
    size_t k = 10;
};

void run_query(const QueryArgs& args) {
    if (args.codes.empty() == args.vectors.empty()) {
        throw ConfigError("pass exactly one of --codes or --vectors");
    }
    if (args.word.empty() == args.query_hex.empty()) {
        throw ConfigError("pass exactly one of --word or --query-hex");
    }
    if (!args.query_hex.empty() && args.codes.empty()) {
        throw ConfigError("--query-hex only applies to --codes queries");
    }

    TopKResult result;
    if (!args.codes.empty()) {
        BinaryEmbedding be = deserialize_hex(args.codes);
        BitCode query;
        if (!args.word.empty()) {
            auto idx = be.find(args.word);
            if (!idx) {
                throw DataError("word not in vocabulary: " + args.word);
            }
            query = be.code(*idx);
        } else {
            size_t blocks = be.blocks_per_code();
            if (args.query_hex.size() != blocks * 16) {
                throw DataError("--query-hex needs exactly " + std::to_string(blocks * 16) +
                                " hex digits for " + std::to_string(be.n_bits()) + "-bit codes");
            }
            query = BitCode(be.n_bits());
            for (size_t b = 0; b < blocks; ++b) {
                uint64_t v = 0;
                auto piece = args.query_hex.substr(b * 16, 16);
                auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + 16, v, 16);
                if (ec != std::errc{} || ptr != piece.data() + 16) {
                    throw DataError("malformed --query-hex near '" + piece + "'");
                }
                query.blocks()[b] = v;
            }
        }
        result = topk_binary(be, query, args.k);
    } else {
        EmbeddingMatrix emb = load_text_embeddings(args.vectors);
        auto idx = emb.find(args.word);
        if (!idx) {
            throw DataError("word not in vocabulary: " + args.word);
        }
        std::vector<float> query(emb.row(*idx).begin(), emb.row(*idx).end());
        result = topk_real(emb, query, args.k);
    }
    for (const auto& entry : result.entries) {
        std::printf("%s %.6f\n", entry.word.c_str(), entry.score);
    }
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
    std::string codes;
    std::string vectors;
    std::string ks = "1,10,50";
    size_t reps = 9;
    std::string query_word;
};

void run_bench(const BenchArgs& args) {
    BinaryEmbedding be = deserialize_hex(args.codes);
    EmbeddingMatrix emb = load_text_embeddings(args.vectors);

    BenchOptions opts;
    opts.ks = parse_size_list(args.ks, "--ks");
    opts.reps = args.reps;
    opts.codes_path = args.codes;
    opts.vectors_path = args.vectors;
    if (!args.query_word.empty()) {
        auto idx = be.find(args.query_word);
        if (!idx) {
            throw DataError("query word not in vocabulary: " + args.query_word);
        }
        opts.query_index = *idx;
    }

    BenchReport report = bench_topk(be, emb, opts);
    std::fputs(format_bench_table(report).c_str(), stdout);
    std::fputs(format_bench_records(report).c_str(), stdout);
}

// --- inspect ------------------------------------------------------------------

struct InspectArgs {
    std::string codes;
    std::string word;
    size_t neighbors = 10;
};

void run_inspect(const InspectArgs& args) {
    BinaryEmbedding be = deserialize_hex(args.codes);
    auto idx = be.find(args.word);
    if (!idx) {
        throw DataError("word not in vocabulary: " + args.word);
    }

    // Rank everything, drop the query itself, keep N neighbors.
    TopKResult ranked = topk_binary(be, be.code(*idx), args.neighbors + 1);
    std::vector<size_t> rows{*idx};
    for (const auto& entry : ranked.entries) {
        if (entry.index != *idx && rows.size() < args.neighbors + 1) {
            rows.push_back(entry.index);
        }
    }

    // One line per word: set bits print as '#', clear bits as '.', so
    // shared stripes line up vertically under the query row.
    for (size_t row : rows) {
        std::string bits(be.n_bits(), '.');
        auto blocks = be.code_blocks(row);
        for (size_t i = 0; i < be.n_bits(); ++i) {
            if ((blocks[i / kBlockBits] >> (i % kBlockBits)) & 1u) {
                bits[i] = '#';
            }
        }
        std::printf("%-16.16s %s\n", be.word(row).c_str(), bits.c_str());
    }
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary word embedding compression, reconstruction, search and evaluation"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand(
        "train", "Train the binarizing autoencoder and write model + hex codes");
    train_cmd->add_option("--input", train_args.input, "text embedding file")->required();
    train_cmd->add_option("--bits", train_args.bits, "code size (64/128/256/512)")
        ->default_val(256);
    train_cmd->add_option("--epochs", train_args.epochs)->default_val(10);
    train_cmd->add_option("--batch-size", train_args.batch_size)->default_val(75);
    train_cmd->add_option("--lr", train_args.lr, "learning rate")->default_val(0.001);
    train_cmd->add_option("--momentum", train_args.momentum)->default_val(0.95);
    train_cmd->add_option("--lambda-reg", train_args.lambda_reg,
                          "regularizer weight, or a comma grid like 1,2,4 (the model with the "
                          "lowest final objective is kept)")
        ->default_val("1");
    train_cmd->add_option("--seed", train_args.seed)->default_val(42);
    train_cmd->add_option("--model-out", train_args.model_out, "checkpoint path")->required();
    train_cmd->add_option("--codes-out", train_args.codes_out, "hex codes path")->required();

    BinarizeArgs bin_args;
    auto* bin_cmd =
        app.add_subcommand("binarize", "Binarize an embedding (autoencoder, naive sign, or LSH)");
    bin_cmd->add_option("--method", bin_args.method)
        ->required()
        ->check(CLI::IsMember({"autoencoder", "naive", "lsh"}));
    bin_cmd->add_option("--input", bin_args.input, "text embedding file")->required();
    bin_cmd->add_option("--output", bin_args.output, "hex codes path")->required();
    bin_cmd->add_option("--model", bin_args.model, "autoencoder checkpoint");
    auto* bits_opt = bin_cmd->add_option("--bits", bin_args.bits, "LSH code size");
    auto* seed_opt = bin_cmd->add_option("--seed", bin_args.seed, "LSH seed");

    ReconstructArgs rec_args;
    auto* rec_cmd =
        app.add_subcommand("reconstruct", "Decode hex codes back into real-valued vectors");
    rec_cmd->add_option("--model", rec_args.model)->required();
    rec_cmd->add_option("--codes", rec_args.codes)->required();
    rec_cmd->add_option("--output", rec_args.output)->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Word similarity (Spearman) or analogy accuracy for vectors or codes");
    eval_cmd->add_option("--vectors", eval_args.vectors,
                         "embedding or hex code files (auto-detected)")
        ->required();
    eval_cmd->add_option("--task", eval_args.task)
        ->required()
        ->check(CLI::IsMember({"similarity", "analogy"}));
    eval_cmd->add_option("--data", eval_args.data, "dataset files")->required();
    eval_cmd->add_option("--analogy-variant", eval_args.variant,
                         "operator grouping: subfirst = (b AND NOT a) OR c, "
                         "addfirst = (b OR c) AND NOT a")
        ->check(CLI::IsMember({"subfirst", "addfirst"}))
        ->default_val("subfirst");

    QueryArgs query_args;
    auto* query_cmd = app.add_subcommand("query", "Top-K nearest words for a query");
    query_cmd->add_option("--codes", query_args.codes, "hex codes file");
    query_cmd->add_option("--vectors", query_args.vectors, "text embedding file");
    query_cmd->add_option("--word", query_args.word);
    query_cmd->add_option("--query-hex", query_args.query_hex,
                          "raw code, concatenated 16-digit hex blocks");
    query_cmd->add_option("-k", query_args.k)->default_val(10);

    BenchArgs bench_args;
    auto* bench_cmd =
        app.add_subcommand("bench", "Time binary vs real-valued top-K linear scans");
    bench_cmd->add_option("--codes", bench_args.codes)->required();
    bench_cmd->add_option("--vectors", bench_args.vectors)->required();
    bench_cmd->add_option("--ks", bench_args.ks)->default_val("1,10,50");
    bench_cmd->add_option("--reps", bench_args.reps, "repetitions (>= 5)")->default_val(9);
    bench_cmd->add_option("--query-word", bench_args.query_word,
                          "query word (default: first vocabulary entry)");

    InspectArgs inspect_args;
    auto* inspect_cmd = app.add_subcommand(
        "inspect", "Print a word's code and its nearest neighbors as '#'/'.' bit rows");
    inspect_cmd->add_option("--codes", inspect_args.codes)->required();
    inspect_cmd->add_option("--word", inspect_args.word)->required();
    inspect_cmd->add_option("--neighbors", inspect_args.neighbors)->default_val(10);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    bin_args.bits_set = bits_opt->count() > 0;
    bin_args.seed_set = seed_opt->count() > 0;

    if (train_cmd->parsed()) {
        return run_guarded([&] { run_train(train_args); });
    }
    if (bin_cmd->parsed()) {
        return run_guarded([&] { run_binarize(bin_args); });
    }
    if (rec_cmd->parsed()) {
        return run_guarded([&] { run_reconstruct(rec_args); });
    }
    if (eval_cmd->parsed()) {
        return run_guarded([&] { run_eval(eval_args); });
    }
    if (query_cmd->parsed()) {
        return run_guarded([&] { run_query(query_args); });
    }
    if (bench_cmd->parsed()) {
        return run_guarded([&] { run_bench(bench_args); });
    }
    if (inspect_cmd->parsed()) {
        return run_guarded([&] { run_inspect(inspect_args); });
    }
    return 1;
}
