#include "binembed/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "binembed/error.hpp"

namespace binembed {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> words, std::vector<float> values,
                                 size_t dim)
    : dim_(dim), words_(std::move(words)), values_(std::move(values)) {
    if (dim_ == 0) {
        throw DimensionError("embedding dimension must be positive");
    }
    if (values_.size() != words_.size() * dim_) {
        throw DimensionError("value buffer has " + std::to_string(values_.size()) +
                             " entries, expected " + std::to_string(words_.size() * dim_));
    }
    index_.reserve(words_.size());
    for (size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw DataError("duplicate word in embedding: " + words_[i]);
        }
    }
}

std::optional<size_t> EmbeddingMatrix::find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

bool parse_uint(std::string_view s, size_t& v) {
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// True when the line is a word2vec-style `|V| m` header.
bool is_header_line(const std::string& line) {
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a >> b) || (ss >> extra)) {
        return false;
    }
    size_t ignored;
    return parse_uint(a, ignored) && parse_uint(b, ignored);
}

} // namespace

EmbeddingMatrix load_text_embeddings(std::istream& in, const std::string& source,
                                     std::optional<size_t> expected_dim, LoadStats* stats) {
    std::vector<std::string> words;
    std::vector<float> values;
    std::unordered_map<std::string, size_t> seen;
    size_t dim = expected_dim.value_or(0);
    size_t duplicates = 0;
    bool header_skipped = false;

    std::string line;
    size_t line_no = 0;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && is_header_line(line)) {
            header_skipped = true;
            continue;
        }

        size_t word_end = line.find(' ');
        if (word_end == std::string::npos || word_end == 0) {
            throw ParseError(source, line_no, "expected 'word v1 v2 ...'");
        }
        std::string word = line.substr(0, word_end);

        row.clear();
        const char* p = line.data() + word_end;
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            if (p == end) {
                break;
            }
            double v;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{} || (next < end && *next != ' ' && *next != '\t')) {
                throw ParseError(source, line_no,
                                 "non-numeric value '" +
                                     std::string(p, std::min<size_t>(end - p, 16)) + "'");
            }
            if (!std::isfinite(v)) {
                throw ParseError(source, line_no, "non-finite value in vector");
            }
            row.push_back(v);
            p = next;
        }
        if (row.empty()) {
            throw ParseError(source, line_no, "word '" + word + "' has no values");
        }
        if (dim == 0) {
            dim = row.size();
        }
        if (row.size() != dim) {
            throw DimensionError(source + ":" + std::to_string(line_no) + ": row has " +
                                 std::to_string(row.size()) + " values, expected " +
                                 std::to_string(dim));
        }
        if (!seen.emplace(word, words.size()).second) {
            ++duplicates;
            continue;
        }
        words.push_back(std::move(word));
        for (double v : row) {
            values.push_back(static_cast<float>(v));
        }
    }

    if (words.empty()) {
        throw DataError(source + ": no embedding rows found");
    }
    if (stats != nullptr) {
        stats->duplicates_dropped = duplicates;
        stats->header_skipped = header_skipped;
    }
    return EmbeddingMatrix(std::move(words), std::move(values), dim);
}

EmbeddingMatrix load_text_embeddings(const std::string& path, std::optional<size_t> expected_dim,
                                     LoadStats* stats) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path + ": " + std::strerror(errno));
    }
    return load_text_embeddings(in, path, expected_dim, stats);
}

EmbeddingMatrix clip_to_unit_range(EmbeddingMatrix emb) {
    for (size_t i = 0; i < emb.size(); ++i) {
        for (float& v : emb.row(i)) {
            v = std::clamp(v, -1.0f, 1.0f);
        }
    }
    return emb;
}

void save_text_embeddings(const EmbeddingMatrix& emb, std::ostream& out) {
    char buf[32];
    for (size_t i = 0; i < emb.size(); ++i) {
        out << emb.word(i);
        for (float v : emb.row(i)) {
            std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(v));
            out << ' ' << buf;
        }
        out << '\n';
    }
}

void save_text_embeddings(const EmbeddingMatrix& emb, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path + ": " + std::strerror(errno));
    }
    save_text_embeddings(emb, out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path + ": " + std::strerror(errno));
    }
}

} // namespace binembed
