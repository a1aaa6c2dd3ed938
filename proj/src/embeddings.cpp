#include "lexind/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "lexind/error.hpp"
#include "lexind/kernels.hpp"

namespace lexind {

EmbeddingTable::EmbeddingTable(std::size_t dim, std::vector<std::string> words, std::vector<float> values)
    : dim_(dim), words_(std::move(words)), values_(std::move(values)) {
    if (dim_ == 0) throw DimensionError("embedding dimension must be positive");
    if (values_.size() != words_.size() * dim_) throw DimensionError("embedding values do not match words x dim");
    values_.resize(values_.size() + dim_, 0.0f);  // zero row for lookups of absent words
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) throw FormatError("duplicate embedding word '" + words_[i] + "'");
        for (std::size_t j = 0; j < dim_; ++j)
            if (!std::isfinite(values_[i * dim_ + j])) throw FormatError("non-finite embedding for '" + words_[i] + "'");
    }
}

bool EmbeddingTable::contains(std::string_view word) const { return index_.find(std::string(word)) != index_.end(); }

std::size_t EmbeddingTable::index_of(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? kernels::kMissing : it->second;
}

std::span<const float> EmbeddingTable::lookup(std::string_view word) const {
    std::size_t i = index_of(word);
    if (i == kernels::kMissing) i = words_.size();
    return {values_.data() + i * dim_, dim_};
}

std::vector<double> EmbeddingTable::vector(std::string_view word) const {
    auto v = lookup(word);
    return {v.begin(), v.end()};
}

namespace {

bool parse_uint(std::string_view s, std::size_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

// Splits on runs of spaces/tabs; trailing '\r' already removed.
void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t s = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (s < i) out.push_back(line.substr(s, i - s));
    }
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path, const std::optional<WordSet>& restrict_to) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    std::vector<std::string_view> fields;
    std::size_t dim = 0;
    std::size_t data_lines = 0, skipped = 0;
    bool first = true;
    std::vector<std::string> words;
    std::vector<float> values;
    WordSet seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        split_fields(line, fields);
        if (fields.empty()) continue;
        if (first) {
            first = false;
            std::size_t a = 0, b = 0;
            if (fields.size() == 2 && parse_uint(fields[0], a) && parse_uint(fields[1], b)) continue;
        }
        ++data_lines;
        if (dim == 0) {
            if (fields.size() < 2) throw FormatError(path.string() + ": first data line has no vector");
            dim = fields.size() - 1;
        }
        if (fields.size() != dim + 1) {
            ++skipped;
            continue;
        }
        std::string word(fields[0]);
        if (restrict_to && !restrict_to->count(word)) continue;
        if (!seen.insert(word).second) continue;  // first occurrence wins
        std::size_t base = values.size();
        values.resize(base + dim);
        bool ok = true;
        for (std::size_t j = 0; j < dim; ++j) {
            auto f = fields[j + 1];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), values[base + j]);
            if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(values[base + j])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            values.resize(base);
            seen.erase(word);
            ++skipped;
            continue;
        }
        words.push_back(std::move(word));
    }
    if (data_lines > 0 && static_cast<double>(skipped) > 0.01 * static_cast<double>(data_lines)) {
        throw FormatError(path.string() + ": " + std::to_string(skipped) + " of " + std::to_string(data_lines) +
                          " lines have the wrong dimension or unparsable values");
    }
    if (words.empty()) throw EmptyInputError(path.string() + ": no embeddings loaded");
    EmbeddingTable table(dim, std::move(words), std::move(values));
    table.skipped_lines = skipped;
    return table;
}

std::vector<double> centroid(const TokenList& tokens, const EmbeddingTable& table) {
    if (tokens.empty()) throw DimensionError("centroid of an empty document");
    std::vector<double> out(table.dim(), 0.0);
    for (const auto& t : tokens) {
        auto v = table.lookup(t);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += static_cast<double>(v[j]);
    }
    for (auto& x : out) x /= static_cast<double>(tokens.size());
    return out;
}

std::vector<double> centroid(const Document& doc, const EmbeddingTable& table) { return centroid(doc.tokens, table); }

DenseMatrix centroids(const Corpus& corpus, const EmbeddingTable& table) {
    std::vector<std::vector<std::size_t>> docs;
    docs.reserve(corpus.size());
    for (const auto& d : corpus.documents()) {
        std::vector<std::size_t> ids;
        ids.reserve(d.tokens.size());
        for (const auto& t : d.tokens) ids.push_back(table.index_of(t));
        docs.push_back(std::move(ids));
    }
    DenseMatrix out;
    kernels::centroids(docs, table.values(), table.dim(), out);
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DimensionError("cosine of vectors with different lengths");
    double nu = norm2(u), nv = norm2(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double c = dot(u, v) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace lexind
