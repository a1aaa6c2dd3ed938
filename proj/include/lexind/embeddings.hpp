#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lexind/corpus.hpp"
#include "lexind/matrix.hpp"

namespace lexind {

// word -> float vector of fixed dimension. Immutable once built; absent words
// look up as the all-zero vector.
class EmbeddingTable {
public:
    EmbeddingTable(std::size_t dim, std::vector<std::string> words, std::vector<float> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }

    bool contains(std::string_view word) const;
    // Row index of `word`, or kernels::kMissing.
    std::size_t index_of(std::string_view word) const;
    // The stored vector, or a zero vector of length dim().
    std::span<const float> lookup(std::string_view word) const;
    std::vector<double> vector(std::string_view word) const;

    std::span<const float> values() const noexcept { return values_; }

    std::size_t skipped_lines = 0;  // load report: rows with the wrong arity

private:
    std::size_t dim_;
    std::vector<std::string> words_;
    std::vector<float> values_;  // row-major, words_.size() x dim_, plus one zero row
    std::unordered_map<std::string, std::size_t> index_;
};

using WordSet = std::unordered_set<std::string>;

// Text vectors: optional "count dim" header line, then "word f1 ... fdim".
// Lines with the wrong arity are skipped up to 1% of data lines.
EmbeddingTable load_embeddings(const std::filesystem::path& path, const std::optional<WordSet>& restrict_to = std::nullopt);

// Mean of token vectors; out-of-vocabulary tokens add zero but still count in
// the divisor.
std::vector<double> centroid(const TokenList& tokens, const EmbeddingTable& table);
std::vector<double> centroid(const Document& doc, const EmbeddingTable& table);

// One centroid row per document.
DenseMatrix centroids(const Corpus& corpus, const EmbeddingTable& table);

// 0 when either vector has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace lexind
