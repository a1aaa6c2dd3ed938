#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexind/corpus.hpp"
#include "lexind/embeddings.hpp"
#include "lexind/neural.hpp"
#include "lexind/provenance.hpp"

namespace lexind {

class Lexicon {
public:
    Lexicon() = default;
    Lexicon(std::vector<std::string> constructs, std::map<std::string, std::vector<double>> entries, Json provenance = {});

    const std::vector<std::string>& constructs() const noexcept { return constructs_; }
    const std::map<std::string, std::vector<double>>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const Json& provenance() const noexcept { return provenance_; }
    Json& provenance() noexcept { return provenance_; }

    std::size_t construct_index(std::string_view construct) const;
    std::optional<double> rating(std::string_view word, std::size_t construct) const;
    // Ratings of one construct in word order.
    std::vector<double> column(std::size_t construct) const;

    friend bool operator==(const Lexicon& a, const Lexicon& b) {
        return a.constructs_ == b.constructs_ && a.entries_ == b.entries_;
    }

private:
    std::vector<std::string> constructs_;
    std::map<std::string, std::vector<double>> entries_;
    Json provenance_;
};

enum class MethodKind { mean_star, mean_binary, regression_weights, mlffn };

// How a median split treats labels equal to the median.
enum class TieRule { median_is_high, median_is_low };

enum class WordScope { corpus_vocab, embedding_vocab };

struct MlffnRatingOptions {
    WordScope scope = WordScope::corpus_vocab;
    // Also rate corpus words without an embedding; they all receive the
    // network's output for the zero vector.
    bool include_oov = false;
    // Additional words to rate when they have an embedding.
    std::vector<std::string> extra_words;
};

struct MethodSpec {
    MethodKind kind = MethodKind::mean_star;
    double lambda = 1.0;
    TieRule tie_rule = TieRule::median_is_high;
    MlffnConfig mlffn;
    MlffnRatingOptions rating;

    // "mean-star", "mean-binary", "regression-weights", "mlffn"
    static MethodSpec parse(std::string_view name);
    std::string name() const;
    Json to_json() const;
};

std::string method_name(MethodKind kind);

Lexicon fit_mean_star(const Corpus& corpus, std::string_view construct);

// 0 below the median, 1 above; labels equal to the median follow `tie`.
std::vector<double> median_split(std::span<const double> labels, TieRule tie = TieRule::median_is_high);
Lexicon fit_mean_binary(const Corpus& corpus, std::string_view construct, TieRule tie = TieRule::median_is_high);

// Relative-frequency bag-of-words design matrix: rows are documents, columns
// follow corpus.vocab() order.
SparseMatrix relative_frequency_matrix(const Corpus& corpus);
Lexicon fit_regression_weights(const Corpus& corpus, std::string_view construct, double lambda = 1.0);

struct MlffnFit {
    Lexicon lexicon;
    MlffnModel model;
    TrainingLog log;
};

// Trains one network jointly over `constructs` on document centroids, then
// rates words by feeding their vectors through it.
MlffnFit fit_mlffn(const Corpus& corpus, const std::vector<std::string>& constructs, const EmbeddingTable& table,
                   MlffnConfig config, const MlffnRatingOptions& rating = {});

// Dispatches on method.kind for a single construct. `table` is required for
// mlffn only.
Lexicon fit_lexicon(const MethodSpec& method, const Corpus& corpus, std::string_view construct,
                    const EmbeddingTable* table = nullptr);

// Combines single-construct lexica over the words they all share.
Lexicon merge_lexica(const std::vector<Lexicon>& parts);

// Per construct: g(x) = ln(x - min + 1), then min-max of g onto [lo, hi].
// A construct whose values are all equal maps to (lo + hi) / 2 and adds a
// warning.
Lexicon rescale_log_minmax(const Lexicon& lexicon, double lo, double hi, std::vector<std::string>* warnings = nullptr);

// TSV "word<TAB>c1<TAB>c2..." with round-trip decimals; provenance goes to
// "<path>.provenance.json" when `with_provenance` is set.
void write_lexicon(const std::filesystem::path& path, const Lexicon& lexicon, bool with_provenance = true);
Lexicon read_lexicon(const std::filesystem::path& path);

}  // namespace lexind
