#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexind {

using TokenList = std::vector<std::string>;
using Tokenizer = std::function<TokenList(std::string_view)>;

// Lowercases (ASCII), splits on whitespace and strips leading/trailing
// non-alphanumeric bytes from each token. Tokens made only of punctuation are
// kept unchanged. Bytes >= 0x80 count as alphanumeric so UTF-8 letters survive.
TokenList tokenize(std::string_view text);

struct Document {
    std::string id;
    TokenList tokens;
    std::vector<double> ratings;  // parallel to Corpus::constructs
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t dropped_empty = 0;  // documents with no tokens
    std::size_t duplicates = 0;     // gold lexicon: repeated words (last wins)
    std::vector<std::string> dropped_ids;
};

// Immutable after construction. Vocabulary order is lexicographic.
class Corpus {
public:
    Corpus(std::vector<std::string> constructs, std::vector<Document> documents, std::size_t min_df = 1);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const std::vector<std::string>& constructs() const noexcept { return constructs_; }
    std::size_t size() const noexcept { return documents_.size(); }

    // token -> number of documents containing it
    const std::map<std::string, std::size_t>& vocab() const noexcept { return vocab_; }
    // token -> ascending indices of documents containing it, i.e. D(w)
    const std::map<std::string, std::vector<std::size_t>>& inverted_index() const noexcept { return index_; }

    // Position of `construct` in constructs(); throws SchemaError listing the
    // known constructs.
    std::size_t construct_index(std::string_view construct) const;
    std::vector<double> labels(std::string_view construct) const;

    // Sub-corpus over the given document indices (in the given order).
    Corpus subset(const std::vector<std::size_t>& indices) const;

    std::size_t min_df() const noexcept { return min_df_; }
    const LoadReport& report() const noexcept { return report_; }
    void set_report(LoadReport report) { report_ = std::move(report); }

    // Order-sensitive hash over ids, tokens and ratings.
    std::string fingerprint() const;

private:
    std::vector<std::string> constructs_;
    std::vector<Document> documents_;
    std::size_t min_df_;
    std::map<std::string, std::size_t> vocab_;
    std::map<std::string, std::vector<std::size_t>> index_;
    LoadReport report_;
};

struct CorpusOptions {
    std::optional<char> delimiter;       // inferred from extension when absent
    std::optional<std::string> id_column;  // row number used when absent or missing
    std::size_t min_df = 1;
    Tokenizer tokenizer;                  // defaults to lexind::tokenize
};

Corpus load_corpus(const std::filesystem::path& path, const std::string& text_column,
                   const std::vector<std::string>& rating_columns, const CorpusOptions& options = {});

// Writes id, text (tokens joined by single spaces) and rating columns.
void write_corpus(const std::filesystem::path& path, const Corpus& corpus, const std::string& text_column = "text",
                  std::optional<char> delimiter = std::nullopt);

struct GoldWordLexicon {
    std::vector<std::string> constructs;
    std::map<std::string, std::vector<double>> ratings;
    LoadReport report;

    std::size_t construct_index(std::string_view construct) const;
};

// Words are lowercased so they match tokenizer output.
GoldWordLexicon load_gold_lexicon(const std::filesystem::path& path, const std::string& word_column,
                                  const std::vector<std::string>& rating_columns,
                                  std::optional<char> delimiter = std::nullopt);

}  // namespace lexind
