#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexind/corpus.hpp"
#include "lexind/embeddings.hpp"
#include "lexind/induction.hpp"

namespace lexind {

struct FoldResult {
    std::size_t fold = 0;
    bool ok = false;
    double r = 0.0;                // valid when ok
    std::size_t rated_gold = 0;   // |rated words ∩ gold|
    std::string failure;          // reason when !ok
};

struct EvalReport {
    std::string method;
    std::string construct;
    std::vector<FoldResult> folds;  // one per fold, in fold order
    double mean_r = 0.0;            // over successful folds; NaN if none
    double sd_r = 0.0;
    std::size_t failed_folds = 0;
    std::size_t evaluated_vocab_size = 0;  // mean |rated ∩ gold| over folds, rounded
    double coverage = 0.0;                 // mean (|rated ∩ gold| / |gold|) over folds

    std::vector<double> per_fold() const;  // r of the successful folds
};

struct IntrinsicOptions {
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    std::size_t min_overlap = 30;  // corpus vocab ∩ gold words
    // For mlffn: also rate every gold word that has an embedding, so words
    // absent from the training folds are evaluated too.
    bool mlffn_rate_gold_words = true;
};

// Documents are shuffled with the seed and split into contiguous folds; each
// fold's lexicon is fit on the remaining documents and correlated with the
// gold ratings over rated ∩ gold words.
EvalReport eval_intrinsic(const Corpus& corpus, std::string_view corpus_construct, const GoldWordLexicon& gold,
                          std::string_view gold_construct, const MethodSpec& method,
                          const IntrinsicOptions& options = {}, const EmbeddingTable* table = nullptr);

// Document indices of each fold.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t documents, std::size_t folds, std::uint64_t seed);

struct UserCorpus {
    std::string user_id;
    std::map<std::string, double> counts;  // word -> occurrences
    double trait_score = 0.0;
};

struct ExtrinsicResult {
    double r = 0.0;
    std::map<std::string, double> user_scores;
    std::vector<std::string> excluded_users;  // no word shared with the lexicon
};

// Frequency-weighted mean rating over the lexicon words a user wrote.
std::optional<double> score_user(const Lexicon& lexicon, std::size_t construct, const UserCorpus& user);

ExtrinsicResult eval_extrinsic(const Lexicon& lexicon, std::string_view construct, const std::vector<UserCorpus>& users);

// Users file: columns user_id,text (several rows per user allowed) or
// user_id,word,count. Traits file: user_id plus the named trait column.
std::vector<UserCorpus> load_users(const std::filesystem::path& users_path, const std::filesystem::path& traits_path,
                                   const std::string& trait_column, std::optional<char> delimiter = std::nullopt);

// "method\tconstruct\tfolds\tmean_r\tsd_r\tcoverage"
std::string eval_report_tsv_header();
std::string eval_report_tsv_row(const EvalReport& report);
std::string eval_report_text(const EvalReport& report);

}  // namespace lexind
