#include "lexind/evaluation.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "lexind/dsv.hpp"
#include "lexind/error.hpp"
#include "lexind/numerics.hpp"
#include "lexind/random.hpp"

namespace lexind {

std::vector<double> EvalReport::per_fold() const {
    std::vector<double> out;
    for (const auto& f : folds)
        if (f.ok) out.push_back(f.r);
    return out;
}

std::vector<std::vector<std::size_t>> fold_partition(std::size_t documents, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
    if (folds > documents)
        throw UsageError("cannot split " + std::to_string(documents) + " documents into " + std::to_string(folds) +
                         " folds");
    std::vector<std::size_t> order(documents);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, 11);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::vector<std::size_t>> out(folds);
    const std::size_t base = documents / folds, extra = documents % folds;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::size_t size = base + (f < extra ? 1 : 0);
        out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                      order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return out;
}

EvalReport eval_intrinsic(const Corpus& corpus, std::string_view corpus_construct, const GoldWordLexicon& gold,
                          std::string_view gold_construct, const MethodSpec& method, const IntrinsicOptions& options,
                          const EmbeddingTable* table) {
    corpus.construct_index(corpus_construct);
    const std::size_t gc = gold.construct_index(gold_construct);
    std::size_t overlap = 0;
    for (const auto& [w, df] : corpus.vocab()) overlap += gold.ratings.count(w);
    if (overlap < options.min_overlap)
        throw EmptyInputError("corpus and gold lexicon share " + std::to_string(overlap) + " words, need " +
                              std::to_string(options.min_overlap));
    if (method.kind == MethodKind::mlffn && !table) throw UsageError("mlffn evaluation requires embeddings");

    MethodSpec spec = method;
    if (spec.kind == MethodKind::mlffn && options.mlffn_rate_gold_words) {
        for (const auto& [w, v] : gold.ratings) spec.rating.extra_words.push_back(w);
    }

    EvalReport report;
    report.method = method.name();
    report.construct = std::string(corpus_construct);
    const auto parts = fold_partition(corpus.size(), options.folds, options.seed);
    double coverage_sum = 0.0, rated_sum = 0.0;
    for (std::size_t f = 0; f < parts.size(); ++f) {
        std::vector<std::size_t> train_docs;
        for (std::size_t g = 0; g < parts.size(); ++g)
            if (g != f) train_docs.insert(train_docs.end(), parts[g].begin(), parts[g].end());
        Corpus train = corpus.subset(train_docs);
        if (spec.kind == MethodKind::mlffn) spec.mlffn.seed = Rng::mix(method.mlffn.seed, f);

        FoldResult fr;
        fr.fold = f;
        try {
            Lexicon lex = fit_lexicon(spec, train, corpus_construct, table);
            std::vector<double> pred, truth;
            for (const auto& [w, v] : lex.entries()) {
                auto it = gold.ratings.find(w);
                if (it == gold.ratings.end()) continue;
                pred.push_back(v[0]);
                truth.push_back(it->second[gc]);
            }
            fr.rated_gold = pred.size();
            if (pred.size() < 2) {
                fr.failure = "fewer than two rated gold words";
            } else {
                fr.r = pearson(pred, truth);
                fr.ok = true;
            }
        } catch (const UndefinedCorrelationError& e) {
            fr.failure = std::string("undefined correlation: ") + e.what();
        } catch (const DegenerateLabelsError& e) {
            fr.failure = std::string("degenerate labels: ") + e.what();
        }
        coverage_sum += static_cast<double>(fr.rated_gold) / static_cast<double>(gold.ratings.size());
        rated_sum += static_cast<double>(fr.rated_gold);
        if (!fr.ok) ++report.failed_folds;
        report.folds.push_back(std::move(fr));
    }
    const auto rs = report.per_fold();
    report.mean_r = rs.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(rs);
    report.sd_r = stddev(rs);
    report.coverage = coverage_sum / static_cast<double>(parts.size());
    report.evaluated_vocab_size = static_cast<std::size_t>(std::llround(rated_sum / static_cast<double>(parts.size())));
    return report;
}

std::optional<double> score_user(const Lexicon& lexicon, std::size_t construct, const UserCorpus& user) {
    double num = 0.0, den = 0.0;
    for (const auto& [w, count] : user.counts) {
        auto r = lexicon.rating(w, construct);
        if (!r) continue;
        num += *r * count;
        den += count;
    }
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

ExtrinsicResult eval_extrinsic(const Lexicon& lexicon, std::string_view construct, const std::vector<UserCorpus>& users) {
    const std::size_t c = lexicon.construct_index(construct);
    ExtrinsicResult res;
    std::vector<double> scores, traits;
    for (const auto& u : users) {
        auto s = score_user(lexicon, c, u);
        if (!s) {
            res.excluded_users.push_back(u.user_id);
            continue;
        }
        res.user_scores[u.user_id] = *s;
        scores.push_back(*s);
        traits.push_back(u.trait_score);
    }
    if (scores.size() < 3)
        throw EmptyInputError("extrinsic evaluation needs >= 3 users sharing words with the lexicon, have " +
                              std::to_string(scores.size()));
    res.r = pearson(scores, traits);
    return res;
}

std::vector<UserCorpus> load_users(const std::filesystem::path& users_path, const std::filesystem::path& traits_path,
                                   const std::string& trait_column, std::optional<char> delimiter) {
    DsvTable ut = read_dsv_file(users_path, delimiter);
    const std::size_t uid = ut.require_column("user_id");
    std::map<std::string, std::map<std::string, double>> counts;
    std::vector<std::string> order;
    auto touch = [&](const std::string& id) -> std::map<std::string, double>& {
        auto [it, inserted] = counts.try_emplace(id);
        if (inserted) order.push_back(id);
        return it->second;
    };
    if (auto text = ut.column("text")) {
        for (const auto& row : ut.rows) {
            auto& m = touch(row[uid]);
            for (const auto& t : tokenize(row[*text])) m[t] += 1.0;
        }
    } else {
        const std::size_t wc = ut.require_column("word");
        const std::size_t cc = ut.require_column("count");
        for (std::size_t r = 0; r < ut.rows.size(); ++r) {
            const auto& row = ut.rows[r];
            auto v = parse_double(row[cc]);
            if (!v || !(*v > 0.0) || !std::isfinite(*v)) throw RowError(ut.row_lines[r], "count must be a positive number");
            std::string w = row[wc];
            for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            touch(row[uid])[w] += *v;
        }
    }
    DsvTable tt = read_dsv_file(traits_path, delimiter);
    const std::size_t tid = tt.require_column("user_id");
    const std::size_t tcol = tt.require_column(trait_column);
    std::map<std::string, double> traits;
    for (std::size_t r = 0; r < tt.rows.size(); ++r) {
        auto v = parse_double(tt.rows[r][tcol]);
        if (!v || !std::isfinite(*v)) throw RowError(tt.row_lines[r], "bad trait value '" + tt.rows[r][tcol] + "'");
        traits[tt.rows[r][tid]] = *v;
    }
    std::vector<UserCorpus> users;
    for (const auto& id : order) {
        auto it = traits.find(id);
        if (it == traits.end()) continue;  // no trait score, nothing to correlate
        if (counts[id].empty()) continue;
        users.push_back({id, std::move(counts[id]), it->second});
    }
    if (users.empty()) throw EmptyInputError("no user has both text and a trait score");
    return users;
}

std::string eval_report_tsv_header() { return "method\tconstruct\tfolds\tmean_r\tsd_r\tcoverage"; }

std::string eval_report_tsv_row(const EvalReport& r) {
    std::ostringstream out;
    out << r.method << '\t' << r.construct << '\t' << r.folds.size() << '\t' << format_double(r.mean_r) << '\t'
        << format_double(r.sd_r) << '\t' << format_double(r.coverage);
    return out.str();
}

std::string eval_report_text(const EvalReport& r) {
    std::ostringstream out;
    char buf[128];
    out << "[" << r.method << " / " << r.construct << "]\n";
    for (const auto& f : r.folds) {
        if (f.ok) {
            std::snprintf(buf, sizeof buf, "  fold %2zu  r = %.4f  (%zu gold words rated)\n", f.fold + 1, f.r, f.rated_gold);
        } else {
            std::snprintf(buf, sizeof buf, "  fold %2zu  failed: ", f.fold + 1);
        }
        out << buf;
        if (!f.ok) out << f.failure << '\n';
    }
    std::snprintf(buf, sizeof buf, "  mean r = %.4f  sd = %.4f  coverage = %.4f  failed folds = %zu\n", r.mean_r, r.sd_r,
                  r.coverage, r.failed_folds);
    out << buf;
    return out.str();
}

}  // namespace lexind
