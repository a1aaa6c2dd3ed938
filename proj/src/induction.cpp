#include "lexind/induction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lexind/error.hpp"
#include "lexind/numerics.hpp"

namespace lexind {

Lexicon::Lexicon(std::vector<std::string> constructs, std::map<std::string, std::vector<double>> entries, Json provenance)
    : constructs_(std::move(constructs)), entries_(std::move(entries)), provenance_(std::move(provenance)) {
    for (const auto& [word, values] : entries_) {
        if (values.size() != constructs_.size())
            throw DimensionError("lexicon entry '" + word + "' has " + std::to_string(values.size()) + " ratings, expected " +
                                 std::to_string(constructs_.size()));
        for (double v : values)
            if (!std::isfinite(v)) throw NumericalError("lexicon entry '" + word + "' is not finite");
    }
}

std::size_t Lexicon::construct_index(std::string_view construct) const {
    auto it = std::find(constructs_.begin(), constructs_.end(), construct);
    if (it == constructs_.end()) {
        std::string known;
        for (const auto& c : constructs_) known += (known.empty() ? "" : ", ") + c;
        throw SchemaError("lexicon has no construct '" + std::string(construct) + "' (available: " + known + ")");
    }
    return static_cast<std::size_t>(it - constructs_.begin());
}

std::optional<double> Lexicon::rating(std::string_view word, std::size_t construct) const {
    auto it = entries_.find(std::string(word));
    if (it == entries_.end()) return std::nullopt;
    return it->second.at(construct);
}

std::vector<double> Lexicon::column(std::size_t construct) const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& [w, v] : entries_) out.push_back(v.at(construct));
    return out;
}

std::string method_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::mean_star: return "mean-star";
        case MethodKind::mean_binary: return "mean-binary";
        case MethodKind::regression_weights: return "regression-weights";
        case MethodKind::mlffn: return "mlffn";
    }
    return "unknown";
}

MethodSpec MethodSpec::parse(std::string_view name) {
    MethodSpec m;
    if (name == "mean-star" || name == "mean_star") {
        m.kind = MethodKind::mean_star;
    } else if (name == "mean-binary" || name == "mean_binary") {
        m.kind = MethodKind::mean_binary;
    } else if (name == "regression-weights" || name == "regression_weights") {
        m.kind = MethodKind::regression_weights;
    } else if (name == "mlffn") {
        m.kind = MethodKind::mlffn;
    } else {
        throw UsageError("unknown method '" + std::string(name) +
                         "' (expected mean-star, mean-binary, regression-weights or mlffn)");
    }
    return m;
}

std::string MethodSpec::name() const { return method_name(kind); }

Json MethodSpec::to_json() const {
    Json j;
    j["method"] = name();
    switch (kind) {
        case MethodKind::mean_star: break;
        case MethodKind::mean_binary:
            j["tie_rule"] = tie_rule == TieRule::median_is_high ? "median_is_high" : "median_is_low";
            break;
        case MethodKind::regression_weights: j["lambda"] = lambda; break;
        case MethodKind::mlffn:
            j["config"] = mlffn.to_json();
            j["scope"] = rating.scope == WordScope::corpus_vocab ? "corpus_vocab" : "embedding_vocab";
            j["include_oov"] = rating.include_oov;
            break;
    }
    return j;
}

namespace {

Json base_provenance(const std::string& method, const Corpus& corpus, std::string_view construct) {
    Json p;
    p["method"] = method;
    p["construct"] = std::string(construct);
    p["corpus_fingerprint"] = corpus.fingerprint();
    p["documents"] = corpus.size();
    p["vocabulary"] = corpus.vocab().size();
    p["min_df"] = corpus.min_df();
    return p;
}

Lexicon mean_over_documents(const Corpus& corpus, const std::vector<double>& labels, std::string_view construct,
                            Json provenance) {
    std::map<std::string, std::vector<double>> entries;
    for (const auto& [word, docs] : corpus.inverted_index()) {
        double sum = 0.0;
        for (auto d : docs) sum += labels[d];
        entries.emplace(word, std::vector<double>{sum / static_cast<double>(docs.size())});
    }
    return Lexicon({std::string(construct)}, std::move(entries), std::move(provenance));
}

}  // namespace

Lexicon fit_mean_star(const Corpus& corpus, std::string_view construct) {
    auto labels = corpus.labels(construct);
    return mean_over_documents(corpus, labels, construct, base_provenance("mean-star", corpus, construct));
}

std::vector<double> median_split(std::span<const double> labels, TieRule tie) {
    if (labels.empty()) throw DegenerateLabelsError("median split of an empty label set");
    std::vector<double> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) throw DegenerateLabelsError("all document labels are identical");
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<double> out;
    out.reserve(n);
    for (double v : labels) {
        bool high = tie == TieRule::median_is_high ? v >= median : v > median;
        out.push_back(high ? 1.0 : 0.0);
    }
    return out;
}

Lexicon fit_mean_binary(const Corpus& corpus, std::string_view construct, TieRule tie) {
    auto binary = median_split(corpus.labels(construct), tie);
    Json p = base_provenance("mean-binary", corpus, construct);
    p["tie_rule"] = tie == TieRule::median_is_high ? "median_is_high" : "median_is_low";
    return mean_over_documents(corpus, binary, construct, std::move(p));
}

SparseMatrix relative_frequency_matrix(const Corpus& corpus) {
    std::map<std::string, std::size_t> column;
    for (const auto& [word, df] : corpus.vocab()) column.emplace(word, column.size());
    SparseMatrix x(column.size());
    std::vector<std::pair<std::size_t, double>> entries;
    for (const auto& doc : corpus.documents()) {
        std::map<std::size_t, double> counts;
        for (const auto& t : doc.tokens) {
            auto it = column.find(t);
            if (it != column.end()) counts[it->second] += 1.0;
        }
        // len(d) counts every token, including any below the min_df cut.
        const double len = static_cast<double>(doc.tokens.size());
        entries.assign(counts.begin(), counts.end());
        for (auto& e : entries) e.second /= len;
        x.append_row(entries);
    }
    return x;
}

Lexicon fit_regression_weights(const Corpus& corpus, std::string_view construct, double lambda) {
    auto labels = corpus.labels(construct);
    SparseMatrix x = relative_frequency_matrix(corpus);
    RidgeModel model = ridge_fit(x, labels, lambda);
    std::map<std::string, std::vector<double>> entries;
    std::size_t j = 0;
    for (const auto& [word, df] : corpus.vocab()) entries.emplace(word, std::vector<double>{model.coefficients[j++]});
    Json p = base_provenance("regression-weights", corpus, construct);
    p["lambda"] = lambda;
    p["lambda_used"] = model.lambda_used;
    p["intercept"] = model.intercept;
    p["solver"] = model.dual ? "cholesky-sample-space" : "cholesky-feature-space";
    return Lexicon({std::string(construct)}, std::move(entries), std::move(p));
}

MlffnFit fit_mlffn(const Corpus& corpus, const std::vector<std::string>& constructs, const EmbeddingTable& table,
                   MlffnConfig config, const MlffnRatingOptions& rating) {
    if (constructs.empty()) throw UsageError("mlffn: no constructs requested");
    if (config.input_dim != table.dim())
        throw DimensionError("mlffn: input_dim " + std::to_string(config.input_dim) + " differs from embedding dim " +
                             std::to_string(table.dim()));
    config.output_dim = constructs.size();
    std::vector<std::size_t> cols;
    for (const auto& c : constructs) cols.push_back(corpus.construct_index(c));

    DenseMatrix inputs = centroids(corpus, table);
    DenseMatrix targets(corpus.size(), constructs.size());
    for (std::size_t d = 0; d < corpus.size(); ++d)
        for (std::size_t c = 0; c < cols.size(); ++c) targets(d, c) = corpus.documents()[d].ratings[cols[c]];
    auto [model, log] = train(config, inputs, targets);

    std::set<std::string> words;
    std::size_t oov = 0;
    if (rating.scope == WordScope::embedding_vocab) words.insert(table.words().begin(), table.words().end());
    for (const auto& [w, df] : corpus.vocab()) {
        if (table.contains(w)) {
            words.insert(w);
        } else if (rating.include_oov) {
            words.insert(w);
            ++oov;
        }
    }
    for (const auto& w : rating.extra_words)
        if (table.contains(w)) words.insert(w);
    if (words.empty()) throw EmptyInputError("mlffn: no corpus word has an embedding");

    DenseMatrix word_inputs(words.size(), table.dim());
    std::size_t r = 0;
    for (const auto& w : words) {
        auto v = table.lookup(w);
        auto dst = word_inputs.row(r++);
        for (std::size_t j = 0; j < v.size(); ++j) dst[j] = static_cast<double>(v[j]);
    }
    DenseMatrix pred = model.predict(word_inputs);
    std::map<std::string, std::vector<double>> entries;
    r = 0;
    for (const auto& w : words) {
        auto row = pred.row(r++);
        entries.emplace(w, std::vector<double>(row.begin(), row.end()));
    }

    Json p = base_provenance("mlffn", corpus, constructs.size() == 1 ? constructs[0] : std::string("joint"));
    p["constructs"] = constructs;
    p["config"] = config.to_json();
    p["scope"] = rating.scope == WordScope::corpus_vocab ? "corpus_vocab" : "embedding_vocab";
    p["include_oov"] = rating.include_oov;
    p["oov_words_rated"] = oov;
    p["centroid_divisor"] = "all tokens, out-of-vocabulary tokens contribute zero vectors";
    p["training"] = {{"best_epoch", log.best_epoch},
                     {"stopped_epoch", log.stopped_epoch},
                     {"early_stopped", log.early_stopped},
                     {"best_validation_mse", log.best_validation_loss},
                     {"train_size", log.train_size},
                     {"validation_size", log.validation_size}};
    return {Lexicon(constructs, std::move(entries), std::move(p)), std::move(model), std::move(log)};
}

Lexicon fit_lexicon(const MethodSpec& method, const Corpus& corpus, std::string_view construct,
                    const EmbeddingTable* table) {
    switch (method.kind) {
        case MethodKind::mean_star: return fit_mean_star(corpus, construct);
        case MethodKind::mean_binary: return fit_mean_binary(corpus, construct, method.tie_rule);
        case MethodKind::regression_weights: return fit_regression_weights(corpus, construct, method.lambda);
        case MethodKind::mlffn:
            if (!table) throw UsageError("mlffn requires embeddings");
            return fit_mlffn(corpus, {std::string(construct)}, *table, method.mlffn, method.rating).lexicon;
    }
    throw UsageError("unknown method");
}

Lexicon merge_lexica(const std::vector<Lexicon>& parts) {
    if (parts.empty()) throw UsageError("nothing to merge");
    if (parts.size() == 1) return parts.front();
    std::vector<std::string> constructs;
    for (const auto& p : parts) constructs.insert(constructs.end(), p.constructs().begin(), p.constructs().end());
    std::map<std::string, std::vector<double>> entries;
    for (const auto& [word, first] : parts.front().entries()) {
        std::vector<double> values;
        bool everywhere = true;
        for (const auto& p : parts) {
            auto it = p.entries().find(word);
            if (it == p.entries().end()) {
                everywhere = false;
                break;
            }
            values.insert(values.end(), it->second.begin(), it->second.end());
        }
        if (everywhere) entries.emplace(word, std::move(values));
    }
    Json prov = Json::array();
    for (const auto& p : parts) prov.push_back(p.provenance());
    return Lexicon(std::move(constructs), std::move(entries), Json{{"parts", prov}});
}

Lexicon rescale_log_minmax(const Lexicon& lexicon, double lo, double hi, std::vector<std::string>* warnings) {
    if (!(lo < hi)) throw UsageError("rescale: need lo < hi");
    std::map<std::string, std::vector<double>> entries = lexicon.entries();
    for (std::size_t c = 0; c < lexicon.constructs().size(); ++c) {
        if (entries.empty()) break;
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (const auto& [w, v] : entries) {
            mn = std::min(mn, v[c]);
            mx = std::max(mx, v[c]);
        }
        if (mn == mx) {
            for (auto& [w, v] : entries) v[c] = 0.5 * (lo + hi);
            if (warnings)
                warnings->push_back("construct '" + lexicon.constructs()[c] +
                                    "' has a single distinct value; assigned the midpoint");
            continue;
        }
        const double gmax = std::log(mx - mn + 1.0);
        for (auto& [w, v] : entries) {
            const double x = v[c];
            if (x == mn) {
                v[c] = lo;
            } else if (x == mx) {
                v[c] = hi;
            } else {
                v[c] = lo + (hi - lo) * (std::log(x - mn + 1.0) / gmax);
            }
        }
    }
    Json p = lexicon.provenance();
    Json step = {{"transform", "log-min-max"},
                 {"formula", "g(x) = ln(x - min(x) + 1); y = lo + (hi - lo) * (g(x) - min g) / (max g - min g)"},
                 {"fit", "per construct"},
                 {"lo", lo},
                 {"hi", hi}};
    if (p.is_object() && p.contains("rescaling")) {
        p["rescaling"].push_back(step);
    } else {
        if (!p.is_object()) p = Json::object();
        p["rescaling"] = Json::array({step});
    }
    return Lexicon(lexicon.constructs(), std::move(entries), std::move(p));
}

}  // namespace lexind
