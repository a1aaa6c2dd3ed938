#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lexind/clustering.hpp"
#include "lexind/corpus.hpp"
#include "lexind/dsv.hpp"
#include "lexind/embeddings.hpp"
#include "lexind/error.hpp"
#include "lexind/evaluation.hpp"
#include "lexind/induction.hpp"
#include "lexind/numerics.hpp"
#include "lexind/provenance.hpp"

namespace lexind::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

std::pair<double, double> parse_range(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("range '" + s + "' must look like lo:hi");
    auto lo = parse_double(s.substr(0, colon));
    auto hi = parse_double(s.substr(colon + 1));
    if (!lo || !hi) throw UsageError("range '" + s + "' must look like lo:hi");
    if (!(*lo < *hi)) throw UsageError("range '" + s + "' needs lo < hi");
    return {*lo, *hi};
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// State shared by all subcommands.
struct Run {
    std::string command;
    std::vector<std::string> argv;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config;
    std::string stage = "parse";
    Json inputs = Json::object();
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    void resolve_seed() {
        if (seed_given) return;
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        *err << "lexind: no --seed given, using " << seed << '\n';
    }

    void add_input(const std::string& role, const std::string& path) {
        stage = "fingerprint " + role;
        inputs[role] = Json{{"path", path}, {"fingerprint", fingerprint_file(path)}};
    }

    Json block() const {
        Json j;
        j["tool"] = "lexind";
        j["version"] = std::string(kToolVersion);
        j["command"] = command;
        j["argv"] = argv;
        j["seed"] = seed;
        j["seed_source"] = seed_given ? "flag" : "entropy";
        std::vector<std::string> rerun = argv;
        if (!seed_given) rerun.push_back("--seed=" + std::to_string(seed));
        j["rerun"] = rerun;
        j["inputs"] = inputs;
        return j;
    }
};

void add_common(CLI::App* sub, Run& run) {
    sub->add_option("--seed", run.seed, "Seed for all randomness (entropy seed recorded when omitted)");
    sub->add_option("--config", run.config, "key=value file; explicit flags override it");
}

struct MlffnFlags {
    std::string hidden = "256,128";
    MlffnConfig config;
    std::string monitor = "mse";
    std::string scope = "corpus";
    bool include_oov = false;
};

void add_mlffn_options(CLI::App* sub, MlffnFlags& f) {
    sub->add_option("--hidden", f.hidden, "Hidden layer sizes, comma separated")->capture_default_str();
    sub->add_option("--learning-rate", f.config.learning_rate)->capture_default_str();
    sub->add_option("--batch-size", f.config.batch_size)->capture_default_str();
    sub->add_option("--epochs", f.config.max_epochs)->capture_default_str();
    sub->add_option("--patience", f.config.patience)->capture_default_str();
    sub->add_option("--dropout-input", f.config.dropout_input)->capture_default_str();
    sub->add_option("--dropout-hidden", f.config.dropout_hidden)->capture_default_str();
    sub->add_option("--l2", f.config.l2)->capture_default_str();
    sub->add_option("--validation-fraction", f.config.validation_fraction)->capture_default_str();
    sub->add_option("--monitor", f.monitor, "Early-stopping monitor: mse or pearson")
        ->check(CLI::IsMember({"mse", "pearson"}))
        ->capture_default_str();
    sub->add_option("--scope", f.scope, "Words to rate: corpus or embeddings")
        ->check(CLI::IsMember({"corpus", "embeddings"}))
        ->capture_default_str();
    sub->add_flag("--include-oov", f.include_oov, "Also rate corpus words without an embedding");
}

struct MethodFlags {
    double lambda = 1.0;
    std::string tie_rule = "high";
    MlffnFlags mlffn;
};

void add_method_options(CLI::App* sub, MethodFlags& f) {
    sub->add_option("--lambda", f.lambda, "Ridge penalty for regression-weights")->capture_default_str();
    sub->add_option("--tie-rule", f.tie_rule, "Median ties in mean-binary: high or low")
        ->check(CLI::IsMember({"high", "low"}))
        ->capture_default_str();
    add_mlffn_options(sub, f.mlffn);
}

MethodSpec make_method(const std::string& name, const MethodFlags& f, std::uint64_t seed) {
    MethodSpec m = MethodSpec::parse(name);
    m.lambda = f.lambda;
    m.tie_rule = f.tie_rule == "low" ? TieRule::median_is_low : TieRule::median_is_high;
    m.mlffn = f.mlffn.config;
    m.mlffn.hidden_sizes.clear();
    for (const auto& h : split_list(f.mlffn.hidden)) {
        try {
            std::size_t pos = 0;
            long v = std::stol(h, &pos);
            if (pos != h.size() || v <= 0) throw std::invalid_argument(h);
            m.mlffn.hidden_sizes.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("--hidden: '" + h + "' is not a positive integer");
        }
    }
    m.mlffn.monitor = f.mlffn.monitor == "pearson" ? StopMonitor::validation_pearson : StopMonitor::validation_mse;
    m.mlffn.seed = seed;
    m.rating.scope = f.mlffn.scope == "embeddings" ? WordScope::embedding_vocab : WordScope::corpus_vocab;
    m.rating.include_oov = f.mlffn.include_oov;
    return m;
}

struct CorpusFlags {
    std::string path;
    std::string text_column = "text";
    std::string id_column;
    std::size_t min_df = 1;
};

void add_corpus_options(CLI::App* sub, CorpusFlags& f, bool required = true) {
    auto* o = sub->add_option("--corpus", f.path, "Document corpus (.csv comma, otherwise tab)");
    if (required) o->required();
    sub->add_option("--text-column", f.text_column)->capture_default_str();
    sub->add_option("--id-column", f.id_column);
    sub->add_option("--min-df", f.min_df, "Minimum document frequency")->capture_default_str();
}

Corpus load_corpus_for(Run& run, const CorpusFlags& f, const std::vector<std::string>& constructs,
                       const std::string& role = "corpus") {
    run.add_input(role, f.path);
    run.stage = "load " + role;
    CorpusOptions opts;
    if (!f.id_column.empty()) opts.id_column = f.id_column;
    opts.min_df = f.min_df;
    Corpus corpus = load_corpus(f.path, f.text_column, constructs, opts);
    if (corpus.report().dropped_empty)
        *run.err << "lexind: dropped " << corpus.report().dropped_empty << " empty document(s) from " << f.path << '\n';
    return corpus;
}

EmbeddingTable load_table(Run& run, const std::string& path, std::optional<WordSet> restrict_to) {
    run.add_input("embeddings", path);
    run.stage = "load embeddings";
    EmbeddingTable t = load_embeddings(path, restrict_to);
    if (t.skipped_lines) *run.err << "lexind: skipped " << t.skipped_lines << " malformed embedding line(s)\n";
    return t;
}

WordSet corpus_words(const Corpus& c) {
    WordSet w;
    for (const auto& [word, df] : c.vocab()) w.insert(word);
    return w;
}

void write_sidecar(const std::string& out_path, const Json& doc) { write_json_file(provenance_path_for(out_path), doc); }

std::vector<std::string> construct_list(const std::string& one, const std::string& many) {
    std::vector<std::string> cs = split_list(many);
    if (!one.empty()) cs.insert(cs.begin(), one);
    if (cs.empty()) throw UsageError("give --construct or --constructs");
    std::vector<std::string> unique;
    for (const auto& c : cs)
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
    return unique;
}

std::vector<std::string> method_list(const std::string& s) {
    if (s == "all") return {"mean-binary", "regression-weights", "mean-star", "mlffn"};
    auto ms = split_list(s);
    if (ms.empty()) throw UsageError("--method is empty");
    for (const auto& m : ms) MethodSpec::parse(m);
    return ms;
}

bool needs_embeddings(const std::vector<std::string>& methods) {
    for (const auto& m : methods)
        if (MethodSpec::parse(m).kind == MethodKind::mlffn) return true;
    return false;
}

// ---- induce ----------------------------------------------------------------

struct InduceArgs {
    std::string method = "mean-star";
    CorpusFlags corpus;
    std::string construct, constructs;
    std::string embeddings;
    std::string rescale;
    std::string out;
    bool joint = false;
    MethodFlags mflags;
};

Lexicon induce_lexicon(Run& run, const MethodSpec& method, const Corpus& corpus,
                       const std::vector<std::string>& constructs, const EmbeddingTable* table, bool joint) {
    if (method.kind == MethodKind::mlffn && joint) {
        run.stage = "fit mlffn (joint)";
        MlffnConfig cfg = method.mlffn;
        cfg.input_dim = table->dim();
        return fit_mlffn(corpus, constructs, *table, cfg, method.rating).lexicon;
    }
    std::vector<Lexicon> parts;
    for (const auto& c : constructs) {
        run.stage = "fit " + method.name() + " for " + c;
        MethodSpec m = method;
        if (table) m.mlffn.input_dim = table->dim();
        parts.push_back(fit_lexicon(m, corpus, c, table));
    }
    run.stage = "merge constructs";
    Lexicon lex = merge_lexica(parts);
    if (parts.size() > 1) {
        Json per = Json::array();
        for (const auto& p : parts) per.push_back(p.provenance());
        lex.provenance() = Json{{"per_construct", per}};
    }
    return lex;
}

int cmd_induce(Run& run, InduceArgs& a) {
    auto constructs = construct_list(a.construct, a.constructs);
    MethodSpec method = make_method(a.method, a.mflags, run.seed);
    if (method.kind == MethodKind::mlffn && a.embeddings.empty()) throw UsageError("--method mlffn needs --embeddings");
    std::optional<std::pair<double, double>> range;
    if (!a.rescale.empty()) range = parse_range(a.rescale);
    if (method.kind == MethodKind::mlffn) method.mlffn.validate();

    Corpus corpus = load_corpus_for(run, a.corpus, constructs);
    std::optional<EmbeddingTable> table;
    if (method.kind == MethodKind::mlffn) {
        std::optional<WordSet> restrict_to;
        if (method.rating.scope == WordScope::corpus_vocab) restrict_to = corpus_words(corpus);
        table = load_table(run, a.embeddings, restrict_to);
    }
    Lexicon lex = induce_lexicon(run, method, corpus, constructs, table ? &*table : nullptr, a.joint);
    if (range) {
        run.stage = "rescale";
        std::vector<std::string> warnings;
        lex = rescale_log_minmax(lex, range->first, range->second, &warnings);
        for (const auto& w : warnings) *run.err << "lexind: warning: " << w << '\n';
    }
    run.stage = "write lexicon";
    Json prov = lex.provenance();
    lex.provenance() = Json{{"run", run.block()}, {"method", method.to_json()}, {"corpus_fingerprint", corpus.fingerprint()},
                            {"fit", prov}};
    write_lexicon(a.out, lex);
    *run.out << "wrote " << lex.size() << " words x " << lex.constructs().size() << " construct(s) to " << a.out << '\n';
    return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct GoldFlags {
    std::string path;
    std::string word_column = "word";
    std::string constructs;  // gold column per corpus construct; defaults to the same names
};

struct IntrinsicArgs {
    std::string method = "mean-star";
    CorpusFlags corpus;
    std::string construct, constructs;
    GoldFlags gold;
    std::string embeddings;
    std::size_t folds = 10;
    std::size_t min_overlap = 30;
    bool rate_corpus_only = false;
    std::string out;
    MethodFlags mflags;
};

struct IntrinsicSetup {
    std::vector<std::string> constructs, gold_constructs;
    Corpus corpus;
    GoldWordLexicon gold;
    std::optional<EmbeddingTable> table;
};

IntrinsicSetup setup_intrinsic(Run& run, IntrinsicArgs& a, const std::vector<std::string>& methods) {
    auto constructs = construct_list(a.construct, a.constructs);
    auto gold_constructs = a.gold.constructs.empty() ? constructs : split_list(a.gold.constructs);
    if (gold_constructs.size() != constructs.size())
        throw UsageError("--gold-constructs must name one gold column per construct");
    if (needs_embeddings(methods) && a.embeddings.empty()) throw UsageError("mlffn needs --embeddings");
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    Corpus corpus = load_corpus_for(run, a.corpus, constructs);
    run.add_input("gold", a.gold.path);
    run.stage = "load gold lexicon";
    GoldWordLexicon gold = load_gold_lexicon(a.gold.path, a.gold.word_column, gold_constructs);
    std::optional<EmbeddingTable> table;
    if (needs_embeddings(methods)) {
        WordSet words = corpus_words(corpus);
        for (const auto& [w, v] : gold.ratings) words.insert(w);
        table = load_table(run, a.embeddings, words);
    }
    return {constructs, gold_constructs, std::move(corpus), std::move(gold), std::move(table)};
}

EvalReport run_intrinsic(Run& run, const IntrinsicArgs& a, const IntrinsicSetup& s, const std::string& method_name,
                         std::size_t c) {
    MethodSpec m = make_method(method_name, a.mflags, run.seed);
    if (s.table) m.mlffn.input_dim = s.table->dim();
    if (m.kind == MethodKind::mlffn) m.mlffn.validate();
    IntrinsicOptions opts;
    opts.folds = a.folds;
    opts.seed = run.seed;
    opts.min_overlap = a.min_overlap;
    opts.mlffn_rate_gold_words = !a.rate_corpus_only;
    run.stage = "intrinsic " + m.name() + " for " + s.constructs[c];
    return eval_intrinsic(s.corpus, s.constructs[c], s.gold, s.gold_constructs[c], m, opts,
                          s.table ? &*s.table : nullptr);
}

int cmd_eval_intrinsic(Run& run, IntrinsicArgs& a) {
    auto methods = method_list(a.method);
    IntrinsicSetup s = setup_intrinsic(run, a, methods);
    std::vector<EvalReport> reports;
    for (std::size_t c = 0; c < s.constructs.size(); ++c)
        for (const auto& m : methods) {
            reports.push_back(run_intrinsic(run, a, s, m, c));
            *run.out << eval_report_text(reports.back());
        }
    if (!a.out.empty()) {
        run.stage = "write report";
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw Error("cannot write '" + a.out + "'");
        f << eval_report_tsv_header() << '\n';
        for (const auto& r : reports) f << eval_report_tsv_row(r) << '\n';
        write_sidecar(a.out, Json{{"run", run.block()}});
    }
    return kExitOk;
}

struct ExtrinsicArgs {
    std::string lexicon;
    std::string construct;
    std::string users, traits, trait = "empathy";
    std::string out;
};

std::vector<UserCorpus> load_user_data(Run& run, const std::string& users, const std::string& traits,
                                       const std::string& trait) {
    run.add_input("users", users);
    run.add_input("traits", traits);
    run.stage = "load users";
    return load_users(users, traits, trait);
}

int cmd_eval_extrinsic(Run& run, ExtrinsicArgs& a) {
    run.add_input("lexicon", a.lexicon);
    run.stage = "load lexicon";
    Lexicon lex = read_lexicon(a.lexicon);
    std::string construct = a.construct.empty() ? lex.constructs().front() : a.construct;
    lex.construct_index(construct);
    auto users = load_user_data(run, a.users, a.traits, a.trait);
    run.stage = "extrinsic evaluation";
    ExtrinsicResult r = eval_extrinsic(lex, construct, users);
    char buf[160];
    std::snprintf(buf, sizeof buf, "[extrinsic / %s -> %s]\n  users = %zu  excluded = %zu  r = %.4f\n", construct.c_str(),
                  a.trait.c_str(), r.user_scores.size(), r.excluded_users.size(), r.r);
    *run.out << buf;
    if (!a.out.empty()) {
        run.stage = "write report";
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw Error("cannot write '" + a.out + "'");
        write_dsv_row(f, {"user_id", "lexicon_score", "trait_score"}, '\t');
        for (const auto& u : users) {
            auto it = r.user_scores.find(u.user_id);
            if (it == r.user_scores.end()) continue;
            write_dsv_row(f, {u.user_id, format_double(it->second), format_double(u.trait_score)}, '\t');
        }
        Json prov{{"run", run.block()}, {"r", r.r}, {"excluded_users", r.excluded_users}};
        write_sidecar(a.out, prov);
    }
    return kExitOk;
}

struct CompareArgs {
    IntrinsicArgs intr;
    std::string methods = "all";
    // Extrinsic column: lexica induced on this corpus, scored on users.
    CorpusFlags extr_corpus;
    std::string extr_construct = "empathy";
    std::string users, traits, trait = "empathy";
};

std::string display_name(MethodKind k) {
    switch (k) {
        case MethodKind::mean_binary: return "Mean Binary Rating";
        case MethodKind::regression_weights: return "Regression Weights";
        case MethodKind::mean_star: return "Mean Star Rating";
        case MethodKind::mlffn: return "MLFFN";
    }
    return "?";
}

std::string short_r(double r) {
    if (std::isnan(r)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r);
    std::string s = buf;
    if (s.rfind("0.", 0) == 0) s.erase(0, 1);
    else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
    return s;
}

int cmd_eval_compare(Run& run, CompareArgs& a) {
    auto methods = method_list(a.methods);
    const bool extrinsic = !a.users.empty() || !a.traits.empty() || !a.extr_corpus.path.empty();
    if (extrinsic && (a.users.empty() || a.traits.empty() || a.extr_corpus.path.empty()))
        throw UsageError("the extrinsic column needs --extr-corpus, --users and --traits");
    IntrinsicSetup s = setup_intrinsic(run, a.intr, methods);

    std::optional<Corpus> extr_corpus;
    std::optional<EmbeddingTable> extr_table;
    std::vector<UserCorpus> users;
    if (extrinsic) {
        extr_corpus = load_corpus_for(run, a.extr_corpus, {a.extr_construct}, "extr_corpus");
        users = load_user_data(run, a.users, a.traits, a.trait);
        if (needs_embeddings(methods)) extr_table = load_table(run, a.intr.embeddings, corpus_words(*extr_corpus));
    }

    std::vector<std::vector<EvalReport>> intr(methods.size());
    std::vector<double> extr(methods.size(), std::nan(""));
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        for (std::size_t c = 0; c < s.constructs.size(); ++c) intr[mi].push_back(run_intrinsic(run, a.intr, s, methods[mi], c));
        if (extrinsic) {
            MethodSpec m = make_method(methods[mi], a.intr.mflags, run.seed);
            Lexicon lex = induce_lexicon(run, m, *extr_corpus, {a.extr_construct}, extr_table ? &*extr_table : nullptr, false);
            run.stage = "extrinsic " + m.name();
            extr[mi] = eval_extrinsic(lex, a.extr_construct, users).r;
        }
    }

    std::vector<std::string> header{"Method"};
    for (const auto& c : s.constructs) header.push_back(c);
    if (extrinsic) header.push_back("Extr.");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        std::vector<std::string> row{display_name(MethodSpec::parse(methods[mi]).kind)};
        for (const auto& r : intr[mi]) row.push_back(short_r(r.mean_r));
        if (extrinsic) row.push_back(short_r(extr[mi]));
        rows.push_back(row);
    }
    std::size_t name_w = header[0].size();
    for (const auto& r : rows) name_w = std::max(name_w, r[0].size());
    std::vector<std::size_t> col_w;
    for (std::size_t j = 1; j < header.size(); ++j) col_w.push_back(std::max<std::size_t>(header[j].size(), 4));
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    std::ostream& o = *run.out;
    o << pad("", name_w) << " | " << pad("Intr.", 0);
    std::size_t intr_w = 0;
    for (std::size_t j = 0; j < s.constructs.size(); ++j) intr_w += col_w[j] + 2;
    o << std::string(intr_w > 7 ? intr_w - 7 : 0, ' ');
    if (extrinsic) o << " | Extr.";
    o << '\n';
    o << pad(header[0], name_w) << " |";
    for (std::size_t j = 0; j < s.constructs.size(); ++j) o << "  " << pad(header[j + 1], col_w[j]);
    if (extrinsic) o << " | ";
    o << '\n';
    for (const auto& r : rows) {
        o << pad(r[0], name_w) << " |";
        for (std::size_t j = 0; j < s.constructs.size(); ++j) o << "  " << pad(r[j + 1], col_w[j]);
        if (extrinsic) o << " | " << r.back();
        o << '\n';
    }
    if (!a.intr.out.empty()) {
        run.stage = "write report";
        std::ofstream f(a.intr.out, std::ios::binary);
        if (!f) throw Error("cannot write '" + a.intr.out + "'");
        std::vector<std::string> h{"method"};
        for (const auto& c : s.constructs) h.push_back("intr_" + c);
        if (extrinsic) h.push_back("extr");
        write_dsv_row(f, h, '\t');
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            std::vector<std::string> row{MethodSpec::parse(methods[mi]).name()};
            for (const auto& r : intr[mi]) row.push_back(format_double(r.mean_r));
            if (extrinsic) row.push_back(format_double(extr[mi]));
            write_dsv_row(f, row, '\t');
        }
        write_sidecar(a.intr.out, Json{{"run", run.block()}});
    }
    return kExitOk;
}

// ---- cluster ---------------------------------------------------------------

struct ClusterArgs {
    std::string lexicon, construct, embeddings, out;
    std::size_t k = 50;
    std::size_t knn = 20;
    double rho = 0.0;
    bool no_clip = false;
    std::string laplacian = "unnormalized";
    std::size_t restarts = 10;
    std::size_t top = 10;
    std::size_t preview = 3;
};

int cmd_cluster(Run& run, ClusterArgs& a) {
    if (a.k < 2) throw UsageError("--k must be at least 2");
    run.add_input("lexicon", a.lexicon);
    run.stage = "load lexicon";
    Lexicon lex = read_lexicon(a.lexicon);
    std::string construct = a.construct.empty() ? lex.constructs().front() : a.construct;
    lex.construct_index(construct);
    if (a.k > lex.size())
        throw UsageError("--k " + std::to_string(a.k) + " exceeds the lexicon's " + std::to_string(lex.size()) + " words");
    WordSet words;
    for (const auto& [w, v] : lex.entries()) words.insert(w);
    EmbeddingTable table = load_table(run, a.embeddings, words);

    ClusterOptions opts;
    opts.k = a.k;
    opts.graph.knn = a.knn;
    if (a.rho != 0.0) opts.graph.rho = a.rho;
    opts.graph.clip_cosine = !a.no_clip;
    opts.laplacian = a.laplacian == "symmetric" ? LaplacianKind::symmetric : LaplacianKind::unnormalized;
    opts.seed = run.seed;
    opts.restarts = a.restarts;
    run.stage = "cluster";
    ClusterResult res = cluster_lexicon(lex, construct, table, opts);

    run.stage = "write clusters";
    write_clusters(a.out, res);
    Json dropped = Json::array();
    for (const auto& d : res.dropped) dropped.push_back(Json{{"word", d.word}, {"reason", d.reason}});
    Json prov{{"run", run.block()},
              {"construct", construct},
              {"k", a.k},
              {"knn", a.knn},
              {"rho", res.rho},
              {"edge_weight", opts.graph.clip_cosine ? "max(cos,0)*(1-|r_i-r_j|/rho)" : "cos*(1-|r_i-r_j|/rho)"},
              {"laplacian", a.laplacian},
              {"restarts", a.restarts},
              {"edges", res.edges},
              {"negative_edges", res.negative_edges},
              {"lambda_min", res.lambda_min},
              {"dropped", dropped}};
    write_sidecar(a.out, prov);

    std::ostream& o = *run.out;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu words in %zu clusters (%zu dropped), %zu edges (%zu negative), lambda_min = %.3g\n",
                  res.words.size(), res.k, res.dropped.size(), res.edges, res.negative_edges, res.lambda_min);
    o << buf;
    auto order = clusters_by_mean(res);
    auto show = [&](std::size_t id) {
        const auto& c = res.clusters[id];
        std::snprintf(buf, sizeof buf, "  cluster %zu (n=%zu, mean %s = %.3f): ", id, c.words.size(), construct.c_str(),
                      c.mean_rating);
        o << buf;
        for (std::size_t i = 0; i < std::min(a.top, c.words.size()); ++i) o << (i ? ", " : "") << c.words[i];
        if (c.words.size() > a.top) o << ", ...";
        o << '\n';
    };
    const std::size_t np = std::min(a.preview, order.size());
    o << "highest-mean clusters:\n";
    for (std::size_t i = 0; i < np; ++i) show(order[i]);
    o << "lowest-mean clusters:\n";
    for (std::size_t i = 0; i < np; ++i) show(order[order.size() - 1 - i]);
    o << "wrote " << a.out << '\n';
    return kExitOk;
}

// ---- describe --------------------------------------------------------------

struct DescribeArgs {
    std::string lexicon;
    std::size_t bins = 20;
    std::string plot_data;
};

int cmd_describe(Run& run, DescribeArgs& a) {
    if (a.bins == 0) throw UsageError("--bins must be positive");
    run.add_input("lexicon", a.lexicon);
    run.stage = "load lexicon";
    Lexicon lex = read_lexicon(a.lexicon);
    run.stage = "describe";
    std::ostream& o = *run.out;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu words, %zu construct(s)\n", lex.size(), lex.constructs().size());
    o << buf;
    std::vector<std::vector<std::string>> plot_rows;
    std::vector<std::vector<double>> columns;
    for (std::size_t c = 0; c < lex.constructs().size(); ++c) {
        auto col = lex.column(c);
        columns.push_back(col);
        const auto& name = lex.constructs()[c];
        if (col.empty()) {
            o << "[" << name << "] empty\n";
            continue;
        }
        auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double lo = *mn, hi = *mx;
        const double sd = col.size() > 1 ? stddev(col) : 0.0;
        std::snprintf(buf, sizeof buf, "[%s] count %zu  min %.4f  max %.4f  mean %.4f  sd %.4f\n", name.c_str(), col.size(), lo,
                      hi, mean(col), sd);
        o << buf;
        std::vector<std::size_t> counts(a.bins, 0);
        for (double v : col) {
            std::size_t b = 0;
            if (hi > lo) b = std::min(a.bins - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(a.bins)));
            ++counts[b];
        }
        const std::size_t peak = *std::max_element(counts.begin(), counts.end());
        const double width = (hi - lo) / static_cast<double>(a.bins);
        for (std::size_t b = 0; b < a.bins; ++b) {
            const double bl = lo + width * static_cast<double>(b);
            const double bh = b + 1 == a.bins ? hi : lo + width * static_cast<double>(b + 1);
            const std::size_t bar = peak ? (counts[b] * 50 + peak - 1) / peak : 0;
            std::snprintf(buf, sizeof buf, "  %9.4f .. %9.4f %7zu ", bl, bh, counts[b]);
            o << buf << std::string(bar, '#') << '\n';
            plot_rows.push_back({name, std::to_string(b), format_double(bl), format_double(bh), std::to_string(counts[b])});
        }
    }
    if (lex.constructs().size() > 1) {
        o << "pearson\n";
        std::snprintf(buf, sizeof buf, "  %12s", "");
        o << buf;
        for (const auto& n : lex.constructs()) {
            std::snprintf(buf, sizeof buf, " %12s", n.c_str());
            o << buf;
        }
        o << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  %12s", lex.constructs()[i].c_str());
            o << buf;
            for (std::size_t j = 0; j < columns.size(); ++j) {
                std::string cell;
                try {
                    std::snprintf(buf, sizeof buf, "%.4f", pearson(columns[i], columns[j]));
                    cell = buf;
                } catch (const UndefinedCorrelationError&) {
                    cell = "undefined";
                }
                std::snprintf(buf, sizeof buf, " %12s", cell.c_str());
                o << buf;
            }
            o << '\n';
        }
    }
    if (!a.plot_data.empty()) {
        run.stage = "write plot data";
        std::ofstream f(a.plot_data, std::ios::binary);
        if (!f) throw Error("cannot write '" + a.plot_data + "'");
        write_dsv_row(f, {"construct", "bin", "lower", "upper", "count"}, '\t');
        for (const auto& r : plot_rows) write_dsv_row(f, r, '\t');
        write_sidecar(a.plot_data, Json{{"run", run.block()}});
    }
    return kExitOk;
}

// ---- rescale ---------------------------------------------------------------

struct RescaleArgs {
    std::string lexicon, range = "1:7", out;
};

int cmd_rescale(Run& run, RescaleArgs& a) {
    auto [lo, hi] = parse_range(a.range);
    run.add_input("lexicon", a.lexicon);
    run.stage = "load lexicon";
    Lexicon lex = read_lexicon(a.lexicon);
    run.stage = "rescale";
    std::vector<std::string> warnings;
    Lexicon scaled = rescale_log_minmax(lex, lo, hi, &warnings);
    for (const auto& w : warnings) *run.err << "lexind: warning: " << w << '\n';
    Json prov = scaled.provenance();
    Json source = prov.contains("run") ? prov["run"] : Json();
    prov["source_run"] = source;
    prov["run"] = run.block();
    scaled.provenance() = prov;
    run.stage = "write lexicon";
    write_lexicon(a.out, scaled);
    *run.out << "wrote " << scaled.size() << " words rescaled to [" << format_double(lo) << ", " << format_double(hi)
             << "] to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
        tokens.push_back("--" + key + "=" + value);
    }
    std::size_t at = 0;
    while (at < args.size() && !args[at].empty() && args[at][0] != '-') ++at;
    std::vector<std::string> merged(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(at));
    merged.insert(merged.end(), tokens.begin(), tokens.end());
    merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(at), args.end());
    return merged;
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Run run;
    run.out = &out;
    run.err = &err;

    CLI::App app{"lexind: learn word-level affect ratings from document-level labels"};
    app.name("lexind");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(kToolVersion));

    InduceArgs induce;
    auto* s_induce = app.add_subcommand("induce", "Learn a lexicon from a labelled corpus");
    add_common(s_induce, run);
    s_induce->add_option("--method", induce.method, "mean-star, mean-binary, regression-weights or mlffn")
        ->capture_default_str();
    add_corpus_options(s_induce, induce.corpus);
    s_induce->add_option("--construct", induce.construct, "Rating column to learn");
    s_induce->add_option("--constructs", induce.constructs, "Several rating columns, comma separated");
    s_induce->add_option("--embeddings", induce.embeddings, "Word vectors (text format), required for mlffn");
    s_induce->add_option("--rescale", induce.rescale, "Log min-max rescale into lo:hi");
    s_induce->add_flag("--joint", induce.joint, "mlffn: one network over all constructs");
    s_induce->add_option("--out", induce.out, "Lexicon TSV")->required();
    add_method_options(s_induce, induce.mflags);

    auto* s_eval = app.add_subcommand("eval", "Evaluate lexica");
    s_eval->require_subcommand(1);

    IntrinsicArgs intr;
    auto* s_intr = s_eval->add_subcommand("intrinsic", "Cross-validated correlation with gold word ratings");
    add_common(s_intr, run);
    s_intr->add_option("--method", intr.method, "Method, comma list or 'all'")->capture_default_str();
    add_corpus_options(s_intr, intr.corpus);
    s_intr->add_option("--construct", intr.construct);
    s_intr->add_option("--constructs", intr.constructs);
    s_intr->add_option("--gold", intr.gold.path, "Gold word ratings")->required();
    s_intr->add_option("--gold-word-column", intr.gold.word_column)->capture_default_str();
    s_intr->add_option("--gold-constructs", intr.gold.constructs, "Gold columns matching --constructs");
    s_intr->add_option("--embeddings", intr.embeddings);
    s_intr->add_option("--folds", intr.folds)->capture_default_str();
    s_intr->add_option("--min-overlap", intr.min_overlap)->capture_default_str();
    s_intr->add_flag("--rate-corpus-only", intr.rate_corpus_only, "mlffn: rate only training-fold words");
    s_intr->add_option("--out", intr.out, "Report TSV");
    add_method_options(s_intr, intr.mflags);

    ExtrinsicArgs extr;
    auto* s_extr = s_eval->add_subcommand("extrinsic", "Correlate lexicon user scores with a trait");
    add_common(s_extr, run);
    s_extr->add_option("--lexicon", extr.lexicon)->required();
    s_extr->add_option("--construct", extr.construct, "Lexicon column (default: first)");
    s_extr->add_option("--users", extr.users, "user_id,text or user_id,word,count")->required();
    s_extr->add_option("--traits", extr.traits, "user_id plus trait columns")->required();
    s_extr->add_option("--trait", extr.trait)->capture_default_str();
    s_extr->add_option("--out", extr.out, "Per-user scores TSV");

    CompareArgs cmp;
    auto* s_cmp = s_eval->add_subcommand("compare", "Method comparison table");
    add_common(s_cmp, run);
    s_cmp->add_option("--methods", cmp.methods, "Methods, comma list or 'all'")->capture_default_str();
    add_corpus_options(s_cmp, cmp.intr.corpus);
    s_cmp->add_option("--construct", cmp.intr.construct);
    s_cmp->add_option("--constructs", cmp.intr.constructs);
    s_cmp->add_option("--gold", cmp.intr.gold.path)->required();
    s_cmp->add_option("--gold-word-column", cmp.intr.gold.word_column)->capture_default_str();
    s_cmp->add_option("--gold-constructs", cmp.intr.gold.constructs);
    s_cmp->add_option("--embeddings", cmp.intr.embeddings);
    s_cmp->add_option("--folds", cmp.intr.folds)->capture_default_str();
    s_cmp->add_option("--min-overlap", cmp.intr.min_overlap)->capture_default_str();
    s_cmp->add_option("--extr-corpus", cmp.extr_corpus.path, "Corpus for the lexica scored extrinsically");
    s_cmp->add_option("--extr-text-column", cmp.extr_corpus.text_column)->capture_default_str();
    s_cmp->add_option("--extr-construct", cmp.extr_construct)->capture_default_str();
    s_cmp->add_option("--users", cmp.users);
    s_cmp->add_option("--traits", cmp.traits);
    s_cmp->add_option("--trait", cmp.trait)->capture_default_str();
    s_cmp->add_option("--out", cmp.intr.out, "Table as TSV");
    add_method_options(s_cmp, cmp.intr.mflags);

    ClusterArgs cl;
    auto* s_cl = app.add_subcommand("cluster", "Signed spectral clustering of a lexicon");
    add_common(s_cl, run);
    s_cl->add_option("--lexicon", cl.lexicon)->required();
    s_cl->add_option("--construct", cl.construct, "Lexicon column (default: first)");
    s_cl->add_option("--embeddings", cl.embeddings)->required();
    s_cl->add_option("--k", cl.k, "Number of clusters")->capture_default_str();
    s_cl->add_option("--knn", cl.knn, "Neighbours per word")->capture_default_str();
    s_cl->add_option("--rho", cl.rho, "Rating gap where edges turn negative (default: half the range)");
    s_cl->add_flag("--no-clip", cl.no_clip, "Do not clip negative cosines at zero");
    s_cl->add_option("--laplacian", cl.laplacian)
        ->check(CLI::IsMember({"unnormalized", "symmetric"}))
        ->capture_default_str();
    s_cl->add_option("--restarts", cl.restarts, "k-means restarts")->capture_default_str();
    s_cl->add_option("--top", cl.top, "Words shown per previewed cluster")->capture_default_str();
    s_cl->add_option("--preview", cl.preview, "Clusters previewed at each end")->capture_default_str();
    s_cl->add_option("--out", cl.out, "Clusters TSV")->required();

    DescribeArgs desc;
    auto* s_desc = app.add_subcommand("describe", "Summary statistics of a lexicon");
    add_common(s_desc, run);
    s_desc->add_option("lexicon,--lexicon", desc.lexicon)->required();
    s_desc->add_option("--bins", desc.bins)->capture_default_str();
    s_desc->add_option("--plot-data", desc.plot_data, "Histogram bin counts as TSV");

    RescaleArgs resc;
    auto* s_resc = app.add_subcommand("rescale", "Log min-max rescale a lexicon");
    add_common(s_resc, run);
    s_resc->add_option("--lexicon", resc.lexicon)->required();
    s_resc->add_option("--range", resc.range)->capture_default_str();
    s_resc->add_option("--out", resc.out)->required();

    try {
        args = expand_config(args);
        run.argv = args;
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "lexind: usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App* sub = nullptr;
    for (auto* s : {s_induce, s_intr, s_extr, s_cmp, s_cl, s_desc, s_resc})
        if (s->parsed()) sub = s;
    run.command = sub->get_parent() == s_eval ? "eval " + sub->get_name() : sub->get_name();
    run.seed_given = sub->get_option("--seed")->count() > 0;

    try {
        run.stage = "setup";
        run.resolve_seed();
        if (sub == s_induce) return cmd_induce(run, induce);
        if (sub == s_intr) return cmd_eval_intrinsic(run, intr);
        if (sub == s_extr) return cmd_eval_extrinsic(run, extr);
        if (sub == s_cmp) return cmd_eval_compare(run, cmp);
        if (sub == s_cl) return cmd_cluster(run, cl);
        if (sub == s_desc) return cmd_describe(run, desc);
        return cmd_rescale(run, resc);
    } catch (const UsageError& e) {
        err << "lexind " << run.command << ": usage error (" << run.stage << "): " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "lexind " << run.command << ": error in stage '" << run.stage << "': " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace lexind::cli
