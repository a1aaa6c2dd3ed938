#include "lexind/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "lexind/dsv.hpp"
#include "lexind/error.hpp"
#include "lexind/provenance.hpp"

namespace lexind {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

std::vector<double> parse_ratings(const std::vector<std::string>& row, const std::vector<std::size_t>& cols,
                                  const std::vector<std::string>& names, std::size_t line) {
    std::vector<double> out;
    out.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        auto v = parse_double(row[cols[c]]);
        if (!v) throw RowError(line, "cannot parse '" + row[cols[c]] + "' in column '" + names[c] + "' as a number");
        if (!std::isfinite(*v)) throw RowError(line, "non-finite value in column '" + names[c] + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

TokenList tokenize(std::string_view text) {
    TokenList tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) break;
        std::string_view raw = text.substr(start, i - start);
        std::size_t b = 0, e = raw.size();
        while (b < e && !is_word_byte(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && !is_word_byte(static_cast<unsigned char>(raw[e - 1]))) --e;
        std::string_view kept = b == e ? raw : raw.substr(b, e - b);
        std::string token(kept);
        for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        tokens.push_back(std::move(token));
    }
    return tokens;
}

Corpus::Corpus(std::vector<std::string> constructs, std::vector<Document> documents, std::size_t min_df)
    : constructs_(std::move(constructs)), documents_(std::move(documents)), min_df_(std::max<std::size_t>(min_df, 1)) {
    std::set<std::string> seen;
    for (const auto& c : constructs_) {
        if (!seen.insert(c).second) throw SchemaError("duplicate construct '" + c + "'");
    }
    std::map<std::string, std::vector<std::size_t>> index;
    for (std::size_t d = 0; d < documents_.size(); ++d) {
        const auto& doc = documents_[d];
        if (doc.tokens.empty()) throw EmptyInputError("document '" + doc.id + "' has no tokens");
        if (doc.ratings.size() != constructs_.size()) {
            throw SchemaError("document '" + doc.id + "' carries " + std::to_string(doc.ratings.size()) +
                              " ratings, expected " + std::to_string(constructs_.size()));
        }
        for (double r : doc.ratings) {
            if (!std::isfinite(r)) throw Error("document '" + doc.id + "' has a non-finite rating");
        }
        for (const auto& t : doc.tokens) {
            auto& postings = index[t];
            if (postings.empty() || postings.back() != d) postings.push_back(d);
        }
    }
    for (auto& [word, postings] : index) {
        if (postings.size() < min_df_) continue;
        vocab_.emplace(word, postings.size());
        index_.emplace(word, std::move(postings));
    }
}

std::size_t Corpus::construct_index(std::string_view construct) const {
    auto it = std::find(constructs_.begin(), constructs_.end(), construct);
    if (it == constructs_.end()) {
        throw SchemaError("unknown construct '" + std::string(construct) + "' (available: " + join_names(constructs_) +
                          ")");
    }
    return static_cast<std::size_t>(it - constructs_.begin());
}

std::vector<double> Corpus::labels(std::string_view construct) const {
    auto c = construct_index(construct);
    std::vector<double> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) out.push_back(d.ratings[c]);
    return out;
}

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
    std::vector<Document> docs;
    docs.reserve(indices.size());
    for (auto i : indices) docs.push_back(documents_.at(i));
    return Corpus(constructs_, std::move(docs), min_df_);
}

std::string Corpus::fingerprint() const {
    Fingerprint fp;
    for (const auto& c : constructs_) {
        fp.update(c);
        fp.update(std::string_view("\x1f", 1));
    }
    for (const auto& d : documents_) {
        fp.update(d.id);
        fp.update(std::string_view("\x1e", 1));
        for (const auto& t : d.tokens) {
            fp.update(t);
            fp.update(std::string_view(" ", 1));
        }
        for (double r : d.ratings) fp.update(r);
    }
    return "fnv1a64:" + fp.hex();
}

Corpus load_corpus(const std::filesystem::path& path, const std::string& text_column,
                   const std::vector<std::string>& rating_columns, const CorpusOptions& options) {
    if (rating_columns.empty()) throw SchemaError("at least one rating column is required");
    DsvTable table = read_dsv_file(path, options.delimiter);
    std::size_t text_col = table.require_column(text_column);
    std::vector<std::size_t> rating_cols;
    for (const auto& name : rating_columns) rating_cols.push_back(table.require_column(name));
    std::optional<std::size_t> id_col;
    if (options.id_column) id_col = table.require_column(*options.id_column);

    const Tokenizer& tok = options.tokenizer ? options.tokenizer : Tokenizer(tokenize);
    LoadReport report;
    std::vector<Document> docs;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ++report.rows_read;
        Document doc;
        doc.id = id_col ? row[*id_col] : std::to_string(r);
        doc.ratings = parse_ratings(row, rating_cols, rating_columns, table.row_lines[r]);
        doc.tokens = tok(row[text_col]);
        if (doc.tokens.empty()) {
            ++report.dropped_empty;
            report.dropped_ids.push_back(doc.id);
            continue;
        }
        docs.push_back(std::move(doc));
    }
    if (docs.empty()) throw EmptyInputError("corpus '" + path.string() + "' has no usable documents");
    Corpus corpus(rating_columns, std::move(docs), options.min_df);
    corpus.set_report(std::move(report));
    return corpus;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus, const std::string& text_column,
                  std::optional<char> delimiter) {
    char delim = delimiter.value_or(delimiter_for(path));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    std::vector<std::string> header{"id", text_column};
    header.insert(header.end(), corpus.constructs().begin(), corpus.constructs().end());
    write_dsv_row(out, header, delim);
    for (const auto& d : corpus.documents()) {
        std::string text;
        for (const auto& t : d.tokens) {
            if (!text.empty()) text.push_back(' ');
            text += t;
        }
        std::vector<std::string> row{d.id, text};
        for (double r : d.ratings) row.push_back(format_double(r));
        write_dsv_row(out, row, delim);
    }
}

std::size_t GoldWordLexicon::construct_index(std::string_view construct) const {
    auto it = std::find(constructs.begin(), constructs.end(), construct);
    if (it == constructs.end()) {
        throw SchemaError("unknown gold construct '" + std::string(construct) + "' (available: " +
                          join_names(constructs) + ")");
    }
    return static_cast<std::size_t>(it - constructs.begin());
}

GoldWordLexicon load_gold_lexicon(const std::filesystem::path& path, const std::string& word_column,
                                  const std::vector<std::string>& rating_columns, std::optional<char> delimiter) {
    if (rating_columns.empty()) throw SchemaError("at least one rating column is required");
    DsvTable table = read_dsv_file(path, delimiter);
    std::size_t word_col = table.require_column(word_column);
    std::vector<std::size_t> cols;
    for (const auto& name : rating_columns) cols.push_back(table.require_column(name));

    GoldWordLexicon gold;
    gold.constructs = rating_columns;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ++gold.report.rows_read;
        std::string word = row[word_col];
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (word.empty()) throw RowError(table.row_lines[r], "empty word");
        auto values = parse_ratings(row, cols, rating_columns, table.row_lines[r]);
        auto [it, inserted] = gold.ratings.insert_or_assign(word, std::move(values));
        if (!inserted) ++gold.report.duplicates;
    }
    if (gold.ratings.empty()) throw EmptyInputError("gold lexicon '" + path.string() + "' has no entries");
    return gold;
}

}  // namespace lexind
