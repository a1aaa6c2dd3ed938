#include "lexind/dsv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lexind/error.hpp"

namespace lexind {

std::optional<std::size_t> DsvTable::column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

std::size_t DsvTable::require_column(std::string_view name) const {
    if (auto idx = column(name)) return *idx;
    std::string known;
    for (const auto& h : header) {
        if (!known.empty()) known += ", ";
        known += h;
    }
    throw SchemaError("missing column '" + std::string(name) + "' (header has: " + known + ")");
}

char delimiter_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? ',' : '\t';
}

namespace {

// Reads one logical record; returns false at end of input. `line` is advanced
// by the number of physical lines consumed.
bool read_record(std::istream& in, char delim, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (!any) return false;
    if (in_quotes) throw RowError(line, "unterminated quoted field");
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    ++line;
    return true;
}

bool blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields[0].find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

DsvTable read_dsv(std::istream& in, char delimiter) {
    DsvTable table;
    std::vector<std::string> fields;
    std::size_t line = 0;
    // Skip a UTF-8 byte-order mark.
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (!(bom[0] == '\xEF' && bom[1] == '\xBB' && bom[2] == '\xBF')) {
            throw FormatError("unrecognised leading bytes");
        }
    }
    if (!read_record(in, delimiter, fields, line)) throw EmptyInputError("file is empty (no header row)");
    table.header = fields;
    std::size_t start = line;
    while (read_record(in, delimiter, fields, line)) {
        if (blank(fields)) {
            start = line;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw RowError(start + 1, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        }
        table.rows.push_back(fields);
        table.row_lines.push_back(start + 1);
        start = line;
    }
    return table;
}

DsvTable read_dsv_file(const std::filesystem::path& path, std::optional<char> delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return read_dsv(in, delimiter.value_or(delimiter_for(path)));
}

std::string dsv_escape(std::string_view field, char delimiter) {
    bool needs = field.find(delimiter) != std::string_view::npos || field.find('"') != std::string_view::npos ||
                 field.find('\n') != std::string_view::npos || field.find('\r') != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_dsv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(delimiter);
        out << dsv_escape(fields[i], delimiter);
    }
    out.put('\n');
}

std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, ptr);
}

}  // namespace lexind
