#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexind {

// Delimiter-separated tables with a header row. Fields may be quoted with
// '"' (RFC 4180 style: doubled quotes, embedded delimiters and newlines).
struct DsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source line of each row

    // Index of `name` in the header, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
    // Same, but throws SchemaError naming the column.
    std::size_t require_column(std::string_view name) const;
};

// ',' for .csv, '\t' for .tsv/.tab/.txt and anything else.
char delimiter_for(const std::filesystem::path& path);

DsvTable read_dsv(std::istream& in, char delimiter);
DsvTable read_dsv_file(const std::filesystem::path& path, std::optional<char> delimiter = std::nullopt);

// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string dsv_escape(std::string_view field, char delimiter);
void write_dsv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter);

// Locale-independent strict number parsing; the whole field must be consumed.
std::optional<double> parse_double(std::string_view text);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace lexind
