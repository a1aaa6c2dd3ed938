#include <filesystem>
#include <fstream>

#include "lexind/dsv.hpp"
#include "lexind/error.hpp"
#include "lexind/induction.hpp"

namespace lexind {

void write_lexicon(const std::filesystem::path& path, const Lexicon& lexicon, bool with_provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    std::vector<std::string> row{"word"};
    row.insert(row.end(), lexicon.constructs().begin(), lexicon.constructs().end());
    write_dsv_row(out, row, '\t');
    for (const auto& [word, values] : lexicon.entries()) {
        row.assign(1, word);
        for (double v : values) row.push_back(format_double(v));
        write_dsv_row(out, row, '\t');
    }
    out.close();
    if (!out) throw Error("failed writing '" + path.string() + "'");
    if (with_provenance) write_json_file(provenance_path_for(path), lexicon.provenance());
}

Lexicon read_lexicon(const std::filesystem::path& path) {
    DsvTable table = read_dsv_file(path, '\t');
    if (table.header.size() < 2) throw SchemaError(path.string() + ": lexicon needs a word column and >= 1 construct");
    std::vector<std::string> constructs(table.header.begin() + 1, table.header.end());
    std::map<std::string, std::vector<double>> entries;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::vector<double> values;
        for (std::size_t c = 1; c < row.size(); ++c) {
            auto v = parse_double(row[c]);
            if (!v || !std::isfinite(*v)) throw RowError(table.row_lines[r], "bad rating '" + row[c] + "'");
            values.push_back(*v);
        }
        entries.insert_or_assign(row[0], std::move(values));
    }
    if (entries.empty()) throw EmptyInputError(path.string() + ": lexicon has no entries");
    Json prov;
    auto side = provenance_path_for(path);
    if (std::filesystem::exists(side)) prov = read_json_file(side);
    return Lexicon(std::move(constructs), std::move(entries), std::move(prov));
}

}  // namespace lexind
