#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lexind/error.hpp"
#include "lexind/neural.hpp"

namespace lexind {

namespace {

constexpr const char* kMagic = "lexind-mlffn-checkpoint";
constexpr int kVersion = 1;

void write_values(std::ostream& out, const char* tag, std::span<const double> values) {
    out << tag;
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, " %a", v);
        out << buf;
    }
    out << '\n';
}

std::vector<double> read_values(std::istream& in, const char* tag, std::size_t count) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("checkpoint: truncated before '" + std::string(tag) + "'");
    std::istringstream ss(line);
    std::string got;
    ss >> got;
    if (got != tag) throw FormatError("checkpoint: expected '" + std::string(tag) + "', found '" + got + "'");
    std::vector<double> out;
    out.reserve(count);
    std::string tok;
    while (ss >> tok) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw FormatError("checkpoint: bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.size() != count)
        throw FormatError("checkpoint: '" + std::string(tag) + "' holds " + std::to_string(out.size()) +
                          " values, expected " + std::to_string(count));
    return out;
}

}  // namespace

void save_model(const std::filesystem::path& path, const MlffnModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << kMagic << ' ' << kVersion << '\n';
    out << "config " << model.config().to_json().dump() << '\n';
    out << "layers " << model.layers().size() << '\n';
    for (const auto& layer : model.layers()) {
        out << "layer " << layer.weights.rows() << ' ' << layer.weights.cols() << '\n';
        write_values(out, "weights", layer.weights.data());
        write_values(out, "bias", layer.bias);
    }
    out << "end\n";
}

MlffnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line, word;
    std::getline(in, line);
    {
        std::istringstream ss(line);
        int version = 0;
        ss >> word >> version;
        if (word != kMagic) throw FormatError("checkpoint: not an mlffn checkpoint");
        if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
    std::getline(in, line);
    if (line.rfind("config ", 0) != 0) throw FormatError("checkpoint: missing config line");
    MlffnConfig config;
    try {
        config = MlffnConfig::from_json(Json::parse(line.substr(7)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint: config: ") + e.what());
    }
    std::size_t count = 0;
    std::getline(in, line);
    if (std::sscanf(line.c_str(), "layers %zu", &count) != 1) throw FormatError("checkpoint: missing layer count");
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < count; ++l) {
        std::size_t rows = 0, cols = 0;
        std::getline(in, line);
        if (std::sscanf(line.c_str(), "layer %zu %zu", &rows, &cols) != 2) throw FormatError("checkpoint: bad layer header");
        auto w = read_values(in, "weights", rows * cols);
        auto b = read_values(in, "bias", rows);
        layers.push_back({DenseMatrix(rows, cols, std::move(w)), std::move(b)});
    }
    std::getline(in, line);
    if (line != "end") throw FormatError("checkpoint: missing end marker");
    return MlffnModel(config, std::move(layers));
}

}  // namespace lexind
