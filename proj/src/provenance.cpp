#include "lexind/provenance.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "lexind/error.hpp"

namespace lexind {

void Fingerprint::update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
        hash_ ^= c;
        hash_ *= 0x100000001b3ULL;
    }
}

void Fingerprint::update(double value) noexcept {
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) {
        hash_ ^= (bits >> (8 * i)) & 0xffU;
        hash_ *= 0x100000001b3ULL;
    }
}

std::string Fingerprint::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
}

std::string fingerprint_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    Fingerprint fp;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        fp.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
    }
    return "fnv1a64:" + fp.hex();
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::filesystem::path provenance_path_for(const std::filesystem::path& output) {
    return std::filesystem::path(output.string() + ".provenance.json");
}

}  // namespace lexind
