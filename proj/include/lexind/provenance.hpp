#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace lexind {

inline constexpr std::string_view kToolVersion = "0.3.0";

using Json = nlohmann::ordered_json;

// 64-bit FNV-1a. Used for input fingerprints, not for security.
class Fingerprint {
public:
    void update(std::string_view bytes) noexcept;
    void update(double value) noexcept;
    std::uint64_t value() const noexcept { return hash_; }
    std::string hex() const;

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string fingerprint_file(const std::filesystem::path& path);

// Writes `doc` pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

// "<output>.provenance.json"
std::filesystem::path provenance_path_for(const std::filesystem::path& output);

}  // namespace lexind
