#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace faithbench {

// Formats a double so that parsing the text recovers the exact same bits.
std::string format_double(double value);

// Stable 64-bit FNV-1a content hash, hex-encoded. Used for dataset hashes and
// config fingerprints.
class Fnv1a {
  public:
    void update(const void* data, size_t len);
    void update(const std::string& s) { update(s.data(), s.size()); }
    void update(double v);
    void update(uint64_t v);
    std::string hex() const;

  private:
    uint64_t state_ = 0xcbf29ce484222325ULL;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace faithbench
