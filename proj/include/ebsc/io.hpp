#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ebsc::io {

// Fixed 17-significant-digit formatting so repeated runs are byte-identical.
std::string format_double(double x);

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    void write(const std::filesystem::path& path) const;
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// FNV-1a 64-bit content hash, hex-encoded; used by the run manifest.
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::filesystem::path& path);

}  // namespace ebsc::io
