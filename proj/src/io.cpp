#include "ebsc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ebsc/errors.hpp"

namespace ebsc::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
        throw NumericalError(ErrorCode::ShapeMismatch, "io.CsvWriter",
                             "row width differs from header");
    rows_.push_back(row);
}

std::string CsvWriter::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i)
        os << (i ? "," : "") << header_[i];
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return os.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f << str();
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f << j.dump(2) << "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for hashing");
    std::ostringstream os;
    os << f.rdbuf();
    return fnv1a_hex(os.str());
}

}  // namespace ebsc::io
