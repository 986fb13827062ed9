#include "deltalab/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace deltalab::csv {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(std::size_t v) { return std::to_string(v); }

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Writer::Writer(const std::filesystem::path& path, const std::string& metadata,
               const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path.string());
    out_ << "# " << metadata << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
    out_ << "\n";
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::runtime_error("csv: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    out_ << "\n";
}

void Writer::close() { out_.close(); }

} // namespace deltalab::csv
