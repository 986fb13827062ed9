#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace deltalab::csv {

/// Round-trip formatting for doubles (%.17g); identical inputs give
/// identical bytes, which is what makes report files rerun-stable.
std::string fmt(double v);
std::string fmt(std::size_t v);

/// FNV-1a 64-bit digest, used to stamp reports with their config.
std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t v);

/// CSV report with one leading metadata comment line:
///   # deltalab=<version> seed=<seed> config=<digest>
/// then a header row and data rows.
class Writer {
public:
    Writer(const std::filesystem::path& path, const std::string& metadata,
           const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

} // namespace deltalab::csv
