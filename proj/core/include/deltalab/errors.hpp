#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deltalab {

/// Numerical failure inside a time-stepping solve (singular system,
/// non-finite values). Carries the time level and node where it was detected.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double time, std::size_t node)
        : std::runtime_error(what), time_(time), node_(node) {}

    double time() const noexcept { return time_; }
    std::size_t node() const noexcept { return node_; }

private:
    double time_;
    std::size_t node_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace deltalab
