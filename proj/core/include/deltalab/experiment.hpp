#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace deltalab {

inline constexpr const char* kVersion = "0.1.0";

/// Parsed experiment description. The common blocks are typed; kind-specific
/// knobs stay in the raw document and are read by the matching runner.
/// Supported kinds: price, delta, sweep, gprime-check, margrabe,
/// counterexample, barrier, sharpness, mc-crosscheck, refine, properties.
struct ExperimentConfig {
    std::string name;
    std::string kind;
    std::uint64_t seed = 0;
    std::string output; // csv file name (kind-specific default otherwise)

    struct Model {
        std::string kind = "cev"; // cev | gbm | custom-table
        double sigma = 1.0;
        double beta = 1.0;
        std::vector<double> table_x, table_alpha;
    } model;

    struct PayoffSpec {
        std::string kind = "call";
        double strike = 1.0;
        double gamma = 1.0;
        double slope = 1.0;
        double intercept = 0.0;
    } payoff;

    struct Grid {
        double xmax = 20.0;
        std::size_t m = 801;
        double p = 2.0;
        std::vector<double> snap;
    } grid;

    struct Time {
        double horizon = 1.0;
        std::size_t steps = 1000;
        double theta = 1.0;
    } time;

    /// Canonical serialized form (digested into report metadata).
    std::string canonical;
    /// Raw JSON document, owned; kind-specific sections are read lazily.
    std::shared_ptr<const void> doc;
};

/// Loads and validates a config file. Throws ConfigError with a
/// human-readable message on malformed input (CLI exit status 2).
ExperimentConfig parse_config(const std::filesystem::path& file);
ExperimentConfig parse_config_text(const std::string& text, const std::string& name);

struct AssertionResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct RunResult {
    std::string name;
    std::string kind;
    /// 0 = all assertions pass, 1 = assertion failure, 3 = numerical failure.
    /// (Config errors surface as ConfigError before a result exists: status 2.)
    int status = 0;
    std::vector<AssertionResult> assertions;
    std::vector<std::string> output_files;
    std::string message;

    bool passed() const { return status == 0; }
};

/// Executes the experiment, writing CSV reports under out_dir. Numerical
/// failures (solver aborts) are caught and reported as status 3.
RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// One-line-per-experiment CSV index (name, kind, status, pass counts, detail).
/// An empty report list yields a header-only index.
void emit_summary(std::span<const RunResult> results, std::ostream& out);

} // namespace deltalab
