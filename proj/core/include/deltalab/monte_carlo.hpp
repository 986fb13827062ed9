#pragma once

#include "deltalab/models.hpp"

#include <cstdint>
#include <vector>

namespace deltalab {

/// Path budget and deterministic seeding. Each batch of paths derives its
/// own generator state from (seed, batch index), so serial and parallel
/// executions and reruns produce bit-identical estimates.
struct PathConfig {
    std::size_t n_paths = 1'000'000;
    std::size_t n_steps = 2048;
    std::uint64_t seed = 0;
    double horizon = 1.0;
    std::size_t batch_size = 65536;
};

struct TerminalSamples {
    std::vector<double> x;
    double x0 = 0.0;
    double absorbed_fraction = 0.0; // share of paths sitting exactly at 0
};

struct TerminalSamples2 {
    std::vector<double> x1, x2;
};

struct PriceEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(n)
    std::size_t n_paths = 0;
    double absorbed_fraction = 0.0;
};

/// Exact driftless GBM terminal draw X(T) = x0 exp(-sigma^2 T/2 + sigma sqrt(T) Z).
/// x0 = 0 yields the absorbed state identically.
TerminalSamples simulate_gbm_exact(double x0, double sigma, double T, const PathConfig& config);

/// Full-truncation Euler for dX = sigma X^{beta/2} dW with hard absorption:
/// a path that reaches X <= 0 is set to 0 and stays there. beta = 2 is routed
/// to the exact GBM sampler.
TerminalSamples simulate_cev_euler_absorbed(double x0, double sigma, double beta, double T,
                                            const PathConfig& config);

/// Two independent drivers; used for the exchange-claim cross-checks.
TerminalSamples2 simulate_two_gbm_exact(double x01, double sigma1, double x02, double sigma2,
                                        double T, const PathConfig& config);
TerminalSamples2 simulate_two_cev_euler(double x01, double sigma1, double beta1, double x02,
                                        double sigma2, double beta2, double T,
                                        const PathConfig& config);

/// Sample mean of g over the terminal draws, with standard error.
/// Throws SolverError-free: non-finite payoff evaluations raise
/// std::runtime_error.
PriceEstimate mc_price(const Payoff& payoff, const TerminalSamples& samples);
PriceEstimate mc_price(const Payoff& payoff, const TerminalSamples2& samples);

} // namespace deltalab
