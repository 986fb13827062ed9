#pragma once

#include "deltalab/models.hpp"
#include "deltalab/solver1d.hpp"
#include "deltalab/solver2d.hpp"

#include <functional>
#include <span>
#include <vector>

namespace deltalab {

enum class DeltaVerdict { Finite, Divergent };

/// One-sided boundary derivative estimate at x = 0:
///   q_k = (u(eps_k, t) - u(0, t)) / eps_k
/// on a geometrically decreasing spacing ladder, combined by polynomial
/// extrapolation to eps = 0. The divergence verdict fires when the quotients
/// grow by more than the divergence ratio across the three finest
/// consecutive refinements (a resolution-aware stand-in for a divergent
/// liminf increment).
struct DeltaEstimate {
    double value = 0.0;       // NaN when divergent
    DeltaVerdict verdict = DeltaVerdict::Finite;
    std::vector<double> spacings;  // eps_k, coarse to fine
    std::vector<double> quotients; // matching one-sided quotients
    int extrapolation_order = 0;
    /// |E_k - E_{k-1}| between the last two extrapolation stages.
    double residual = 0.0;

    bool divergent() const { return verdict == DeltaVerdict::Divergent; }
};

struct DeltaOptions {
    /// Probe window: spacings are grid nodes <= x_probe (default xmax/100).
    double x_probe = 0.0;
    std::size_t levels = 6;        // spacing ladder length (>= 4)
    double divergence_ratio = 1.5; // growth factor per refinement
    double divergence_floor = 1e-6; // |q| must exceed this to be called divergent
};

/// Extraction from sampled values on a graded grid. Spacings are the nodes at
/// dyadic indices jmax, jmax/2, ..., so consecutive ratios are uniform.
/// Throws std::invalid_argument when fewer than 4 positive nodes lie inside
/// the probe window (insufficient resolution is reported, never silently
/// extrapolated over).
DeltaEstimate boundary_delta_values(std::span<const double> x, std::span<const double> u,
                                    const DeltaOptions& options = {});

/// Extraction from a stored 1D solution at time t.
DeltaEstimate boundary_delta(const Solution1D& sol, double t, const DeltaOptions& options = {});

/// Extraction from a closed-form evaluator x -> u(x) (solver bypass, used to
/// isolate extraction error from discretization error). Spacings are
/// eps0 4^{-k}.
DeltaEstimate boundary_delta(const std::function<double(double)>& u_of_x, double eps0,
                             const DeltaOptions& options = {});

/// d/dx1 at (0, x2, t) and d/dx2 at (x1, 0, t) from a stored 2D solution.
DeltaEstimate boundary_delta_x1(const Solution2D& sol, double x2, double t,
                                const DeltaOptions& options = {});
DeltaEstimate boundary_delta_x2(const Solution2D& sol, double x1, double t,
                                const DeltaOptions& options = {});

/// Grid/time/scheme bundle for the driver-level operations below.
struct SolverSetup {
    double xmax = 20.0;
    std::size_t m = 801;
    double grading = 2.0;
    std::vector<double> snap;
    std::size_t steps = 1000;
    double theta = 1.0;
    FarField far_field = FarField::SecondDerivativeZero;
    std::size_t startup_implicit_steps = 2;
};

Solution1D run_solve(const DiffusionModel& model, const Payoff& payoff, double horizon,
                     const SolverSetup& setup);

struct SweepRow {
    double beta;
    DeltaEstimate delta;
};

/// Boundary delta of the CEV family across degeneracy exponents. Rows solve
/// independently (in parallel) and are returned in input order.
std::vector<SweepRow> hopf_sweep(std::span<const double> betas, double sigma,
                                 const Payoff& payoff, double t, const SolverSetup& setup);

struct GprimeRow {
    double t;
    double delta;
    double abs_error;
    bool pass;
};

struct GprimeReport {
    double gprime0 = 0.0;
    double tolerance = 0.0;
    std::vector<GprimeRow> rows;
    bool all_pass() const;
};

/// For models with a(x,t) <= C x^2 the boundary delta must equal g'(0) at
/// every time. Refuses models that violate the sampled quadratic bound and
/// payoffs without a declared g'(0+).
GprimeReport check_gprime_match(const DiffusionModel& model, double quadratic_bound_C,
                                const Payoff& payoff, std::span<const double> times,
                                const SolverSetup& setup, double tolerance);

struct DeltaCurve {
    std::vector<double> times;
    std::vector<DeltaEstimate> deltas;
    /// max over consecutive pairs of (delta_k - delta_{k+1})^+, finite entries.
    double max_monotonicity_violation = 0.0;
    /// k such that the increment from t_k to t_{k+1} exceeds the local
    /// resolution scale (candidate discontinuities; upward jumps only is the
    /// upper-semicontinuity signature).
    std::vector<std::size_t> jump_candidates;
};

/// Curve statistics from precomputed estimates.
DeltaCurve analyze_delta_curve(std::vector<double> times, std::vector<DeltaEstimate> deltas);

/// Boundary delta as a function of time from one stored solution.
DeltaCurve boundary_delta_in_time(const Solution1D& sol, std::span<const double> times,
                                  const DeltaOptions& options = {});

} // namespace deltalab
