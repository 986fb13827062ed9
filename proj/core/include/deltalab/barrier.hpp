#pragma once

#include "deltalab/models.hpp"

#include <cstddef>
#include <utility>

namespace deltalab {

/// Parameters of the comparison function
///   v(x,t) = x1 + x1^{1+eps} - |t-t0|^N - sum_i |x_i - x_i'|^{2N}
/// used to certify the positive boundary delta under a11 >= C x1^beta.
/// Valid parameters satisfy beta + eps - 1 < (N-1)/N < 1.
struct BarrierParams {
    double beta = 1.0;
    double C = 1.0;       // coefficient lower-bound constant
    double epsilon = 0.25;
    double N = 2.0;
    double eta = 0.5;     // slab width 0 <= x1 <= eta
    int dim = 1;
    double t0 = 1.0;
    double x2prime = 1.0; // anchor coordinate for dim == 2

    bool rule_holds() const;
};

/// Smallest dyadic N in {1,2,4,...} and eps = min(1/4, (2-beta)/4) satisfying
/// the strict parameter rule. Rejects beta >= 2, where the rule is
/// unsatisfiable.
std::pair<double, double> choose_barrier_params(double beta); // (epsilon, N)

/// Barrier value and its x1-derivative (closed forms; dim == 1 drops the
/// shell term, pass r = |x2 - x2'|).
double barrier_value(const BarrierParams& p, double x1, double t, double r = 0.0);
double barrier_dx1(const BarrierParams& p, double x1);
/// L v at a sample point with the model's actual coefficients.
double barrier_operator(const DiffusionModel& model, const BarrierParams& p, double x1,
                        double t, double r = 0.0);

struct BarrierReport {
    bool pass = false;
    double min_residual = 0.0;
    std::size_t samples = 0;
    double eta_used = 0.0;
    double offending_x1 = 0.0, offending_t = 0.0, offending_r = 0.0;
    BarrierParams params;
};

/// Samples L v over D = {v >= 0, 0 <= x1 <= eta, t <= t0} on a tensor grid
/// (x1 graded toward 0, |x2-x2'| shells when dim == 2; membership tested
/// exactly) and reports the minimum. Halves eta (up to 8 times) until the
/// minimum clears -1e-12 or returns the failing certificate. Throws on an
/// invalid parameter rule or when the model violates a11 >= C x1^beta on
/// samples.
BarrierReport verify_barrier_degenhopf(const DiffusionModel& model, BarrierParams params,
                                       std::size_t density = 200);

/// Report for the supersolution v = eps x + C1 x^N + C2 t x^N that forces
/// u_x(0,t) = g'(0) when a <= C x^2.
struct SupersolutionReport {
    bool pass = false;
    bool domination_pass = false;    // g(x) <= eps x + C1 x^N on samples
    double domination_min = 0.0;
    double domination_worst_x = 0.0;
    bool residual_pass = false;      // v_t - a v_xx >= 0 for t <= t0, worst-case a = C x^2
    double residual_min = 0.0;
    double residual_worst_x = 0.0;
    double t0 = 0.0;                 // 1/(2C(N^2-N))
    bool c2_sufficient = false;      // C2 >= 2 C C1 N(N-1)
    double epsilon = 0.0, C1 = 0.0, C2 = 0.0, N = 0.0;
};

/// Requires N > 1 and a payoff normalized to g(0) = 0, g'(0) = 0 (subtract a
/// constant and a multiple of x first; affine claims solve exactly).
SupersolutionReport verify_supersolution_neghopf(double C, const Payoff& payoff,
                                                 double epsilon, double N, double C1,
                                                 double C2, double xmax = 50.0,
                                                 std::size_t density = 2000);

/// Grid search for the smallest C1 with g(x) <= eps x + C1 x^N on (0, xmax].
double find_domination_constant(const Payoff& payoff, double epsilon, double N, double xmax,
                                std::size_t density = 2000);

/// Residual checks for the two displayed sharpness systems solved by
/// u = x^2/2 (zero residual for every beta), plus the demonstration that the
/// drift and zeroth-order lower bounds fail for delta > 0 near x = 0.
struct SharpnessReport {
    double max_residual_system1 = 0.0; // u_t = x^beta u_xx - x^{beta-1} u_x
    double max_residual_system2 = 0.0; // u_t = x^beta u_xx - 2 x^{beta-2} u
    double boundary_delta = 0.0;       // u_x(0, t) of x^2/2, exactly 0
    bool drift_bound_fails = false;
    bool zeroth_bound_fails = false;
    BoundCheck drift_witness;
    BoundCheck zeroth_witness;
};

SharpnessReport sharpness_residuals();

} // namespace deltalab
