#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deltalab {

/// Evaluable coefficient of one coordinate: (price, time) -> value.
/// Must be pure; models are immutable after construction and coefficient
/// evaluation is safe from any number of concurrent workers.
using CoefFn = std::function<double(double x, double t)>;

/// Parametric constant-elasticity-of-variance volatility alpha = sigma x^{beta/2}.
/// alpha(0,t) = 0 by definition (the process is absorbed at zero); for beta = 0
/// this makes alpha discontinuous at the boundary, which the model class allows.
struct CevSpec {
    double sigma = 1.0;
    double beta = 1.0;

    double alpha(double x, double t) const;
    /// a = alpha^2/2 = sigma^2 x^beta / 2; equals the lower bound C x^beta with
    /// C = sigma^2/2 exactly.
    double a(double x, double t) const;
};

/// Diffusion with one volatility function per coordinate (diagonal in 2D).
/// The instantaneous covariance is a_ii = alpha_i^2 / 2, a_ij = 0 for i != j.
struct DiffusionModel {
    int dim = 1;
    std::vector<CoefFn> alpha;              // size dim
    double growth_constant = 1.0;           // C in |alpha_i(x,t)| <= C(1+x)
    std::vector<std::optional<CevSpec>> cev; // set per coordinate when parametric
    std::string name;

    double alpha_at(int i, double x, double t) const;
    /// Diagonal diffusion coefficient a_ii(x_i, t).
    double a(int i, double x, double t) const;
    /// 1D shorthand.
    double a1(double x, double t) const { return a(0, x, t); }
};

/// 1D CEV model dX = sigma X^{beta/2} dW absorbed at zero.
/// Requires sigma > 0 and beta in [0,2].
DiffusionModel make_cev(double sigma, double beta);

/// Geometric Brownian motion, the beta = 2 CEV case.
DiffusionModel make_gbm(double sigma);

/// Two independent CEV coordinates (diagonal 2D model).
DiffusionModel make_cev_2d(double sigma1, double beta1, double sigma2, double beta2);

/// Time-independent volatility given by linear interpolation of (x, alpha)
/// pairs; constant beyond the last knot. Requires xs[0] = 0, alphas[0] = 0.
DiffusionModel make_table_model(std::vector<double> xs, std::vector<double> alphas);

/// Model with arbitrary coefficient functions (used for the patched example
/// and tests). Caller asserts the growth constant.
DiffusionModel make_custom_model(CoefFn alpha, double growth_constant,
                                 std::string name = "custom");

/// Contract function g on [0,inf)^n with metadata used by the analysis layer.
/// gprime0 is stored, never computed: differentiating g at 0 numerically would
/// presuppose the quantity the boundary study measures.
struct Payoff {
    int dim = 1;
    std::function<double(double)> g1;          // dim == 1
    std::function<double(double, double)> g2;  // dim == 2
    double growth_degree = 1.0;                // N in |g| <= M(1+|x|)^N
    bool is_convex = false;
    std::optional<double> gprime0;             // g'(0+), 1D only
    std::string name;

    double operator()(double x) const { return g1(x); }
    double operator()(double x1, double x2) const { return g2(x1, x2); }
};

struct PayoffParams {
    double strike = 1.0;    // K for call-style payoffs
    double gamma = 1.0;     // exponent for the power payoff
    double slope = 1.0;     // affine slope
    double intercept = 0.0; // affine intercept
};

/// Named payoffs:
///   "call"            (x-K)^+                     convex, g'(0+) = 0 for K > 0
///   "power"           x^gamma                     convex iff gamma >= 1
///   "affine"          intercept + slope x
///   "affine-plus-call" intercept + slope x + (x-K)^+
///   "exchange"        (x2-x1)^+                   2D
///   "max"             max(x1,x2)                  2D
/// Throws std::invalid_argument for unknown names or invalid parameters.
Payoff payoff_library(const std::string& name, const PayoffParams& params = {});

/// First-order and zeroth-order coefficients for the extended operator
/// a u_xx + b u_x + c u - u_t, with the declared power-law bounds
/// b >= -C x^{beta-1+delta}, c >= -C x^{beta-2+delta}.
struct LowerOrderTerms {
    CoefFn b;
    CoefFn c;
    double bound_constant = 1.0; // C
    double bound_delta = 0.0;    // delta
    double beta = 1.0;
};

/// Sample points for hypothesis validation: prices crossed with times.
struct SampleGrid {
    std::vector<double> xs;
    std::vector<double> ts;
};

/// Geometric price grid on [0, xmax] (with 0 prepended) crossed with {0, T/2, T}.
SampleGrid default_sample_grid(double xmax, double tmax, std::size_t nx = 25);

struct ConditionCheck {
    std::string condition;
    bool pass = true;
    double worst_value = 0.0; // most offending sampled value
    double worst_x = 0.0;
    double worst_t = 0.0;
};

struct HypothesisReport {
    std::vector<ConditionCheck> conditions;
    bool all_pass() const;
};

/// Checks the structural hypotheses on sampled points:
///   growth      |alpha_i(x,t)| <= C (1 + x)
///   absorption  alpha_i(0,t) == 0 exactly
///   rank        alpha_i(x,t) != 0 whenever x > 0 (diagonal rank condition)
/// Failures are report entries, never exceptions. Continuity/regularity in
/// the coefficients is taken on trust from the parametric form.
HypothesisReport validate_hypothesis(const DiffusionModel& model, const SampleGrid& grid);

struct BoundCheck {
    bool holds = true;
    double worst_gap = 0.0; // min over samples of (coefficient - declared bound)
    double worst_x = 0.0;
    double worst_t = 0.0;
};

/// b(x,t) >= -C x^{beta-1+delta} on samples with x > 0.
BoundCheck check_drift_lower_bound(const LowerOrderTerms& lot, const SampleGrid& grid);
/// c(x,t) >= -C x^{beta-2+delta} on samples with x > 0.
BoundCheck check_zeroth_lower_bound(const LowerOrderTerms& lot, const SampleGrid& grid);

} // namespace deltalab
