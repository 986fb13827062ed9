#pragma once

#include "deltalab/boundary.hpp"
#include "deltalab/grid.hpp"
#include "deltalab/solver1d.hpp"

#include <string>
#include <vector>

namespace deltalab {

/// Smooth convex transition h with h(0) = 0, h'(0) = 0 and h'(y) = 1,
/// h''(y) = 0 for y >= y0. The slope is the standard bump-quotient switch
///   s(u) = B(u) / (B(u) + B(1-u)),  B(u) = exp(-1/u) for u > 0, else 0,
/// so h is C-infinity and h' increases monotonically from 0 to 1.
/// h itself is obtained by adaptive quadrature of the slope.
struct TransitionFn {
    double y0 = 1.0;

    double value(double y) const;
    double slope(double y) const;
    double curvature(double y) const;
    /// C = lim_{y->inf} (y h'(y) - h(y)) = y0 - h(y0).
    double shift_constant() const;

    /// Sampled checks of the defining properties; empty when all hold.
    std::vector<std::string> violations(std::size_t samples = 200) const;
};

/// The two-piece solution whose boundary delta jumps at t0:
///   v(x,t) = x^2 e^t + (t0-t) h(x/(t0-t))       for t < t0 (closed form)
///   w      = solution of w_t = (x^2 + C e^{-t0})/2 w_xx, w(0,.) = 0,
///            w(x,0) = x^2 e^{t0} + x             for t >= t0 (solved)
/// v_x(0,t) = 0 before the patch time while w_x(0,t) >= 1 after it.
struct PatchedExample {
    double t0 = 0.5;
    TransitionFn h;
    double shift_constant = 0.5; // C
    Solution1D w;                // time axis is t - t0
    std::vector<std::string> h_violations;

    double v(double x, double t) const;
    double v_x(double x, double t) const;
    /// Diffusion coefficient of the exact piece (t < t0).
    double coeff_before(double x, double t) const;
    /// Coefficient of the solved piece: (x^2 + C e^{-t0})/2. The paper-facing
    /// choice here is the one consistent with w_t(x,t0) = x^2 e^{t0} + C and
    /// w_xx(x,t0) = 2 e^{t0}.
    double coeff_after(double x) const;
    /// v_t - a~ v_xx from closed-form derivatives; identically 0 up to the
    /// quadrature accuracy of h.
    double v_residual(double x, double t) const;

    /// Boundary delta at time t: exact-piece evaluation for t < t0, solved
    /// piece for t >= t0 (the right limit, consistent with upper
    /// semicontinuity at the patch time).
    DeltaEstimate delta_at(double t) const;
};

/// Builds the example on the given grid: solves w on the time levels of
/// tgrid at and beyond t0 (tgrid must straddle t0). Throws on invalid t0 and
/// records any sampled h violations in the result.
PatchedExample build_patched_counterexample(double t0, const Grid1D& grid,
                                            const TimeGrid& tgrid,
                                            const SolveOptions& options = {});

/// Delta curve across the patch time from the appropriate piece at each time.
DeltaCurve patched_delta_curve(const PatchedExample& example, std::span<const double> times);

} // namespace deltalab
