#pragma once

#include "deltalab/grid.hpp"
#include "deltalab/models.hpp"

#include <optional>
#include <span>
#include <vector>

namespace deltalab {

/// Far-field closure at x = xmax.
///   SecondDerivativeZero: u_xx = 0, i.e. the last node is the linear
///     extrapolation of its two neighbours (all test payoffs have affine or
///     polynomial tails; this is the default).
///   DirichletPayoff: the last node is pinned to its initial value.
enum class FarField { SecondDerivativeZero, DirichletPayoff };

/// Nonuniform three-point difference weights, exact on quadratics.
struct Stencil1D {
    std::vector<double> wl, wc, wr; // u_xx weights at interior nodes (index i-1)
    std::vector<double> dl, dc, dr; // centered u_x weights
    double far_ratio = 1.0;         // h_{m-1} / h_{m-2}

    explicit Stencil1D(std::span<const double> x);
};

/// Theta-weighted implicit step along one spatial direction:
///   u_t = a(x,t) u_xx [+ b u_x + c u]
/// with Dirichlet data at x = 0 and the configured far-field closure.
/// One instance serves every grid line of a sweep in the 2D solver; the
/// implicit factorization is reused while (t0, t1, theta) are unchanged.
class ThetaStepper {
public:
    ThetaStepper(const Grid1D& grid, CoefFn a, FarField far,
                 std::optional<LowerOrderTerms> lot = std::nullopt);

    /// Advance u (size m, boundaries included) from t0 to t1. boundary0 is
    /// the Dirichlet value at x = 0 at the new time. Throws SolverError on a
    /// singular system or non-finite values.
    void step(std::span<double> u, double t0, double t1, double theta, double boundary0);

    /// Largest sampled cell Peclet number |b| h / a (lower-order runs only).
    double max_cell_peclet() const { return max_peclet_; }

private:
    void prepare(double t0, double t1, double theta);

    std::vector<double> x_;
    Stencil1D stencil_;
    CoefFn a_;
    std::optional<LowerOrderTerms> lot_;
    FarField far_;

    // cached per (t0,t1,theta)
    double key_t0_ = -1.0, key_t1_ = -1.0, key_theta_ = -1.0;
    bool has_key_ = false;
    std::vector<double> exp_l_, exp_c_, exp_r_; // explicit operator weights at t0
    std::vector<double> lo_, di_, up_;          // implicit tridiagonal rows
    std::vector<double> cp_;                    // Thomas forward coefficients
    std::vector<double> piv_;                   // pivots (for reuse across lines)
    std::vector<double> rhs_, dscratch_;
    double max_peclet_ = 0.0;
};

} // namespace deltalab
