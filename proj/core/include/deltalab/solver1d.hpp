#pragma once

#include "deltalab/grid.hpp"
#include "deltalab/models.hpp"
#include "deltalab/stepper.hpp"

#include <optional>
#include <span>
#include <vector>

namespace deltalab {

struct SolveOptions {
    /// Scheme weight in [1/2, 1]: 1 = implicit Euler (default, unconditionally
    /// stable with degenerate coefficients), 1/2 = Crank-Nicolson.
    double theta = 1.0;
    FarField far_field = FarField::SecondDerivativeZero;
    /// For theta < 1: number of leading time intervals integrated with two
    /// implicit-Euler substeps each (startup smoothing for kinked payoffs).
    std::size_t startup_implicit_steps = 2;
    std::optional<LowerOrderTerms> lower_order;
};

/// Grid-indexed solution values of u_t = a u_xx [+ b u_x + c u] marching in
/// time-to-maturity from u(x,0) = g(x), with u(0,t) = g(0) for all t.
struct Solution1D {
    Grid1D grid;
    TimeGrid tgrid;
    std::vector<std::vector<double>> values; // [time level][node]

    std::span<const double> at_level(std::size_t n) const { return values[n]; }
    std::span<const double> at_time(double t) const { return values[tgrid.level_of(t)]; }
    double max_cell_peclet = 0.0;
};

/// Theta-scheme solve on the truncated domain [0, xmax]. The x = 0 node is
/// pinned to g(0) (absorbed boundary; the 0-face equation is u_t = 0), the
/// far field uses the configured closure. Interior stencils are the
/// nonuniform three-point formulas, exact on quadratics.
Solution1D solve_1d(const DiffusionModel& model, const Payoff& payoff, const Grid1D& grid,
                    const TimeGrid& tgrid, const SolveOptions& options = {});

} // namespace deltalab
