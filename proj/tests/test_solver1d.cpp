#include "deltalab/solver1d.hpp"

#include "deltalab/analytic.hpp"
#include "deltalab/errors.hpp"
#include "deltalab/models.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace deltalab;

namespace {

Solution1D quick_solve(const DiffusionModel& model, const Payoff& payoff, double T,
                       std::size_t m = 201, std::size_t steps = 200, double xmax = 20.0,
                       SolveOptions opts = {}, double snap = 0.0) {
    std::vector<double> snaps;
    if (snap > 0.0) snaps.push_back(snap);
    const Grid1D grid = build_grid(xmax, m, 2.0, snaps);
    const TimeGrid tgrid = uniform_time_grid(T, steps);
    return solve_1d(model, payoff, grid, tgrid, opts);
}

} // namespace

TEST_CASE("affine payoffs are reproduced to machine precision") {
    const Payoff g = payoff_library("affine", {.slope = 2.0, .intercept = 3.0});
    for (const DiffusionModel& model :
         {make_gbm(0.2), make_cev(2.0, 1.0), make_cev(1.0, 0.0), make_cev(2.0, 1.5)}) {
        for (FarField far : {FarField::SecondDerivativeZero, FarField::DirichletPayoff}) {
            SolveOptions opts;
            opts.far_field = far;
            const Solution1D sol = quick_solve(model, g, 1.0, 101, 50, 20.0, opts);
            for (const auto& level : sol.values)
                for (std::size_t i = 0; i < sol.grid.size(); ++i)
                    CHECK(std::fabs(level[i] - g(sol.grid[i])) <=
                          1e-12 * (1.0 + std::fabs(g(sol.grid[i]))));
        }
    }
}

TEST_CASE("power claim x^2 under a = x^2 tracks x^2 e^{2t} within 0.5%") {
    // a = x^2 corresponds to sigma = sqrt(2) geometric Brownian motion
    const DiffusionModel model = make_gbm(std::sqrt(2.0));
    const Payoff g = payoff_library("power", {.gamma = 2.0});
    SolveOptions opts;
    opts.theta = 0.5;
    const Grid1D grid = build_grid(80.0, 801, 2.0);
    const TimeGrid tgrid = uniform_time_grid(0.5, 512);
    const Solution1D sol = solve_1d(model, g, grid, tgrid, opts);
    double worst = 0.0;
    for (std::size_t n = 0; n <= tgrid.steps(); ++n) {
        const double t = tgrid.times[n];
        const auto u = sol.at_level(n);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (grid[i] > 2.0) break;
            const double exact = grid[i] * grid[i] * std::exp(2.0 * t);
            worst = std::max(worst, std::fabs(u[i] - exact) / exact);
        }
    }
    CHECK(worst <= 0.005);
}

TEST_CASE("GBM call matches the closed form at the strike within 0.2%") {
    const DiffusionModel model = make_gbm(0.2);
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolveOptions opts;
    opts.theta = 0.5;
    const Solution1D sol = quick_solve(model, g, 1.0, 401, 400, 20.0, opts, 1.0);
    const std::size_t i = sol.grid.nearest(1.0);
    REQUIRE(sol.grid[i] == 1.0);
    const double got = sol.at_time(1.0)[i];
    const double want = bs_call_price(1.0, 1.0, 0.2, 1.0);
    CHECK(std::fabs(got - want) / want <= 0.002);
}

TEST_CASE("discrete comparison principle: ordered payoffs give ordered solutions") {
    // (x-1)^+ <= x pointwise
    const Payoff lo = payoff_library("call", {.strike = 1.0});
    const Payoff hi = payoff_library("affine", {.slope = 1.0, .intercept = 0.0});
    for (const DiffusionModel& model : {make_gbm(0.2), make_cev(2.0, 1.0), make_cev(1.0, 0.5)}) {
        const Solution1D ul = quick_solve(model, lo, 1.0);
        const Solution1D uh = quick_solve(model, hi, 1.0);
        for (std::size_t n = 0; n < ul.values.size(); ++n)
            for (std::size_t i = 0; i < ul.grid.size(); ++i)
                CHECK(ul.values[n][i] <= uh.values[n][i] + 1e-10);
    }
}

TEST_CASE("convexity is preserved and prices increase in time to maturity") {
    const Payoff g = payoff_library("call", {.strike = 1.0});
    for (const DiffusionModel& model : {make_gbm(0.2), make_cev(2.0, 1.0)}) {
        const Solution1D sol = quick_solve(model, g, 1.0, 201, 200, 20.0, {}, 1.0);
        const auto& x = sol.grid.nodes;
        for (const auto& u : sol.values) {
            for (std::size_t i = 1; i + 1 < x.size(); ++i) {
                const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
                const double dd = 2.0 * (hl * u[i + 1] - (hl + hr) * u[i] + hr * u[i - 1]) /
                                  (hl * hr * (hl + hr));
                CHECK(dd >= -1e-8);
            }
        }
        for (std::size_t n = 0; n + 1 < sol.values.size(); ++n)
            for (std::size_t i = 0; i < x.size(); ++i)
                CHECK(sol.values[n + 1][i] >= sol.values[n][i] - 1e-8);
    }
}

TEST_CASE("boundary node is pinned to g(0) at every time") {
    const Payoff g = payoff_library("affine-plus-call", {.strike = 1.0, .slope = 1.0,
                                                         .intercept = 0.7});
    const Solution1D sol = quick_solve(make_cev(2.0, 1.0), g, 1.0);
    for (const auto& u : sol.values) CHECK(u[0] == doctest::Approx(0.7));
}

TEST_CASE("lower-order terms: x^2/2 is stationary for u_t = x^b u_xx - x^{b-1} u_x") {
    // quadratic initial data is exact for the interior stencils; pin the far
    // node to the payoff so the whole line is stationary
    for (double beta : {0.5, 1.0, 1.5}) {
        LowerOrderTerms lot;
        lot.beta = beta;
        lot.b = [beta](double x, double) { return -std::pow(x, beta - 1.0); };
        lot.c = [](double, double) { return 0.0; };
        DiffusionModel model = make_custom_model(
            [beta](double x, double) { return x <= 0.0 ? 0.0 : std::sqrt(2.0 * std::pow(x, beta)); },
            2.0, "sharpness");
        Payoff g;
        g.dim = 1;
        g.g1 = [](double x) { return 0.5 * x * x; };
        g.growth_degree = 2.0;
        g.is_convex = true;
        g.gprime0 = 0.0;
        g.name = "half-square";
        SolveOptions opts;
        opts.far_field = FarField::DirichletPayoff;
        opts.lower_order = lot;
        const Solution1D sol = quick_solve(model, g, 0.5, 201, 100, 4.0, opts);
        const auto u = sol.at_time(0.5);
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            CHECK(std::fabs(u[i] - 0.5 * sol.grid[i] * sol.grid[i]) <= 1e-10);
        CHECK(sol.max_cell_peclet > 0.0); // advection was actually exercised
    }
}

TEST_CASE("parameter validation") {
    const Payoff g = payoff_library("call", {.strike = 1.0});
    const Grid1D grid = build_grid(10.0, 32, 2.0);
    const TimeGrid tgrid = uniform_time_grid(1.0, 8);
    SolveOptions opts;
    opts.theta = 0.25;
    CHECK_THROWS_AS((void)solve_1d(make_gbm(0.2), g, grid, tgrid, opts),
                    std::invalid_argument);
    const Payoff ex = payoff_library("exchange");
    CHECK_THROWS_AS((void)solve_1d(make_gbm(0.2), ex, grid, tgrid), std::invalid_argument);
}

TEST_CASE("non-finite coefficients abort with diagnostics") {
    DiffusionModel bad = make_custom_model(
        [](double, double) { return std::numeric_limits<double>::quiet_NaN(); }, 1.0, "nan");
    const Payoff g = payoff_library("call", {.strike = 1.0});
    const Grid1D grid = build_grid(10.0, 32, 2.0);
    const TimeGrid tgrid = uniform_time_grid(1.0, 8);
    CHECK_THROWS_AS((void)solve_1d(bad, g, grid, tgrid), SolverError);
}
