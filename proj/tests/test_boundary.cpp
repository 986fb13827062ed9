#include "deltalab/boundary.hpp"

#include "deltalab/analytic.hpp"
#include "deltalab/models.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace deltalab;

TEST_CASE("extraction is exact on polynomial data") {
    const Grid1D grid = build_grid(20.0, 801, 2.0);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        u[i] = 3.0 * grid[i] + 5.0 * grid[i] * grid[i];
    const DeltaEstimate est = boundary_delta_values(grid.nodes, u);
    CHECK(est.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(est.residual <= 1e-10);
    CHECK_FALSE(est.divergent());
}

TEST_CASE("closed-form call delta at the boundary is zero (solver bypass)") {
    auto u = [](double x) { return bs_call_price(x, 1.0, 0.2, 1.0); };
    const DeltaEstimate est = boundary_delta(u, 1e-2);
    CHECK_FALSE(est.divergent());
    CHECK(std::fabs(est.value) <= 1e-12);
}

TEST_CASE("closed-form power gamma < 1 is flagged divergent") {
    auto u = [](double x) { return power_option_price(x, 1.0, 0.5).value; };
    const DeltaEstimate est = boundary_delta(u, 1e-2);
    CHECK(est.divergent());
    CHECK(std::isnan(est.value));
}

TEST_CASE("CEV beta=1 boundary delta matches the closed form within 2%") {
    const DiffusionModel model = make_cev(2.0, 1.0);
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.snap = {1.0};
    const Solution1D sol = run_solve(model, g, 1.0, setup);
    const DeltaEstimate est = boundary_delta(sol, 1.0);
    const double want = cev_beta1_boundary_delta(1.0, 2.0, 1.0);
    CHECK_FALSE(est.divergent());
    CHECK(std::fabs(est.value - want) / want <= 0.02);
}

TEST_CASE("GBM call boundary delta vanishes") {
    const DiffusionModel model = make_gbm(0.2);
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.m = 401;
    setup.steps = 400;
    setup.snap = {1.0};
    const Solution1D sol = run_solve(model, g, 1.0, setup);
    const DeltaEstimate est = boundary_delta(sol, 1.0);
    CHECK_FALSE(est.divergent());
    CHECK(std::fabs(est.value) <= 1e-3);
}

TEST_CASE("PDE-solved sqrt payoff under a = x^2 is divergent") {
    const DiffusionModel model = make_gbm(std::sqrt(2.0));
    const Payoff g = payoff_library("power", {.gamma = 0.5});
    SolverSetup setup;
    setup.steps = 500;
    const Solution1D sol = run_solve(model, g, 1.0, setup);
    CHECK(boundary_delta(sol, 1.0).divergent());
}

TEST_CASE("insufficient resolution near zero is an error, not a guess") {
    const Grid1D grid = build_grid(20.0, 9, 1.0);
    std::vector<double> u(grid.size(), 0.0);
    DeltaOptions opts;
    opts.x_probe = 1e-3; // no interior node below this
    CHECK_THROWS_AS((void)boundary_delta_values(grid.nodes, u, opts), std::invalid_argument);
}

TEST_CASE("hopf sweep: positive delta below beta = 2, vanishing at beta = 2") {
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.m = 401;
    setup.steps = 300;
    setup.snap = {1.0};
    const std::vector<double> betas{0.0, 1.0, 2.0};
    const auto rows = hopf_sweep(betas, 2.0, g, 1.0, setup);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK_FALSE(row.delta.divergent());
        if (row.beta < 2.0) {
            CHECK(row.delta.value > 0.0);
            CHECK(row.delta.value > 10.0 * row.delta.residual);
        } else {
            CHECK(std::fabs(row.delta.value) <= 1e-3);
        }
    }
    // beta = 1 row reproduces the closed form
    CHECK(std::fabs(rows[1].delta.value - std::exp(-0.5)) / std::exp(-0.5) <= 0.02);
}

TEST_CASE("gprime check: affine shift of a call keeps delta at the slope") {
    const DiffusionModel model = make_gbm(0.2);
    const Payoff g = payoff_library("affine-plus-call", {.strike = 1.0, .slope = 2.0});
    SolverSetup setup;
    setup.snap = {1.0};
    const std::vector<double> times{0.25, 0.5, 1.0};
    const GprimeReport rep =
        check_gprime_match(model, 0.5 * 0.2 * 0.2, g, times, setup, 1e-3);
    CHECK(rep.all_pass());
    for (const auto& row : rep.rows) CHECK(std::fabs(row.delta - 2.0) <= 1e-3);
}

TEST_CASE("gprime check: plain affine payoff is exact") {
    const DiffusionModel model = make_gbm(0.2);
    const Payoff g = payoff_library("affine", {.slope = 1.0});
    SolverSetup setup;
    setup.m = 201;
    setup.steps = 100;
    const std::vector<double> times{0.5, 1.0};
    const GprimeReport rep = check_gprime_match(model, 0.02, g, times, setup, 1e-9);
    CHECK(rep.all_pass());
}

TEST_CASE("gprime check refuses models without the quadratic bound") {
    const DiffusionModel model = make_cev(2.0, 1.0); // a = 2x beats C x^2 near 0
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    const std::vector<double> times{1.0};
    CHECK_THROWS_AS((void)check_gprime_match(model, 10.0, g, times, setup, 1e-3),
                    std::invalid_argument);
    const Payoff no_slope = payoff_library("power", {.gamma = 0.5});
    CHECK_THROWS_AS(
        (void)check_gprime_match(make_gbm(0.2), 0.02, no_slope, times, setup, 1e-3),
        std::invalid_argument);
}

TEST_CASE("delta curve of the CEV call is increasing and matches the formula") {
    const DiffusionModel model = make_cev(2.0, 1.0);
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.snap = {1.0};
    setup.steps = 500;
    const Solution1D sol = run_solve(model, g, 1.0, setup);
    std::vector<double> times;
    for (double t = 0.25; t <= 1.0 + 1e-12; t += 0.05) times.push_back(t);
    // snap the requested times onto stored levels
    for (double& t : times) t = sol.tgrid.times[sol.tgrid.level_of(t)];
    const DeltaCurve curve = boundary_delta_in_time(sol, times);
    CHECK(curve.max_monotonicity_violation <= 1e-6);
    CHECK(curve.jump_candidates.empty());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double want = cev_beta1_boundary_delta(times[k], 2.0, 1.0);
        CHECK(std::fabs(curve.deltas[k].value - want) / want <= 0.02);
    }
}

TEST_CASE("GBM delta curve is flat at zero with no spurious jumps") {
    const DiffusionModel model = make_gbm(0.2);
    const Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.m = 201;
    setup.steps = 100;
    setup.snap = {1.0};
    const Solution1D sol = run_solve(model, g, 1.0, setup);
    std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    const DeltaCurve curve = boundary_delta_in_time(sol, times);
    CHECK(curve.jump_candidates.empty());
    CHECK(curve.max_monotonicity_violation <= 1e-6);
    for (const auto& d : curve.deltas) CHECK(std::fabs(d.value) <= 1e-3);
}
