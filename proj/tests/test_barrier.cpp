#include "deltalab/barrier.hpp"

#include "deltalab/boundary.hpp"
#include "deltalab/solver1d.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace deltalab;

TEST_CASE("parameter rule examples") {
    // beta=1, eps=0.25, N=4: 0.25 < 0.75 < 1
    BarrierParams p{.beta = 1.0, .epsilon = 0.25, .N = 4.0};
    CHECK(p.rule_holds());
    // beta=1.9: eps=0.01, N=16 gives 0.91 < 0.9375
    BarrierParams q{.beta = 1.9, .epsilon = 0.01, .N = 16.0};
    CHECK(q.rule_holds());
    // illegal: beta + eps - 1 above (N-1)/N
    BarrierParams bad{.beta = 1.9, .epsilon = 0.25, .N = 2.0};
    CHECK_FALSE(bad.rule_holds());
}

TEST_CASE("choose_barrier_params picks admissible dyadic N") {
    for (double beta : {0.0, 0.5, 1.0, 1.5, 1.9, 1.99}) {
        const auto [eps, N] = choose_barrier_params(beta);
        BarrierParams p{.beta = beta, .epsilon = eps, .N = N};
        CHECK(p.rule_holds());
        // dyadic ladder
        double n = N;
        while (n > 1.0) n /= 2.0;
        CHECK(n == 1.0);
        // minimality: the next smaller dyadic N violates the rule (unless N=1)
        if (N > 1.0) {
            BarrierParams smaller{.beta = beta, .epsilon = eps, .N = N / 2.0};
            CHECK_FALSE(smaller.rule_holds());
        }
    }
    // beta = 0 admits N = 1
    CHECK(choose_barrier_params(0.0).second == 1.0);
    CHECK_THROWS_AS((void)choose_barrier_params(2.0), std::invalid_argument);
    CHECK_THROWS_AS((void)choose_barrier_params(2.5), std::invalid_argument);
}

TEST_CASE("barrier anchors: v(P') = 0 and v_x1(P') = 1 exactly") {
    BarrierParams p{.beta = 1.0, .epsilon = 0.25, .N = 4.0, .t0 = 1.0};
    CHECK(barrier_value(p, 0.0, p.t0) == 0.0);
    CHECK(barrier_dx1(p, 0.0) == 1.0);
}

TEST_CASE("degenhopf certificate passes for the CEV family") {
    for (double beta : {0.0, 0.5, 1.0, 1.5}) {
        const auto [eps, N] = choose_barrier_params(beta);
        const double sigma = 2.0;
        BarrierParams params;
        params.beta = beta;
        params.C = 0.5 * sigma * sigma;
        params.epsilon = eps;
        params.N = N;
        params.t0 = 1.0;
        const BarrierReport rep =
            verify_barrier_degenhopf(make_cev(sigma, beta), params, 100);
        CHECK(rep.pass);
        CHECK(rep.min_residual >= -1e-12);
        CHECK(rep.eta_used >= 1e-3);
        CHECK(rep.samples > 0);
    }
}

TEST_CASE("uniformly parabolic slab: L v = (1+eps) eps x^{eps-1} - 1 > 0 near 0") {
    // a == 1 realized as a table model with alpha == sqrt(2) away from 0; the
    // residual at any sampled x <= eta stays positive once eta is small
    BarrierParams params;
    params.beta = 0.0;
    params.C = 1.0;
    params.epsilon = 0.5;
    params.N = 1.0;
    DiffusionModel flat = make_custom_model(
        [](double x, double) { return x <= 0.0 ? 0.0 : std::sqrt(2.0); }, 2.0, "flat");
    const BarrierReport rep = verify_barrier_degenhopf(flat, params, 100);
    CHECK(rep.pass);
}

TEST_CASE("deliberately illegal (eps, N) fails for every eta") {
    // beta + eps - 1 = 1.15 > 1/2 = (N-1)/N: the x1 power term is dominated
    // near 0, so no slab width can rescue the certificate
    BarrierParams bad{.beta = 1.9, .epsilon = 0.25, .N = 2.0, .t0 = 1.0};
    bad.C = 0.5 * 4.0;
    REQUIRE_FALSE(bad.rule_holds());
    const BarrierReport rep = verify_barrier_degenhopf(make_cev(2.0, 1.9), bad, 60);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_residual < 0.0);
    CHECK(rep.eta_used < bad.eta); // halvings were exhausted

    // a model below the declared lower bound is a precondition violation
    BarrierParams params{.beta = 0.5, .C = 10.0, .epsilon = 0.25, .N = 2.0};
    CHECK_THROWS_AS((void)verify_barrier_degenhopf(make_cev(1.0, 0.5), params, 50),
                    std::invalid_argument);
}

TEST_CASE("neghopf supersolution: t0 formula and the worked call example") {
    // C=1, N=2 -> t0 = 1/4
    Payoff g = payoff_library("call", {.strike = 1.0});
    const SupersolutionReport rep = verify_supersolution_neghopf(1.0, g, 0.1, 2.0, 0.9,
                                                                 4.0 * 1.0 * 0.9 * 2.0, 50.0);
    CHECK(rep.t0 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rep.domination_pass); // (x-1)^+ <= 0.1x + 0.9x^2
    CHECK(rep.residual_pass);
    CHECK(rep.c2_sufficient);
    CHECK(rep.pass);
}

TEST_CASE("boundary case C2 = 2 C C1 N (N-1) passes at equality") {
    Payoff g = payoff_library("call", {.strike = 1.0});
    const double C = 1.0, C1 = 0.9, N = 2.0;
    const SupersolutionReport rep =
        verify_supersolution_neghopf(C, g, 0.1, N, C1, 2.0 * C * C1 * N * (N - 1.0), 50.0);
    CHECK(rep.residual_pass);
    CHECK(rep.residual_min >= 0.0);
    CHECK(rep.c2_sufficient);
}

TEST_CASE("domination failure reports the worst point") {
    Payoff g = payoff_library("call", {.strike = 1.0});
    // C1 too small: 0.1x + 0.01 x^2 < (x-1)^+ somewhere
    const SupersolutionReport rep =
        verify_supersolution_neghopf(1.0, g, 0.1, 2.0, 0.01, 1.0, 50.0);
    CHECK_FALSE(rep.domination_pass);
    CHECK(rep.domination_worst_x > 0.0);
    CHECK(rep.domination_min < 0.0);
}

TEST_CASE("find_domination_constant produces a valid C1") {
    Payoff g = payoff_library("call", {.strike = 1.0});
    const double C1 = find_domination_constant(g, 0.1, 2.0, 50.0);
    const SupersolutionReport rep =
        verify_supersolution_neghopf(1.0, g, 0.1, 2.0, C1, 4.0 * C1 * 2.0, 50.0);
    CHECK(rep.domination_pass);
}

TEST_CASE("supersolution iteration consistency: same N works from u(.,t0)") {
    // solve the normalized call under a = x^2 (sigma = sqrt 2, C = 1) to t0,
    // treat u(.,t0) as new initial data, refit C1 with the same N
    const double C = 1.0, N = 2.0, eps = 0.1;
    const double t0 = 1.0 / (2.0 * C * (N * N - N));
    const DiffusionModel model = make_gbm(std::sqrt(2.0));
    Payoff g = payoff_library("call", {.strike = 1.0});
    SolverSetup setup;
    setup.m = 401;
    setup.steps = 200;
    setup.xmax = 50.0;
    setup.snap = {1.0};
    const Solution1D sol = run_solve(model, g, t0, setup);
    const auto grid = sol.grid;
    const auto final_values = sol.values.back();
    Payoff restart;
    restart.dim = 1;
    restart.g1 = [grid, final_values](double x) {
        // nodewise samples of u(., t0); linear between nodes
        auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), x);
        if (it == grid.nodes.begin()) return final_values.front();
        if (it == grid.nodes.end()) return final_values.back();
        const std::size_t hi = static_cast<std::size_t>(it - grid.nodes.begin());
        const double w = (x - grid.nodes[hi - 1]) / (grid.nodes[hi] - grid.nodes[hi - 1]);
        return final_values[hi - 1] + w * (final_values[hi] - final_values[hi - 1]);
    };
    restart.name = "u(.,t0)";
    const double C1p = find_domination_constant(restart, eps, N, setup.xmax);
    const SupersolutionReport rep =
        verify_supersolution_neghopf(C, restart, eps, N, C1p, 4.0 * C * C1p * N * (N - 1.0),
                                     setup.xmax);
    CHECK(rep.domination_pass);
    CHECK(rep.residual_pass);
}

TEST_CASE("sharpness residuals vanish and the lower bounds fail") {
    const SharpnessReport rep = sharpness_residuals();
    CHECK(rep.max_residual_system1 <= 1e-12);
    CHECK(rep.max_residual_system2 <= 1e-12);
    CHECK(rep.boundary_delta == 0.0);
    CHECK(rep.drift_bound_fails);
    CHECK(rep.zeroth_bound_fails);
    CHECK(rep.drift_witness.worst_gap < 0.0);
    CHECK(rep.zeroth_witness.worst_gap < 0.0);
}
