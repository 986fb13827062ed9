#include "deltalab/analytic.hpp"

#include "deltalab/models.hpp"
#include "deltalab/monte_carlo.hpp"
#include "deltalab/normal.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace deltalab;

TEST_CASE("bs_call_price anchor values") {
    CHECK(bs_call_price(0.0, 1.0, 0.2, 1.0) == 0.0);
    // x = K = 1: price = 2 Phi(sigma sqrt(t)/2) - 1
    CHECK(bs_call_price(1.0, 1.0, 0.2, 1.0) == doctest::Approx(0.0796556745540580).epsilon(1e-12));
    // deep in the money: x - K to within 1e-6
    CHECK(std::fabs(bs_call_price(10.0, 1.0, 0.2, 1.0) - 9.0) <= 1e-6);
    // t = 0 is the payoff limit
    CHECK(bs_call_price(1.5, 0.0, 0.2, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)bs_call_price(1.0, -1.0, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("bs_call_price cross-checked by exact-GBM Monte Carlo") {
    PathConfig cfg;
    cfg.n_paths = 2'000'000;
    cfg.seed = 99;
    const auto samples = simulate_gbm_exact(1.0, 0.2, 1.0, cfg);
    const auto est = mc_price(payoff_library("call", {.strike = 1.0}), samples);
    CHECK(std::fabs(est.mean - bs_call_price(1.0, 1.0, 0.2, 1.0)) <= 3.0 * est.std_error);
}

TEST_CASE("bs_call_delta boundary and limits") {
    CHECK(bs_call_delta(0.0, 1.0, 0.2, 1.0) == 0.0);
    CHECK(bs_call_delta(1.0, 1.0, 0.2, 1.0) == doctest::Approx(norm_cdf(0.1)).epsilon(1e-15));
    CHECK(bs_call_delta(1e6, 1.0, 0.2, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bs_call_price is convex in x and nondecreasing in t") {
    const double sigma = 0.2, K = 1.0;
    for (int i = 1; i + 1 < 200; ++i) {
        const double h = 4.0 / 200;
        const double x = i * h;
        const double second = bs_call_price(x - h, 1.0, sigma, K) -
                              2.0 * bs_call_price(x, 1.0, sigma, K) +
                              bs_call_price(x + h, 1.0, sigma, K);
        CHECK(second >= -1e-10);
    }
    for (double x : {0.5, 1.0, 2.0}) {
        double prev = 0.0;
        for (double t = 0.1; t <= 2.0; t += 0.1) {
            const double v = bs_call_price(x, t, sigma, K);
            CHECK(v >= prev - 1e-14);
            prev = v;
        }
    }
}

TEST_CASE("cev_beta1_boundary_delta") {
    CHECK(cev_beta1_boundary_delta(1.0, 2.0, 1.0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(cev_beta1_boundary_delta(1e-6, 2.0, 1.0) < 1e-100); // t -> 0+ limit
    CHECK(cev_beta1_boundary_delta(1e9, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS((void)cev_beta1_boundary_delta(0.0, 2.0, 1.0), std::invalid_argument);

    // strictly increasing in t, valued in (0,1)
    double prev = 0.0;
    for (double t = 0.05; t <= 5.0; t += 0.05) {
        const double v = cev_beta1_boundary_delta(t, 2.0, 1.0);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("power option closed form") {
    CHECK(power_option_price(0.7, 3.0, 1.0).value == doctest::Approx(0.7)); // gamma=1: u=x
    CHECK(power_option_price(1.0, 0.5, 2.0).value ==
          doctest::Approx(2.718281828459045).epsilon(1e-14));
    CHECK(power_option_price(1.0, 0.5, 2.0).boundary_delta_exists);
    CHECK_FALSE(power_option_price(1.0, 0.5, 0.5).boundary_delta_exists);
}

TEST_CASE("power option satisfies u_t = x^2 u_xx (symbolic derivatives)") {
    // u = x^gamma e^{(gamma^2-gamma)t}: u_t = (g^2-g)u, x^2 u_xx = g(g-1)u
    for (double gamma : {0.5, 1.0, 2.0, 3.0}) {
        for (int k = 0; k < 100; ++k) {
            const double x = 0.02 + 1.98 * k / 99.0;
            const double t = 0.01 + 0.99 * (k % 10) / 9.0;
            const double u = power_option_price(x, t, gamma).value;
            const double ut = (gamma * gamma - gamma) * u;
            const double x2uxx = gamma * (gamma - 1.0) * u;
            CHECK(std::fabs(ut - x2uxx) <= 1e-9);
        }
    }
}

TEST_CASE("margrabe price anchors") {
    CHECK(margrabe_price(0.0, 3.0, 1.0, 0.2, 0.2) == 3.0);
    CHECK(margrabe_price(2.0, 0.0, 1.0, 0.2, 0.2) == 0.0);
    CHECK(margrabe_price(1.0, 1.0, 1.0, 0.2, 0.2) ==
          doctest::Approx(0.112462916018285).epsilon(1e-12));
}

TEST_CASE("margrabe agrees with two-GBM Monte Carlo") {
    PathConfig cfg;
    cfg.n_paths = 2'000'000;
    cfg.seed = 7;
    const auto samples = simulate_two_gbm_exact(1.0, 0.2, 1.0, 0.2, 1.0, cfg);
    const auto est = mc_price(payoff_library("exchange"), samples);
    CHECK(std::fabs(est.mean - margrabe_price(1.0, 1.0, 1.0, 0.2, 0.2)) <=
          3.0 * est.std_error);
}

TEST_CASE("margrabe plus affine shift prices the max claim (MC at random points)") {
    // (x2-x1)^+ + x1 = max(x1,x2); check at a few spot pairs
    const double pts[][2] = {{1.0, 1.0}, {0.5, 1.5}, {2.0, 0.7}, {0.3, 0.2}, {1.2, 3.0}};
    const Payoff max_claim = payoff_library("max");
    for (const auto& p : pts) {
        PathConfig cfg;
        cfg.n_paths = 1'000'000;
        cfg.seed = 1234 + static_cast<std::uint64_t>(p[0] * 10.0 + p[1] * 100.0);
        const auto samples = simulate_two_gbm_exact(p[0], 0.25, p[1], 0.15, 0.8, cfg);
        const auto est = mc_price(max_claim, samples);
        const double closed = margrabe_price(p[0], p[1], 0.8, 0.25, 0.15) + p[0];
        CHECK(std::fabs(est.mean - closed) <= 4.0 * est.std_error);
    }
}

TEST_CASE("margrabe boundary derivatives match the closed-form limits") {
    // u_x1(0, x2, t) = -1 and u_x2(x1, 0, t) = 0 in the GBM model
    const double x2 = 1.3, t = 0.7;
    double eps = 1e-4;
    for (int k = 0; k < 4; ++k, eps *= 0.5) {
        const double q1 =
            (margrabe_price(eps, x2, t, 0.2, 0.3) - margrabe_price(0.0, x2, t, 0.2, 0.3)) / eps;
        CHECK(std::fabs(q1 + 1.0) <= 1e-8);
        const double q2 =
            (margrabe_price(1.0, eps, t, 0.2, 0.3) - margrabe_price(1.0, 0.0, t, 0.2, 0.3)) /
            eps;
        CHECK(std::fabs(q2) <= 1e-8);
    }
}
