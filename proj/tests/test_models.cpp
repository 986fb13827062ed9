#include "deltalab/models.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace deltalab;

TEST_CASE("make_cev evaluates a = sigma^2 x^beta / 2") {
    CHECK(make_cev(1.0, 2.0).a1(2.0, 0.3) == doctest::Approx(2.0));
    CHECK(make_cev(2.0, 1.0).a1(0.0, 5.0) == 0.0);
    CHECK(make_cev(2.0, 1.0).a1(1.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("make_cev rejects bad parameters") {
    CHECK_THROWS_AS((void)make_cev(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_cev(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_cev(1.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS((void)make_cev(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("cev lower bound a >= (sigma^2/2) x^beta holds with equality") {
    for (double beta : {0.0, 0.5, 1.0, 1.5, 1.9}) {
        const DiffusionModel m = make_cev(1.3, beta);
        for (double x = 0.0; x <= 50.0; x += 0.7)
            CHECK(m.a1(x, 1.0) ==
                  doctest::Approx(0.5 * 1.3 * 1.3 * (x > 0 ? std::pow(x, beta) : 0.0)));
    }
}

TEST_CASE("validate_hypothesis passes for the CEV family") {
    const SampleGrid grid = default_sample_grid(10.0, 2.0);
    for (double sigma : {0.1, 1.0, 10.0})
        for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            const auto rep = validate_hypothesis(make_cev(sigma, beta), grid);
            CHECK(rep.all_pass());
        }
}

TEST_CASE("validate_hypothesis catches quadratic growth") {
    DiffusionModel m = make_custom_model([](double x, double) { return x * x; },
                                         /*growth_constant=*/5.0, "quadratic");
    SampleGrid grid;
    grid.xs = {0.0, 0.5, 1.0, 10.0};
    grid.ts = {0.0, 1.0};
    const auto rep = validate_hypothesis(m, grid);
    CHECK_FALSE(rep.all_pass());
    CHECK_FALSE(rep.conditions[0].pass); // growth
    CHECK(rep.conditions[0].worst_x == 10.0);
    CHECK(rep.conditions[1].pass); // absorption holds: 0^2 = 0
}

TEST_CASE("validate_hypothesis catches a nonvanishing boundary coefficient") {
    DiffusionModel m = make_custom_model([](double, double) { return 1.0; }, 2.0, "const");
    SampleGrid grid;
    grid.xs = {0.0, 1.0};
    grid.ts = {0.0};
    const auto rep = validate_hypothesis(m, grid);
    CHECK_FALSE(rep.conditions[1].pass);
    CHECK(rep.conditions[1].worst_value == 1.0);
}

TEST_CASE("validate_hypothesis requires a nonempty grid") {
    CHECK_THROWS_AS((void)validate_hypothesis(make_gbm(0.2), SampleGrid{}),
                    std::invalid_argument);
}

TEST_CASE("payoff library values and metadata") {
    const Payoff call = payoff_library("call", {.strike = 1.0});
    CHECK(call(1.5) == doctest::Approx(0.5));
    CHECK(call(0.5) == 0.0);
    CHECK(call.is_convex);
    CHECK(call.gprime0.value() == 0.0);

    const Payoff p2 = payoff_library("power", {.gamma = 2.0});
    CHECK(p2(3.0) == doctest::Approx(9.0));
    CHECK(p2.is_convex);
    CHECK(p2.gprime0.value() == 0.0);

    const Payoff p1 = payoff_library("power", {.gamma = 1.0});
    CHECK(p1.gprime0.value() == 1.0);

    const Payoff sqrt_payoff = payoff_library("power", {.gamma = 0.5});
    CHECK_FALSE(sqrt_payoff.is_convex);
    CHECK_FALSE(sqrt_payoff.gprime0.has_value()); // derivative does not exist at 0+

    const Payoff ex = payoff_library("exchange");
    CHECK(ex(1.0, 3.0) == doctest::Approx(2.0));
    CHECK(ex(3.0, 1.0) == 0.0);

    const Payoff mx = payoff_library("max");
    CHECK(mx(1.0, 3.0) == 3.0);

    const Payoff apc = payoff_library("affine-plus-call", {.strike = 1.0, .slope = 2.0});
    CHECK(apc(2.0) == doctest::Approx(5.0));
    CHECK(apc.gprime0.value() == 2.0);

    CHECK_THROWS_AS((void)payoff_library("straddle"), std::invalid_argument);
    CHECK_THROWS_AS((void)payoff_library("call", {.strike = -1.0}), std::invalid_argument);
}

TEST_CASE("convex payoffs have nonnegative second differences (randomized)") {
    std::mt19937_64 gen(20240809);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    std::uniform_real_distribution<double> uh(1e-6, 1.0);
    const Payoff payoffs[] = {payoff_library("call", {.strike = 2.0}),
                              payoff_library("power", {.gamma = 2.0}),
                              payoff_library("affine-plus-call", {.strike = 1.0, .slope = 0.5}),
                              payoff_library("affine", {.slope = 3.0, .intercept = 1.0})};
    for (const Payoff& g : payoffs) {
        REQUIRE(g.is_convex);
        for (int k = 0; k < 1000; ++k) {
            const double h = uh(gen);
            const double x = ux(gen) + h; // keep x - h >= 0
            CHECK(g(x - h) - 2.0 * g(x) + g(x + h) >= -1e-12);
        }
    }
}

TEST_CASE("table model interpolates and respects absorption") {
    const DiffusionModel m = make_table_model({0.0, 1.0, 2.0}, {0.0, 1.0, 1.5});
    CHECK(m.alpha_at(0, 0.0, 0.0) == 0.0);
    CHECK(m.alpha_at(0, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(m.alpha_at(0, 1.5, 0.0) == doctest::Approx(1.25));
    CHECK(m.alpha_at(0, 10.0, 0.0) == doctest::Approx(1.5)); // constant beyond last knot
    CHECK(validate_hypothesis(m, default_sample_grid(10.0, 1.0)).all_pass());

    CHECK_THROWS_AS((void)make_table_model({0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)make_table_model({0.0, 1.0}, {0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)make_table_model({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("lower-order bound checks flag the sharpness coefficients") {
    LowerOrderTerms lot;
    lot.beta = 1.0;
    lot.bound_constant = 1.0;
    lot.bound_delta = 0.5;
    lot.b = [](double x, double) { return -std::pow(x, 0.0); }; // -x^{beta-1}
    lot.c = [](double x, double) { return -2.0 / x; };          // -2 x^{beta-2}
    SampleGrid grid;
    for (int k = 0; k < 20; ++k) grid.xs.push_back(std::pow(2.0, -k));
    grid.ts = {0.0};
    CHECK_FALSE(check_drift_lower_bound(lot, grid).holds);
    CHECK_FALSE(check_zeroth_lower_bound(lot, grid).holds);

    // with delta = 0 the same coefficients satisfy the bounds
    lot.bound_delta = 0.0;
    CHECK(check_drift_lower_bound(lot, grid).holds);
    CHECK(check_zeroth_lower_bound(lot, grid).holds);
}
