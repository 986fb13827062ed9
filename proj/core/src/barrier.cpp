#include "deltalab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deltalab {

bool BarrierParams::rule_holds() const {
    const double lhs = beta + epsilon - 1.0;
    const double mid = (N - 1.0) / N;
    return lhs < mid && mid < 1.0;
}

std::pair<double, double> choose_barrier_params(double beta) {
    if (!(beta >= 0.0 && beta < 2.0))
        throw std::invalid_argument(
            "choose_barrier_params: rule beta+eps-1 < (N-1)/N is unsatisfiable for beta >= 2");
    const double eps = std::min(0.25, 0.25 * (2.0 - beta));
    const double target = beta + eps - 1.0;
    double N = 1.0;
    while (!((N - 1.0) / N > target)) N *= 2.0;
    return {eps, N};
}

double barrier_value(const BarrierParams& p, double x1, double t, double r) {
    double v = x1 + std::pow(x1, 1.0 + p.epsilon) - std::pow(std::fabs(t - p.t0), p.N);
    if (p.dim >= 2) v -= std::pow(r, 2.0 * p.N);
    return v;
}

double barrier_dx1(const BarrierParams& p, double x1) {
    return 1.0 + (1.0 + p.epsilon) * std::pow(x1, p.epsilon);
}

double barrier_operator(const DiffusionModel& model, const BarrierParams& p, double x1,
                        double t, double r) {
    // exact derivatives of v; only the coefficients are sampled
    const double diffusion =
        model.a(0, x1, t) * (1.0 + p.epsilon) * p.epsilon * std::pow(x1, p.epsilon - 1.0);
    const double time_term = p.N * std::pow(std::fabs(t - p.t0), p.N - 1.0);
    double shell_term = 0.0;
    if (p.dim >= 2) {
        const double x2 = p.x2prime + r; // a22 depends on the coordinate, not the shell
        shell_term = (4.0 * p.N * p.N - 2.0 * p.N) * model.a(1, x2, t) *
                     std::pow(std::fabs(r), 2.0 * p.N - 2.0);
    }
    return diffusion - time_term - shell_term;
}

BarrierReport verify_barrier_degenhopf(const DiffusionModel& model, BarrierParams params,
                                       std::size_t density) {
    // a rule-violating (eps, N) is allowed through: the sampling then shows
    // the certificate failing at every eta, which is the informative outcome
    if (params.dim >= 2 && model.dim < 2)
        throw std::invalid_argument("verify_barrier_degenhopf: 2D params need a 2D model");

    // a11 >= C x1^beta must hold where we sample
    for (std::size_t j = 1; j <= 32; ++j) {
        const double x = params.eta * std::pow(j / 32.0, 2.0);
        if (model.a(0, x, params.t0) < params.C * std::pow(x, params.beta) * (1.0 - 1e-12))
            throw std::invalid_argument(
                "verify_barrier_degenhopf: model violates a11 >= C x1^beta at samples");
    }

    constexpr double kTol = -1e-12;
    const std::size_t shell_density = params.dim >= 2 ? std::min<std::size_t>(density, 40) : 0;

    BarrierReport rep;
    double eta = params.eta;
    for (int halving = 0; halving <= 8; ++halving) {
        rep = BarrierReport{};
        rep.eta_used = eta;
        rep.min_residual = std::numeric_limits<double>::infinity();
        const double reach = eta + std::pow(eta, 1.0 + params.epsilon);
        const double smax = std::pow(reach, 1.0 / params.N);
        const double rmax = params.dim >= 2 ? std::pow(reach, 0.5 / params.N) : 0.0;

        for (std::size_t j = 1; j <= density; ++j) {
            const double x1 =
                eta * std::pow(static_cast<double>(j) / static_cast<double>(density), 2.0);
            for (std::size_t k = 0; k <= density; ++k) {
                const double t =
                    params.t0 - smax * static_cast<double>(k) / static_cast<double>(density);
                for (std::size_t l = 0; l <= shell_density; ++l) {
                    const double r =
                        params.dim >= 2
                            ? rmax * static_cast<double>(l) / static_cast<double>(shell_density)
                            : 0.0;
                    if (barrier_value(params, x1, t, r) < 0.0) continue; // outside D
                    auto track = [&](double rr) {
                        const double res = barrier_operator(model, params, x1, t, rr);
                        ++rep.samples;
                        if (res < rep.min_residual) {
                            rep.min_residual = res;
                            rep.offending_x1 = x1;
                            rep.offending_t = t;
                            rep.offending_r = rr;
                        }
                    };
                    track(r);
                    // both shell orientations while x2' - r stays in the domain
                    if (params.dim >= 2 && r > 0.0 && params.x2prime - r >= 0.0) track(-r);
                }
            }
        }
        rep.pass = rep.min_residual >= kTol;
        params.eta = eta;
        rep.params = params;
        if (rep.pass) break;
        eta *= 0.5;
    }
    return rep;
}

double find_domination_constant(const Payoff& payoff, double epsilon, double N, double xmax,
                                std::size_t density) {
    double c1 = 0.0;
    for (std::size_t j = 1; j <= density; ++j) {
        const double x = xmax * static_cast<double>(j) / static_cast<double>(density);
        const double need = (payoff(x) - epsilon * x) / std::pow(x, N);
        c1 = std::max(c1, need);
    }
    return c1 * (1.0 + 1e-9) + 1e-12;
}

SupersolutionReport verify_supersolution_neghopf(double C, const Payoff& payoff,
                                                 double epsilon, double N, double C1,
                                                 double C2, double xmax,
                                                 std::size_t density) {
    if (!(N > 1.0))
        throw std::invalid_argument("verify_supersolution_neghopf: need N > 1");
    if (payoff(0.0) != 0.0)
        throw std::invalid_argument("verify_supersolution_neghopf: payoff must have g(0) = 0 "
                                    "(subtract a constant first)");
    if (payoff.gprime0 && *payoff.gprime0 != 0.0)
        throw std::invalid_argument("verify_supersolution_neghopf: payoff must have g'(0) = 0 "
                                    "(subtract a multiple of x first)");

    SupersolutionReport rep;
    rep.epsilon = epsilon;
    rep.C1 = C1;
    rep.C2 = C2;
    rep.N = N;
    rep.t0 = 1.0 / (2.0 * C * (N * N - N));
    rep.c2_sufficient = C2 >= 2.0 * C * C1 * N * (N - 1.0);

    rep.domination_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= density; ++j) {
        const double x = xmax * static_cast<double>(j) / static_cast<double>(density);
        const double gap = epsilon * x + C1 * std::pow(x, N) - payoff(x);
        if (gap < rep.domination_min) {
            rep.domination_min = gap;
            rep.domination_worst_x = x;
        }
    }
    rep.domination_pass = rep.domination_min >= 0.0;

    // worst admissible coefficient a = C x^2 (v_xx >= 0, so smaller a only helps)
    rep.residual_min = std::numeric_limits<double>::infinity();
    const std::size_t nt = 32;
    for (std::size_t j = 1; j <= density; ++j) {
        const double x = xmax * static_cast<double>(j) / static_cast<double>(density);
        const double xn = std::pow(x, N);
        for (std::size_t k = 0; k <= nt; ++k) {
            const double t = rep.t0 * static_cast<double>(k) / static_cast<double>(nt);
            const double res = (C2 - C * (C1 + C2 * t) * N * (N - 1.0)) * xn;
            if (res < rep.residual_min) {
                rep.residual_min = res;
                rep.residual_worst_x = x;
            }
        }
    }
    rep.residual_pass = rep.residual_min >= 0.0;
    rep.pass = rep.domination_pass && rep.residual_pass;
    return rep;
}

SharpnessReport sharpness_residuals() {
    SharpnessReport rep;
    // u = x^2/2 solves both systems for every beta; sample a few exponents
    const double betas[] = {0.5, 1.0, 1.5};
    for (double beta : betas) {
        for (std::size_t j = 1; j <= 100; ++j) {
            const double x = 2.0 * static_cast<double>(j) / 100.0;
            // u_t = 0, u_x = x, u_xx = 1, u = x^2/2
            const double r1 = std::pow(x, beta) - std::pow(x, beta - 1.0) * x;
            const double r2 = std::pow(x, beta) - 2.0 * std::pow(x, beta - 2.0) * 0.5 * x * x;
            rep.max_residual_system1 = std::max(rep.max_residual_system1, std::fabs(r1));
            rep.max_residual_system2 = std::max(rep.max_residual_system2, std::fabs(r2));
        }
    }
    rep.boundary_delta = 0.0; // u_x(x) = x vanishes at the boundary

    // the bounds of the positive-delta theorem fail for these coefficients at
    // every delta > 0: exhibit the violation at delta = 1/2, C = 1, beta = 1
    SampleGrid near_zero;
    for (std::size_t k = 0; k < 24; ++k) near_zero.xs.push_back(std::pow(2.0, -static_cast<double>(k)));
    near_zero.ts = {0.0, 0.5, 1.0};
    const double beta = 1.0;
    LowerOrderTerms lot;
    lot.b = [beta](double x, double) { return -std::pow(x, beta - 1.0); };
    lot.c = [beta](double x, double) { return -2.0 * std::pow(x, beta - 2.0); };
    lot.bound_constant = 1.0;
    lot.bound_delta = 0.5;
    lot.beta = beta;
    rep.drift_witness = check_drift_lower_bound(lot, near_zero);
    rep.zeroth_witness = check_zeroth_lower_bound(lot, near_zero);
    rep.drift_bound_fails = !rep.drift_witness.holds;
    rep.zeroth_bound_fails = !rep.zeroth_witness.holds;
    return rep;
}

} // namespace deltalab
