#include "deltalab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deltalab {

double CevSpec::alpha(double x, double t) const {
    (void)t;
    if (x <= 0.0) return 0.0;
    return sigma * std::pow(x, 0.5 * beta);
}

double CevSpec::a(double x, double t) const {
    if (x <= 0.0) return 0.0;
    (void)t;
    return 0.5 * sigma * sigma * std::pow(x, beta);
}

double DiffusionModel::alpha_at(int i, double x, double t) const {
    return alpha.at(static_cast<std::size_t>(i))(x, t);
}

double DiffusionModel::a(int i, double x, double t) const {
    if (cev.size() > static_cast<std::size_t>(i) && cev[static_cast<std::size_t>(i)])
        return cev[static_cast<std::size_t>(i)]->a(x, t);
    const double al = alpha_at(i, x, t);
    return 0.5 * al * al;
}

namespace {

void require_cev_params(double sigma, double beta) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("make_cev: sigma must be positive");
    if (!(beta >= 0.0 && beta <= 2.0))
        throw std::invalid_argument("make_cev: beta must lie in [0,2]");
}

CoefFn cev_fn(CevSpec spec) {
    return [spec](double x, double t) { return spec.alpha(x, t); };
}

} // namespace

DiffusionModel make_cev(double sigma, double beta) {
    require_cev_params(sigma, beta);
    DiffusionModel m;
    m.dim = 1;
    CevSpec spec{sigma, beta};
    m.alpha = {cev_fn(spec)};
    m.cev = {spec};
    // sigma x^{beta/2} <= sigma (1+x) for beta in [0,2].
    m.growth_constant = sigma;
    m.name = "cev(sigma=" + std::to_string(sigma) + ",beta=" + std::to_string(beta) + ")";
    return m;
}

DiffusionModel make_gbm(double sigma) {
    DiffusionModel m = make_cev(sigma, 2.0);
    m.name = "gbm(sigma=" + std::to_string(sigma) + ")";
    return m;
}

DiffusionModel make_cev_2d(double sigma1, double beta1, double sigma2, double beta2) {
    require_cev_params(sigma1, beta1);
    require_cev_params(sigma2, beta2);
    DiffusionModel m;
    m.dim = 2;
    CevSpec s1{sigma1, beta1};
    CevSpec s2{sigma2, beta2};
    m.alpha = {cev_fn(s1), cev_fn(s2)};
    m.cev = {s1, s2};
    m.growth_constant = std::max(sigma1, sigma2);
    m.name = "cev2d";
    return m;
}

DiffusionModel make_table_model(std::vector<double> xs, std::vector<double> alphas) {
    if (xs.size() < 2 || xs.size() != alphas.size())
        throw std::invalid_argument("make_table_model: need matching xs/alphas with >= 2 knots");
    if (xs.front() != 0.0 || alphas.front() != 0.0)
        throw std::invalid_argument("make_table_model: table must start at (0, 0)");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("make_table_model: xs must be strictly increasing");
    for (double a : alphas)
        if (!(a >= 0.0))
            throw std::invalid_argument("make_table_model: alphas must be nonnegative");

    double growth = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        growth = std::max(growth, alphas[i] / (1.0 + xs[i]));

    auto interp = [xs = std::move(xs), alphas = std::move(alphas)](double x, double) {
        if (x <= 0.0) return 0.0;
        if (x >= xs.back()) return alphas.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        std::size_t lo = hi - 1;
        const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return alphas[lo] + w * (alphas[hi] - alphas[lo]);
    };

    DiffusionModel m;
    m.dim = 1;
    m.alpha = {std::move(interp)};
    m.cev = {std::nullopt};
    m.growth_constant = growth;
    m.name = "custom-table";
    return m;
}

DiffusionModel make_custom_model(CoefFn alpha, double growth_constant, std::string name) {
    DiffusionModel m;
    m.dim = 1;
    m.alpha = {std::move(alpha)};
    m.cev = {std::nullopt};
    m.growth_constant = growth_constant;
    m.name = std::move(name);
    return m;
}

Payoff payoff_library(const std::string& name, const PayoffParams& params) {
    Payoff p;
    p.name = name;
    if (name == "call") {
        const double K = params.strike;
        if (!(K > 0.0)) throw std::invalid_argument("payoff call: strike must be positive");
        p.g1 = [K](double x) { return std::max(x - K, 0.0); };
        p.growth_degree = 1.0;
        p.is_convex = true;
        p.gprime0 = 0.0;
    } else if (name == "power") {
        const double g = params.gamma;
        if (!(g > 0.0)) throw std::invalid_argument("payoff power: gamma must be positive");
        p.g1 = [g](double x) { return x <= 0.0 ? 0.0 : std::pow(x, g); };
        p.growth_degree = std::max(g, 1.0);
        p.is_convex = g >= 1.0;
        if (g > 1.0)
            p.gprime0 = 0.0;
        else if (g == 1.0)
            p.gprime0 = 1.0;
        // gamma < 1: derivative at 0+ does not exist; leave unset.
    } else if (name == "affine") {
        const double a = params.intercept, b = params.slope;
        p.g1 = [a, b](double x) { return a + b * x; };
        p.growth_degree = 1.0;
        p.is_convex = true;
        p.gprime0 = b;
    } else if (name == "affine-plus-call") {
        const double a = params.intercept, b = params.slope, K = params.strike;
        if (!(K > 0.0)) throw std::invalid_argument("payoff affine-plus-call: strike must be positive");
        p.g1 = [a, b, K](double x) { return a + b * x + std::max(x - K, 0.0); };
        p.growth_degree = 1.0;
        p.is_convex = true;
        p.gprime0 = b;
    } else if (name == "exchange") {
        p.dim = 2;
        p.g2 = [](double x1, double x2) { return std::max(x2 - x1, 0.0); };
        p.growth_degree = 1.0;
        p.is_convex = true;
    } else if (name == "max") {
        p.dim = 2;
        p.g2 = [](double x1, double x2) { return std::max(x1, x2); };
        p.growth_degree = 1.0;
        p.is_convex = true;
    } else {
        throw std::invalid_argument("payoff_library: unknown payoff '" + name + "'");
    }
    return p;
}

SampleGrid default_sample_grid(double xmax, double tmax, std::size_t nx) {
    SampleGrid g;
    g.xs.push_back(0.0);
    // geometric ladder ending at xmax
    const double lo = xmax * 1e-6;
    for (std::size_t k = 0; k < nx; ++k) {
        const double w = static_cast<double>(k) / static_cast<double>(nx - 1);
        g.xs.push_back(lo * std::pow(xmax / lo, w));
    }
    g.ts = {0.0, 0.5 * tmax, tmax};
    return g;
}

bool HypothesisReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionCheck& c) { return c.pass; });
}

HypothesisReport validate_hypothesis(const DiffusionModel& model, const SampleGrid& grid) {
    if (grid.xs.empty() || grid.ts.empty())
        throw std::invalid_argument("validate_hypothesis: empty sample grid");

    ConditionCheck growth{"growth |alpha| <= C(1+x)"};
    ConditionCheck absorption{"absorption alpha(0,t) = 0"};
    ConditionCheck rank{"rank: alpha(x,t) != 0 for x > 0"};
    growth.worst_value = -std::numeric_limits<double>::infinity();

    for (int i = 0; i < model.dim; ++i) {
        for (double t : grid.ts) {
            for (double x : grid.xs) {
                const double al = model.alpha_at(i, x, t);
                const double bound = model.growth_constant * (1.0 + x);
                const double excess = std::fabs(al) - bound;
                if (excess > growth.worst_value) {
                    growth.worst_value = excess;
                    growth.worst_x = x;
                    growth.worst_t = t;
                }
                if (excess > 0.0) growth.pass = false;
                if (x == 0.0 && al != 0.0) {
                    absorption.pass = false;
                    absorption.worst_value = al;
                    absorption.worst_t = t;
                }
                if (x > 0.0 && al == 0.0) {
                    rank.pass = false;
                    rank.worst_x = x;
                    rank.worst_t = t;
                }
            }
        }
    }

    HypothesisReport rep;
    rep.conditions = {growth, absorption, rank};
    return rep;
}

namespace {

BoundCheck lower_bound_check(const CoefFn& coef, double C, double exponent,
                             const SampleGrid& grid) {
    BoundCheck out;
    out.worst_gap = std::numeric_limits<double>::infinity();
    for (double t : grid.ts) {
        for (double x : grid.xs) {
            if (!(x > 0.0)) continue;
            const double gap = coef(x, t) + C * std::pow(x, exponent);
            if (gap < out.worst_gap) {
                out.worst_gap = gap;
                out.worst_x = x;
                out.worst_t = t;
            }
        }
    }
    out.holds = out.worst_gap >= 0.0;
    return out;
}

} // namespace

BoundCheck check_drift_lower_bound(const LowerOrderTerms& lot, const SampleGrid& grid) {
    return lower_bound_check(lot.b, lot.bound_constant, lot.beta - 1.0 + lot.bound_delta, grid);
}

BoundCheck check_zeroth_lower_bound(const LowerOrderTerms& lot, const SampleGrid& grid) {
    return lower_bound_check(lot.c, lot.bound_constant, lot.beta - 2.0 + lot.bound_delta, grid);
}

} // namespace deltalab
