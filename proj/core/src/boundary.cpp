#include "deltalab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace deltalab {

namespace {

struct Ladder {
    std::vector<double> eps; // coarse to fine
    std::vector<double> q;
};

DeltaEstimate estimate_from_ladder(Ladder lad, const DeltaOptions& opt) {
    const std::size_t n = lad.eps.size();
    DeltaEstimate est;
    est.spacings = lad.eps;
    est.quotients = lad.q;

    // divergence test on the three finest consecutive refinements
    bool grows = n >= 4;
    for (std::size_t k = n - 4; grows && k + 1 < n; ++k)
        grows = std::fabs(lad.q[k + 1]) > opt.divergence_ratio * std::fabs(lad.q[k]);
    if (grows && std::fabs(lad.q[n - 1]) > opt.divergence_floor) {
        est.verdict = DeltaVerdict::Divergent;
        est.value = std::numeric_limits<double>::quiet_NaN();
        est.residual = std::numeric_limits<double>::quiet_NaN();
        est.extrapolation_order = 0;
        return est;
    }

    // Neville extrapolation of q(eps) to eps = 0, coarse points first
    std::vector<double> p = lad.q;
    double prev = p[0];
    double last = p[0];
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i + j < n; ++i)
            p[i] = (lad.eps[i] * p[i + 1] - lad.eps[i + j] * p[i]) /
                   (lad.eps[i] - lad.eps[i + j]);
        prev = last;
        last = p[0];
    }
    est.value = last;
    est.residual = std::fabs(last - prev);
    est.extrapolation_order = static_cast<int>(n) - 1;
    return est;
}

} // namespace

DeltaEstimate boundary_delta_values(std::span<const double> x, std::span<const double> u,
                                    const DeltaOptions& options) {
    if (x.size() != u.size() || x.size() < 3)
        throw std::invalid_argument("boundary_delta_values: mismatched or tiny arrays");
    const double probe = options.x_probe > 0.0 ? options.x_probe : x.back() / 100.0;

    std::size_t jmax = 1;
    while (2 * jmax < x.size() - 1 && x[2 * jmax] <= probe) jmax *= 2;

    Ladder lad;
    for (std::size_t j = jmax; j >= 1 && lad.eps.size() < options.levels; j /= 2) {
        lad.eps.push_back(x[j]);
        lad.q.push_back((u[j] - u[0]) / x[j]);
    }
    if (lad.eps.size() < 4)
        throw std::invalid_argument(
            "boundary_delta: fewer than 4 grid nodes inside the probe window; refine the "
            "grid near x = 0 instead of extrapolating");
    return estimate_from_ladder(std::move(lad), options);
}

DeltaEstimate boundary_delta(const Solution1D& sol, double t, const DeltaOptions& options) {
    return boundary_delta_values(sol.grid.nodes, sol.at_time(t), options);
}

DeltaEstimate boundary_delta(const std::function<double(double)>& u_of_x, double eps0,
                             const DeltaOptions& options) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("boundary_delta: eps0 must be > 0");
    const double u0 = u_of_x(0.0);
    Ladder lad;
    double eps = eps0;
    for (std::size_t k = 0; k < options.levels; ++k, eps *= 0.25) {
        lad.eps.push_back(eps);
        lad.q.push_back((u_of_x(eps) - u0) / eps);
    }
    return estimate_from_ladder(std::move(lad), options);
}

DeltaEstimate boundary_delta_x1(const Solution2D& sol, double x2, double t,
                                const DeltaOptions& options) {
    const auto line = sol.line_along_x1(sol.stored_index_of(t), x2);
    return boundary_delta_values(sol.grid1.nodes, line, options);
}

DeltaEstimate boundary_delta_x2(const Solution2D& sol, double x1, double t,
                                const DeltaOptions& options) {
    const auto line = sol.line_along_x2(sol.stored_index_of(t), x1);
    return boundary_delta_values(sol.grid2.nodes, line, options);
}

Solution1D run_solve(const DiffusionModel& model, const Payoff& payoff, double horizon,
                     const SolverSetup& setup) {
    const Grid1D grid = build_grid(setup.xmax, setup.m, setup.grading, setup.snap);
    const TimeGrid tgrid = uniform_time_grid(horizon, setup.steps);
    SolveOptions opts;
    opts.theta = setup.theta;
    opts.far_field = setup.far_field;
    opts.startup_implicit_steps = setup.startup_implicit_steps;
    return solve_1d(model, payoff, grid, tgrid, opts);
}

std::vector<SweepRow> hopf_sweep(std::span<const double> betas, double sigma,
                                 const Payoff& payoff, double t, const SolverSetup& setup) {
    std::vector<std::future<DeltaEstimate>> futs;
    futs.reserve(betas.size());
    for (double beta : betas) {
        futs.push_back(std::async(std::launch::async, [&, beta] {
            const DiffusionModel model = make_cev(sigma, beta);
            const Solution1D sol = run_solve(model, payoff, t, setup);
            return boundary_delta(sol, t);
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i)
        rows.push_back({betas[i], futs[i].get()});
    return rows;
}

bool GprimeReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const GprimeRow& r) { return r.pass; });
}

GprimeReport check_gprime_match(const DiffusionModel& model, double quadratic_bound_C,
                                const Payoff& payoff, std::span<const double> times,
                                const SolverSetup& setup, double tolerance) {
    if (!payoff.gprime0)
        throw std::invalid_argument("check_gprime_match: payoff has no declared g'(0)");
    const SampleGrid samples = default_sample_grid(setup.xmax, 1.0);
    for (double tt : samples.ts)
        for (double xx : samples.xs)
            if (model.a1(xx, tt) > quadratic_bound_C * xx * xx * (1.0 + 1e-12))
                throw std::invalid_argument(
                    "check_gprime_match: model violates a(x,t) <= C x^2 at sampled points");

    const double horizon = *std::max_element(times.begin(), times.end());
    const Solution1D sol = run_solve(model, payoff, horizon, setup);

    GprimeReport rep;
    rep.gprime0 = *payoff.gprime0;
    rep.tolerance = tolerance;
    for (double t : times) {
        const DeltaEstimate est = boundary_delta(sol, t);
        GprimeRow row;
        row.t = t;
        row.delta = est.value;
        row.abs_error = std::fabs(est.value - rep.gprime0);
        row.pass = !est.divergent() && row.abs_error <= tolerance;
        rep.rows.push_back(row);
    }
    return rep;
}

DeltaCurve analyze_delta_curve(std::vector<double> times, std::vector<DeltaEstimate> deltas) {
    DeltaCurve curve;
    curve.times = std::move(times);
    curve.deltas = std::move(deltas);

    std::vector<double> increments;
    double max_residual = 0.0;
    for (std::size_t k = 0; k + 1 < curve.deltas.size(); ++k) {
        const auto& d0 = curve.deltas[k];
        const auto& d1 = curve.deltas[k + 1];
        if (d0.divergent() || d1.divergent()) continue;
        increments.push_back(d1.value - d0.value);
        curve.max_monotonicity_violation =
            std::max(curve.max_monotonicity_violation, d0.value - d1.value);
        max_residual = std::max(max_residual, std::max(d0.residual, d1.residual));
    }
    if (increments.empty()) return curve;

    std::vector<double> mags;
    mags.reserve(increments.size());
    for (double d : increments) mags.push_back(std::fabs(d));
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double median = mags[mags.size() / 2];
    const double threshold = 20.0 * median + 10.0 * max_residual + 1e-6;
    for (std::size_t k = 0; k < increments.size(); ++k)
        if (std::fabs(increments[k]) > threshold) curve.jump_candidates.push_back(k);
    return curve;
}

DeltaCurve boundary_delta_in_time(const Solution1D& sol, std::span<const double> times,
                                  const DeltaOptions& options) {
    std::vector<DeltaEstimate> deltas;
    deltas.reserve(times.size());
    for (double t : times) deltas.push_back(boundary_delta(sol, t, options));
    return analyze_delta_curve(std::vector<double>(times.begin(), times.end()),
                               std::move(deltas));
}

} // namespace deltalab
