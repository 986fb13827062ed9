#include "deltalab/experiment.hpp"

#include "deltalab/analytic.hpp"
#include "deltalab/barrier.hpp"
#include "deltalab/boundary.hpp"
#include "deltalab/csv.hpp"
#include "deltalab/errors.hpp"
#include "deltalab/models.hpp"
#include "deltalab/monte_carlo.hpp"
#include "deltalab/patched.hpp"
#include "deltalab/refine.hpp"
#include "deltalab/solver1d.hpp"
#include "deltalab/solver2d.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace deltalab {

using nlohmann::json;

namespace {

const json& doc_of(const ExperimentConfig& c) {
    return *static_cast<const json*>(c.doc.get());
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

const json& require_block(const json& j, const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config is missing the required '" + key + "' block");
    return j.at(key);
}

double require_tol(const json& j, const std::string& key, double fallback) {
    const double v = get_or(j, key, fallback);
    if (!(v > 0.0)) throw ConfigError("config tolerance '" + key + "' must be > 0");
    return v;
}

const std::set<std::string> kKinds = {
    "price",   "delta",          "sweep",   "gprime-check", "margrabe", "counterexample",
    "barrier", "sharpness",      "mc-crosscheck", "refine",  "properties"};

ExperimentConfig::Model parse_model(const json& j) {
    ExperimentConfig::Model m;
    m.kind = get_or<std::string>(j, "kind", "cev");
    if (m.kind != "cev" && m.kind != "gbm" && m.kind != "custom-table")
        throw ConfigError("model.kind must be cev, gbm or custom-table");
    m.sigma = get_or(j, "sigma", 1.0);
    m.beta = get_or(j, "beta", m.kind == "gbm" ? 2.0 : 1.0);
    m.table_x = get_or(j, "x", std::vector<double>{});
    m.table_alpha = get_or(j, "alpha", std::vector<double>{});
    if (m.kind == "custom-table" && (m.table_x.empty() || m.table_alpha.empty()))
        throw ConfigError("custom-table model needs 'x' and 'alpha' arrays");
    return m;
}

ExperimentConfig::PayoffSpec parse_payoff(const json& j) {
    ExperimentConfig::PayoffSpec p;
    p.kind = get_or<std::string>(j, "kind", "call");
    p.strike = get_or(j, "strike", 1.0);
    p.gamma = get_or(j, "gamma", 1.0);
    p.slope = get_or(j, "slope", 1.0);
    p.intercept = get_or(j, "intercept", 0.0);
    return p;
}

DiffusionModel build_model(const ExperimentConfig::Model& m) {
    if (m.kind == "cev") return make_cev(m.sigma, m.beta);
    if (m.kind == "gbm") return make_gbm(m.sigma);
    return make_table_model(m.table_x, m.table_alpha);
}

Payoff build_payoff(const ExperimentConfig::PayoffSpec& p) {
    PayoffParams params;
    params.strike = p.strike;
    params.gamma = p.gamma;
    params.slope = p.slope;
    params.intercept = p.intercept;
    return payoff_library(p.kind, params);
}

SolverSetup build_setup(const ExperimentConfig& c) {
    SolverSetup s;
    s.xmax = c.grid.xmax;
    s.m = c.grid.m;
    s.grading = c.grid.p;
    s.snap = c.grid.snap;
    s.steps = c.time.steps;
    s.theta = c.time.theta;
    return s;
}

std::string metadata_line(const ExperimentConfig& c) {
    return std::string("deltalab=") + kVersion + " seed=" + std::to_string(c.seed) +
           " config=" + csv::hex64(csv::fnv1a(c.canonical));
}

void check(RunResult& r, const std::string& name, bool pass, double value,
           std::string detail = "") {
    r.assertions.push_back({name, pass, value, std::move(detail)});
    if (!pass && r.status == 0) r.status = 1;
}

std::string verdict_str(const DeltaEstimate& e) {
    return e.divergent() ? "divergent" : "finite";
}

std::filesystem::path open_path(const std::filesystem::path& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return dir / file;
}

// ---------------------------------------------------------------- price ---

void run_price(const ExperimentConfig& c, const std::filesystem::path& out_dir,
               RunResult& r) {
    const json& doc = doc_of(c);
    const DiffusionModel model = build_model(c.model);
    const Payoff payoff = build_payoff(c.payoff);
    const Solution1D sol = run_solve(model, payoff, c.time.horizon, build_setup(c));

    std::vector<double> record = get_or(doc, "record_times",
                                        std::vector<double>{c.time.horizon});
    csv::Writer w(open_path(out_dir, c.output), metadata_line(c), {"t", "x", "u"});
    for (double t : record) {
        const auto u = sol.at_time(t);
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            w.row({csv::fmt(t), csv::fmt(sol.grid[i]), csv::fmt(u[i])});
    }
    w.close();
    r.output_files.push_back(c.output);

    if (doc.contains("check")) {
        const json& chk = doc.at("check");
        const std::string ref = get_or<std::string>(chk, "reference", "none");
        if (ref != "none") {
            const double rel_tol = require_tol(chk, "rel_tol", 0.005);
            const double xcheck = get_or(chk, "xcheck", c.grid.xmax);
            const bool all_times = get_or(chk, "all_times", true);
            auto oracle = [&](double x, double t) {
                if (ref == "power") return power_option_price(x, t, c.payoff.gamma).value;
                if (ref == "bs-call") return bs_call_price(x, t, c.model.sigma, c.payoff.strike);
                throw ConfigError("price check.reference must be power, bs-call or none");
            };
            double worst = 0.0;
            const std::size_t n0 = all_times ? 1 : sol.tgrid.steps();
            for (std::size_t n = n0; n <= sol.tgrid.steps(); ++n) {
                const double t = sol.tgrid.times[n];
                const auto u = sol.at_level(n);
                for (std::size_t i = 1; i < sol.grid.size(); ++i) {
                    const double x = sol.grid[i];
                    if (x > xcheck) break;
                    const double ex = oracle(x, t);
                    if (ex != 0.0) worst = std::max(worst, std::fabs(u[i] - ex) / std::fabs(ex));
                }
            }
            check(r, "max_rel_error_vs_" + ref, worst <= rel_tol, worst,
                  "window (0," + csv::fmt(xcheck) + "]");
        }
    }
}

// ---------------------------------------------------------------- delta ---

void run_delta(const ExperimentConfig& c, const std::filesystem::path& out_dir,
               RunResult& r) {
    const json& doc = doc_of(c);
    const Payoff payoff = build_payoff(c.payoff);
    const std::vector<double> times = get_or(doc, "times", std::vector<double>{c.time.horizon});
    const std::size_t refinements = get_or<std::size_t>(doc, "refinements", 0);

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"m", "t", "delta", "residual", "verdict"});
    std::vector<double> finest;
    std::vector<std::vector<double>> per_level;
    for (std::size_t L = 0; L <= refinements; ++L) {
        SolverSetup setup = build_setup(c);
        setup.m = ((setup.m - 1) << L) + 1;
        setup.steps = setup.steps << L;
        const DiffusionModel model = build_model(c.model);
        const Solution1D sol = run_solve(model, payoff, c.time.horizon, setup);
        std::vector<double> level_vals;
        for (double t : times) {
            const DeltaEstimate est = boundary_delta(sol, t);
            w.row({csv::fmt(setup.m), csv::fmt(t), csv::fmt(est.value),
                   csv::fmt(est.residual), verdict_str(est)});
            level_vals.push_back(est.divergent() ? std::numeric_limits<double>::quiet_NaN()
                                                 : est.value);
            if (L == refinements) {
                if (get_or<std::string>(doc, "expect_verdict", "finite") == "divergent") {
                    check(r, "verdict_divergent@t=" + csv::fmt(t), est.divergent(),
                          est.quotients.empty() ? 0.0 : est.quotients.back());
                    continue;
                }
                check(r, "verdict_finite@t=" + csv::fmt(t), !est.divergent(), est.value);
                if (doc.contains("expect")) {
                    const double expect = doc.at("expect").get<double>();
                    if (doc.contains("rel_tol")) {
                        const double tol = require_tol(doc, "rel_tol", 0.02);
                        const double rel = std::fabs(est.value - expect) / std::fabs(expect);
                        check(r, "delta_rel_error@t=" + csv::fmt(t), rel <= tol, rel,
                              "expect " + csv::fmt(expect));
                    } else {
                        const double tol = require_tol(doc, "abs_tol", 1e-3);
                        const double err = std::fabs(est.value - expect);
                        check(r, "delta_abs_error@t=" + csv::fmt(t), err <= tol, err,
                              "expect " + csv::fmt(expect));
                    }
                }
            }
        }
        per_level.push_back(level_vals);
    }
    w.close();
    r.output_files.push_back(c.output);

    if (refinements >= 1) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            bool decreasing = true;
            for (std::size_t L = 0; L + 1 < per_level.size(); ++L) {
                const double a = std::fabs(per_level[L][k]);
                const double b = std::fabs(per_level[L + 1][k]);
                if (!(b <= a || b <= 1e-9)) decreasing = false;
            }
            check(r, "delta_decreases_under_refinement@t=" + csv::fmt(times[k]), decreasing,
                  std::fabs(per_level.back()[k]));
        }
    }
}

// ---------------------------------------------------------------- sweep ---

void run_sweep(const ExperimentConfig& c, const std::filesystem::path& out_dir,
               RunResult& r) {
    const json& doc = doc_of(c);
    const std::vector<double> betas =
        get_or(doc, "betas", std::vector<double>{0.0, 0.5, 1.0, 1.5});
    const Payoff payoff = build_payoff(c.payoff);
    const double t = c.time.horizon;

    const auto rows = hopf_sweep(betas, c.model.sigma, payoff, t, build_setup(c));

    const double margin_factor = get_or(doc, "positive_margin_factor", 10.0);
    const double beta2_tol = require_tol(doc, "beta2_abs_tol", 1e-3);

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"beta", "delta", "residual", "verdict"});
    for (const auto& row : rows) {
        w.row({csv::fmt(row.beta), csv::fmt(row.delta.value), csv::fmt(row.delta.residual),
               verdict_str(row.delta)});
        if (row.beta < 2.0) {
            const bool pos = !row.delta.divergent() && row.delta.value > 0.0 &&
                             row.delta.value > margin_factor * row.delta.residual;
            check(r, "positive_delta@beta=" + csv::fmt(row.beta), pos, row.delta.value,
                  "residual " + csv::fmt(row.delta.residual));
        } else {
            const bool zero = !row.delta.divergent() && std::fabs(row.delta.value) <= beta2_tol;
            check(r, "vanishing_delta@beta=2", zero, row.delta.value);
        }
    }
    w.close();
    r.output_files.push_back(c.output);
}

// --------------------------------------------------------- gprime-check ---

void run_gprime(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                RunResult& r) {
    const json& doc = doc_of(c);
    const DiffusionModel model = build_model(c.model);
    const Payoff payoff = build_payoff(c.payoff);
    const std::vector<double> times =
        get_or(doc, "times", std::vector<double>{0.25, 0.5, 1.0});
    const double tol = require_tol(doc, "tolerance", 1e-3);
    double quad_C = get_or(doc, "quadratic_bound_C", 0.0);
    if (quad_C <= 0.0) {
        if (c.model.kind == "gbm" || (c.model.kind == "cev" && c.model.beta == 2.0))
            quad_C = 0.5 * c.model.sigma * c.model.sigma;
        else
            throw ConfigError("gprime-check: quadratic_bound_C required for this model");
    }

    const GprimeReport rep = check_gprime_match(model, quad_C, payoff, times, build_setup(c), tol);

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"t", "delta", "gprime0", "abs_error", "pass"});
    for (const auto& row : rep.rows) {
        w.row({csv::fmt(row.t), csv::fmt(row.delta), csv::fmt(rep.gprime0),
               csv::fmt(row.abs_error), row.pass ? "1" : "0"});
        check(r, "delta_matches_gprime@t=" + csv::fmt(row.t), row.pass, row.delta,
              "target " + csv::fmt(rep.gprime0));
    }
    w.close();
    r.output_files.push_back(c.output);
}

// ------------------------------------------------------------- margrabe ---

void run_margrabe(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                  RunResult& r) {
    const json& doc = doc_of(c);
    const json& variants = require_block(doc, "variants");

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"variant", "quantity", "value", "residual", "verdict"});

    const Grid1D grid = build_grid(c.grid.xmax, c.grid.m, c.grid.p, c.grid.snap);
    const TimeGrid tgrid = uniform_time_grid(c.time.horizon, c.time.steps);
    Solve2DOptions opts;
    opts.theta = c.time.theta;
    opts.record_every = c.time.steps; // final level only

    const Payoff payoff = payoff_library("exchange");
    for (const auto& var : variants) {
        const std::string vname = get_or<std::string>(var, "name", "variant");
        const double s1 = get_or(var, "sigma1", 0.2), s2 = get_or(var, "sigma2", 0.2);
        const double b1 = get_or(var, "beta1", 2.0), b2 = get_or(var, "beta2", 2.0);
        const DiffusionModel model = make_cev_2d(s1, b1, s2, b2);
        const Solution2D sol = solve_2d_with_faces(model, payoff, grid, grid, tgrid, opts);
        const double t = c.time.horizon;

        const json& chk = require_block(var, "checks");
        const double x2q = get_or(chk, "x2", 1.0);
        const double x1q = get_or(chk, "x1", 1.0);
        const DeltaEstimate d1 = boundary_delta_x1(sol, x2q, t);
        const DeltaEstimate d2 = boundary_delta_x2(sol, x1q, t);
        w.row({vname, "u_x1(0," + csv::fmt(x2q) + ")", csv::fmt(d1.value),
               csv::fmt(d1.residual), verdict_str(d1)});
        w.row({vname, "u_x2(" + csv::fmt(x1q) + ",0)", csv::fmt(d2.value),
               csv::fmt(d2.residual), verdict_str(d2)});

        if (chk.contains("dx1_target")) {
            const double target = chk.at("dx1_target").get<double>();
            const double tol = require_tol(chk, "dx1_tol", 0.02);
            check(r, vname + ":u_x1(0,x2)", std::fabs(d1.value - target) <= tol, d1.value,
                  "target " + csv::fmt(target));
        }
        if (chk.contains("dx2_target")) {
            const double target = chk.at("dx2_target").get<double>();
            const double tol = require_tol(chk, "dx2_tol", 0.01);
            check(r, vname + ":u_x2(x1,0)", std::fabs(d2.value - target) <= tol, d2.value,
                  "target " + csv::fmt(target));
        }
        if (chk.contains("dx1_gt"))
            check(r, vname + ":u_x1(0,x2)>bound", d1.value > chk.at("dx1_gt").get<double>(),
                  d1.value, "bound " + csv::fmt(chk.at("dx1_gt").get<double>()));
        if (chk.contains("dx2_gt"))
            check(r, vname + ":u_x2(x1,0)>bound", d2.value > chk.at("dx2_gt").get<double>(),
                  d2.value, "bound " + csv::fmt(chk.at("dx2_gt").get<double>()));

        if (get_or(chk, "price_ref", false) && b1 == 2.0 && b2 == 2.0) {
            const std::size_t i1 = sol.grid1.nearest(x1q);
            const std::size_t j1 = sol.grid2.nearest(x2q);
            const double got = sol.value(sol.values.size() - 1, i1, j1);
            const double ref = margrabe_price(sol.grid1[i1], sol.grid2[j1], t, s1, s2);
            const double rel = std::fabs(got - ref) / std::fabs(ref);
            const double tol = require_tol(chk, "price_rel_tol", 0.01);
            w.row({vname, "price(" + csv::fmt(x1q) + "," + csv::fmt(x2q) + ")", csv::fmt(got),
                   csv::fmt(rel), "finite"});
            check(r, vname + ":price_vs_closed_form", rel <= tol, got,
                  "ref " + csv::fmt(ref));
        }
    }
    w.close();
    r.output_files.push_back(c.output);
}

// ------------------------------------------------------- counterexample ---

void run_counterexample(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                        RunResult& r) {
    const json& doc = doc_of(c);
    const double t0 = get_or(doc, "t0", 0.5);
    const Grid1D grid = build_grid(c.grid.xmax, c.grid.m, c.grid.p, c.grid.snap);
    const TimeGrid tgrid = uniform_time_grid(c.time.horizon, c.time.steps);
    SolveOptions opts;
    opts.theta = c.time.theta;

    const PatchedExample ex = build_patched_counterexample(t0, grid, tgrid, opts);
    for (const auto& violation : ex.h_violations)
        check(r, "transition_h:" + violation, false, 0.0);

    std::vector<double> curve_times = get_or(doc, "curve_times", std::vector<double>{});
    if (curve_times.empty()) {
        const std::size_t every = std::max<std::size_t>(1, c.time.steps / 32);
        for (std::size_t n = 0; n <= c.time.steps; n += every)
            curve_times.push_back(tgrid.times[n]);
    }
    const DeltaCurve curve = patched_delta_curve(ex, curve_times);

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"t", "delta", "residual", "verdict"});
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        w.row({csv::fmt(curve.times[k]), csv::fmt(curve.deltas[k].value),
               csv::fmt(curve.deltas[k].residual), verdict_str(curve.deltas[k])});
    w.close();
    r.output_files.push_back(c.output);

    const double pre_tol = require_tol(doc, "pre_tol", 1e-3);
    double worst_pre = 0.0;
    for (double t = 0.5 * t0; t < t0 - 1e-12; t += t0 / 32.0)
        worst_pre = std::max(worst_pre, std::fabs(ex.delta_at(t).value));
    check(r, "flat_delta_before_patch", worst_pre <= pre_tol, worst_pre,
          "window [t0/2, t0)");

    const double post_at = get_or(doc, "post_at", t0 + 0.05);
    const double post_min = get_or(doc, "post_min", 0.9);
    const double post = ex.delta_at(post_at).value;
    check(r, "jump_delta_after_patch", post >= post_min, post,
          "at t = " + csv::fmt(post_at));

    const double res_tol = require_tol(doc, "residual_tol", 1e-8);
    const std::size_t samples = get_or<std::size_t>(doc, "residual_samples", 100);
    double worst_res = 0.0;
    const std::size_t nx = 10, nt = (samples + nx - 1) / nx;
    for (std::size_t i = 1; i <= nx; ++i) {
        const double x = 2.0 * std::pow(10.0, -3.0 + 3.0 * static_cast<double>(i) / nx);
        for (std::size_t j = 1; j <= nt; ++j) {
            const double t = t0 * (0.05 + 0.9 * static_cast<double>(j - 1) /
                                              std::max<std::size_t>(nt - 1, 1));
            worst_res = std::max(worst_res, std::fabs(ex.v_residual(x, t)));
        }
    }
    check(r, "exact_piece_pde_residual", worst_res <= res_tol, worst_res);

    bool jump_found = false;
    for (std::size_t k : curve.jump_candidates)
        if (curve.times[k] < t0 && curve.times[k + 1] >= t0 - 1e-12) jump_found = true;
    check(r, "discontinuity_detected_at_t0", jump_found,
          static_cast<double>(curve.jump_candidates.size()));
    check(r, "upward_jumps_only", curve.max_monotonicity_violation <= 1e-6,
          curve.max_monotonicity_violation);
}

// -------------------------------------------------------------- barrier ---

void run_barrier(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                 RunResult& r) {
    const json& doc = doc_of(c);
    const std::vector<double> betas =
        get_or(doc, "betas", std::vector<double>{0.0, 0.5, 1.0, 1.5});
    const std::size_t density = get_or<std::size_t>(doc, "density", 200);
    const double eta_min = get_or(doc, "eta_min", 1e-3);
    const double sigma = c.model.sigma;

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"beta", "epsilon", "N", "eta", "min_residual", "samples", "pass"});
    for (double beta : betas) {
        const auto [eps, N] = choose_barrier_params(beta);
        BarrierParams params;
        params.beta = beta;
        params.C = 0.5 * sigma * sigma;
        params.epsilon = eps;
        params.N = N;
        params.eta = get_or(doc, "eta", 0.5);
        params.t0 = c.time.horizon;
        const DiffusionModel model = make_cev(sigma, beta);
        const BarrierReport rep = verify_barrier_degenhopf(model, params, density);
        w.row({csv::fmt(beta), csv::fmt(eps), csv::fmt(N), csv::fmt(rep.eta_used),
               csv::fmt(rep.min_residual), csv::fmt(rep.samples), rep.pass ? "1" : "0"});
        check(r, "barrier_certificate@beta=" + csv::fmt(beta),
              rep.pass && rep.eta_used >= eta_min, rep.min_residual,
              "eta " + csv::fmt(rep.eta_used));
    }
    w.close();
    r.output_files.push_back(c.output);

    std::vector<std::string> detail_columns = {"part", "quantity", "value"};
    const std::string detail_name = c.name + "_details.csv";
    csv::Writer d(open_path(out_dir, detail_name), metadata_line(c), detail_columns);

    if (doc.contains("supersolution")) {
        const json& sj = doc.at("supersolution");
        const double C = get_or(sj, "C", 1.0);
        const double N = get_or(sj, "N", 2.0);
        const double eps = get_or(sj, "epsilon", 0.1);
        const double xmax = get_or(sj, "xmax", 50.0);
        Payoff g = build_payoff(c.payoff);
        double C1 = get_or(sj, "C1", 0.0);
        if (C1 <= 0.0) C1 = find_domination_constant(g, eps, N, xmax);
        double C2 = get_or(sj, "C2", 0.0);
        if (C2 <= 0.0) C2 = 4.0 * C * C1 * N * (N - 1.0);
        const SupersolutionReport rep =
            verify_supersolution_neghopf(C, g, eps, N, C1, C2, xmax);
        d.row({"supersolution", "t0", csv::fmt(rep.t0)});
        d.row({"supersolution", "C1", csv::fmt(rep.C1)});
        d.row({"supersolution", "C2", csv::fmt(rep.C2)});
        d.row({"supersolution", "domination_min", csv::fmt(rep.domination_min)});
        d.row({"supersolution", "residual_min", csv::fmt(rep.residual_min)});
        check(r, "supersolution_domination", rep.domination_pass, rep.domination_min);
        check(r, "supersolution_residual", rep.residual_pass, rep.residual_min);
        check(r, "supersolution_c2_rule", rep.c2_sufficient, rep.C2);
        const double expected_t0 = 1.0 / (2.0 * C * (N * N - N));
        check(r, "supersolution_t0_exact", rep.t0 == expected_t0, rep.t0);
    }

    if (get_or(doc, "sharpness", false)) {
        const SharpnessReport rep = sharpness_residuals();
        d.row({"sharpness", "max_residual_system1", csv::fmt(rep.max_residual_system1)});
        d.row({"sharpness", "max_residual_system2", csv::fmt(rep.max_residual_system2)});
        d.row({"sharpness", "boundary_delta", csv::fmt(rep.boundary_delta)});
        const double tol = require_tol(doc, "sharpness_tol", 1e-12);
        check(r, "sharpness_residual_system1", rep.max_residual_system1 <= tol,
              rep.max_residual_system1);
        check(r, "sharpness_residual_system2", rep.max_residual_system2 <= tol,
              rep.max_residual_system2);
        check(r, "sharpness_drift_bound_fails", rep.drift_bound_fails,
              rep.drift_witness.worst_gap);
        check(r, "sharpness_zeroth_bound_fails", rep.zeroth_bound_fails,
              rep.zeroth_witness.worst_gap);
    }
    d.close();
    r.output_files.push_back(detail_name);
}

// ------------------------------------------------------------ sharpness ---

void run_sharpness(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                   RunResult& r) {
    const json& doc = doc_of(c);
    const SharpnessReport rep = sharpness_residuals();
    csv::Writer w(open_path(out_dir, c.output), metadata_line(c), {"quantity", "value"});
    w.row({"max_residual_system1", csv::fmt(rep.max_residual_system1)});
    w.row({"max_residual_system2", csv::fmt(rep.max_residual_system2)});
    w.row({"boundary_delta", csv::fmt(rep.boundary_delta)});
    w.row({"drift_bound_fails", rep.drift_bound_fails ? "1" : "0"});
    w.row({"zeroth_bound_fails", rep.zeroth_bound_fails ? "1" : "0"});
    w.close();
    r.output_files.push_back(c.output);
    const double tol = require_tol(doc, "tolerance", 1e-12);
    check(r, "residual_system1", rep.max_residual_system1 <= tol, rep.max_residual_system1);
    check(r, "residual_system2", rep.max_residual_system2 <= tol, rep.max_residual_system2);
    check(r, "drift_bound_fails", rep.drift_bound_fails, rep.drift_witness.worst_gap);
    check(r, "zeroth_bound_fails", rep.zeroth_bound_fails, rep.zeroth_witness.worst_gap);
}

// --------------------------------------------------------- mc-crosscheck ---

void run_mc_crosscheck(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                       RunResult& r) {
    const json& doc = doc_of(c);
    const json& cases = require_block(doc, "cases");

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"case", "pde", "mc", "stderr", "absorbed_fraction", "allowance", "diff",
                   "pass"});
    for (const auto& cj : cases) {
        const std::string name = get_or<std::string>(cj, "name", "case");
        ExperimentConfig::Model mspec = parse_model(require_block(cj, "model"));
        ExperimentConfig::PayoffSpec pspec = parse_payoff(require_block(cj, "payoff"));
        const double x0 = get_or(cj, "x0", 1.0);
        const double T = c.time.horizon;

        const DiffusionModel model = build_model(mspec);
        const Payoff payoff = build_payoff(pspec);

        SolverSetup setup = build_setup(c);
        setup.snap.push_back(x0);
        const Solution1D sol = run_solve(model, payoff, T, setup);
        const double pde = sol.at_level(sol.tgrid.steps())[sol.grid.nearest(x0)];

        PathConfig pc;
        pc.n_paths = get_or<std::size_t>(cj, "paths", 1'000'000);
        pc.n_steps = get_or<std::size_t>(cj, "steps", 2048);
        pc.seed = c.seed + get_or<std::uint64_t>(cj, "seed_offset", 0);
        pc.horizon = T;

        PriceEstimate est;
        double allowance = 0.0;
        const bool exact = mspec.kind == "gbm" || mspec.beta == 2.0;
        if (exact) {
            est = mc_price(payoff, simulate_gbm_exact(x0, mspec.sigma, T, pc));
        } else {
            est = mc_price(payoff,
                           simulate_cev_euler_absorbed(x0, mspec.sigma, mspec.beta, T, pc));
            PathConfig half = pc;
            half.n_steps = pc.n_steps / 2;
            half.seed = pc.seed + 1;
            const PriceEstimate est_half = mc_price(
                payoff, simulate_cev_euler_absorbed(x0, mspec.sigma, mspec.beta, T, half));
            // the step-doubling allowance is itself a noisy estimate; widen it
            // by the half-run's own confidence band
            allowance = std::fabs(est.mean - est_half.mean) + 3.0 * est_half.std_error;
        }
        const double diff = std::fabs(pde - est.mean);
        const double budget = 3.0 * est.std_error + allowance;
        const bool pass = diff <= budget;
        w.row({name, csv::fmt(pde), csv::fmt(est.mean), csv::fmt(est.std_error),
               csv::fmt(est.absorbed_fraction), csv::fmt(allowance), csv::fmt(diff),
               pass ? "1" : "0"});
        check(r, "pde_vs_mc:" + name, pass, diff, "budget " + csv::fmt(budget));
    }
    w.close();
    r.output_files.push_back(c.output);
}

// --------------------------------------------------------------- refine ---

void run_refine(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                RunResult& r) {
    const json& doc = doc_of(c);
    RefineProblem problem;
    problem.model = build_model(c.model);
    problem.payoff = build_payoff(c.payoff);
    problem.horizon = c.time.horizon;
    problem.xcheck = get_or(doc, "xcheck", 4.0);
    problem.base = build_setup(c);
    const std::string ref = get_or<std::string>(doc, "reference", "none");
    if (ref == "bs-call") {
        const double sigma = c.model.sigma, K = c.payoff.strike;
        problem.oracle = [sigma, K](double x, double t) {
            return bs_call_price(x, t, sigma, K);
        };
    } else if (ref == "power") {
        const double gamma = c.payoff.gamma;
        problem.oracle = [gamma](double x, double t) {
            return power_option_price(x, t, gamma).value;
        };
    } else if (ref == "affine") {
        const double a = c.payoff.intercept, b = c.payoff.slope;
        problem.oracle = [a, b](double x, double) { return a + b * x; };
    }

    const std::size_t levels = get_or<std::size_t>(doc, "levels", 3);
    const ConvergenceTable table = refine_study(problem, levels);

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"level", "m", "steps", "err_vs_oracle", "err_vs_finer", "order"});
    for (std::size_t L = 0; L < table.levels.size(); ++L) {
        const auto& lvl = table.levels[L];
        const double order =
            (L >= 1 && L - 1 < table.observed_orders.size())
                ? table.observed_orders[L - 1]
                : std::numeric_limits<double>::quiet_NaN();
        w.row({csv::fmt(L), csv::fmt(lvl.m), csv::fmt(lvl.steps), csv::fmt(lvl.err_vs_oracle),
               csv::fmt(lvl.err_vs_finer), csv::fmt(order)});
    }
    w.close();
    r.output_files.push_back(c.output);

    if (doc.contains("min_order")) {
        const double min_order = doc.at("min_order").get<double>();
        const double worst = table.observed_orders.empty()
                                 ? 0.0
                                 : *std::min_element(table.observed_orders.begin(),
                                                     table.observed_orders.end());
        check(r, "observed_order", worst >= min_order, worst);
    }
    if (get_or(doc, "monotone_decrease", false)) {
        bool mono = true;
        for (std::size_t L = 0; L + 1 < table.levels.size(); ++L)
            if (!(table.levels[L + 1].err_vs_oracle <= table.levels[L].err_vs_oracle))
                mono = false;
        check(r, "errors_decrease_monotonically", mono,
              table.levels.back().err_vs_oracle);
    }
    if (doc.contains("max_error")) {
        const double tol = require_tol(doc, "max_error", 1e-12);
        check(r, "finest_error", table.levels.back().err_vs_oracle <= tol,
              table.levels.back().err_vs_oracle);
    }
}

// ----------------------------------------------------------- properties ---

double min_divided_second_difference(std::span<const double> x, std::span<const double> u) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
        const double s = 2.0 * (hl * u[i + 1] - (hl + hr) * u[i] + hr * u[i - 1]) /
                         (hl * hr * (hl + hr));
        worst = std::min(worst, s);
    }
    return worst;
}

void run_properties(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                    RunResult& r) {
    const json& doc = doc_of(c);
    const json& models = require_block(doc, "models");
    const json& payoffs = require_block(doc, "payoffs");
    const double convexity_tol = require_tol(doc, "convexity_tol", 1e-8);
    const double monotone_tol = require_tol(doc, "time_monotone_tol", 1e-8);
    const double comparison_tol = require_tol(doc, "comparison_tol", 1e-10);
    const double affine_tol = require_tol(doc, "affine_tol", 1e-11);

    const Grid1D grid = build_grid(c.grid.xmax, c.grid.m, c.grid.p, c.grid.snap);
    const TimeGrid tgrid = uniform_time_grid(c.time.horizon, c.time.steps);
    SolveOptions opts;
    opts.theta = c.time.theta;

    csv::Writer w(open_path(out_dir, c.output), metadata_line(c),
                  {"model", "payoff", "check", "value", "pass"});
    std::size_t combos = 0;
    for (const auto& mj : models) {
        const auto mspec = parse_model(mj);
        const DiffusionModel model = build_model(mspec);
        const std::string mname = get_or<std::string>(mj, "name", model.name);
        for (const auto& pj : payoffs) {
            const auto pspec = parse_payoff(pj);
            const Payoff payoff = build_payoff(pspec);
            const std::string pname = get_or<std::string>(pj, "name", payoff.name);
            const std::string combo = mname + "/" + pname;
            ++combos;

            const Solution1D sol = solve_1d(model, payoff, grid, tgrid, opts);

            if (payoff.is_convex) {
                double worst = std::numeric_limits<double>::infinity();
                for (const auto& u : sol.values)
                    worst = std::min(worst, min_divided_second_difference(grid.nodes, u));
                const bool ok = worst >= -convexity_tol;
                w.row({mname, pname, "convexity_min", csv::fmt(worst), ok ? "1" : "0"});
                check(r, combo + ":convexity", ok, worst);

                double worst_dt = std::numeric_limits<double>::infinity();
                for (std::size_t n = 0; n + 1 < sol.values.size(); ++n)
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        worst_dt =
                            std::min(worst_dt, sol.values[n + 1][i] - sol.values[n][i]);
                const bool ok_dt = worst_dt >= -monotone_tol;
                w.row({mname, pname, "time_monotone_min", csv::fmt(worst_dt),
                       ok_dt ? "1" : "0"});
                check(r, combo + ":time_monotone", ok_dt, worst_dt);
            }

            if (pspec.kind == "affine") {
                double worst = 0.0;
                for (const auto& u : sol.values)
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        worst = std::max(
                            worst, std::fabs(u[i] - payoff(grid[i])) /
                                       std::max(1.0, std::fabs(payoff(grid[i]))));
                const bool ok = worst <= affine_tol;
                w.row({mname, pname, "affine_exactness", csv::fmt(worst), ok ? "1" : "0"});
                check(r, combo + ":affine_exact", ok, worst);
            }
        }

        if (doc.contains("comparisons")) {
            for (const auto& cmp : doc.at("comparisons")) {
                const Payoff lhs = build_payoff(parse_payoff(require_block(cmp, "lhs")));
                const Payoff rhs = build_payoff(parse_payoff(require_block(cmp, "rhs")));
                bool ordered = true;
                for (double x : grid.nodes)
                    if (lhs(x) > rhs(x)) ordered = false;
                if (!ordered)
                    throw ConfigError("properties: comparison payoffs are not ordered");
                const Solution1D ul = solve_1d(model, lhs, grid, tgrid, opts);
                const Solution1D ur = solve_1d(model, rhs, grid, tgrid, opts);
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t n = 0; n < ul.values.size(); ++n)
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        worst = std::max(worst, ul.values[n][i] - ur.values[n][i]);
                const bool ok = worst <= comparison_tol;
                const std::string cname = lhs.name + "<=" + rhs.name;
                w.row({mname, cname, "comparison_max_gap", csv::fmt(worst), ok ? "1" : "0"});
                check(r, mname + ":" + cname, ok, worst);
            }
        }
    }
    w.close();
    r.output_files.push_back(c.output);
    check(r, "matrix_size", combos >= get_or<std::size_t>(doc, "min_combinations", 12),
          static_cast<double>(combos));

    if (get_or(doc, "byte_stable", true)) {
        // rerun the first model/payoff combo into two files; identical bytes
        const auto mspec = parse_model(models.at(0));
        const auto pspec = parse_payoff(payoffs.at(0));
        const DiffusionModel model = build_model(mspec);
        const Payoff payoff = build_payoff(pspec);
        std::string files[2] = {c.name + "_rerun_a.csv", c.name + "_rerun_b.csv"};
        for (const auto& f : files) {
            const Solution1D sol = solve_1d(model, payoff, grid, tgrid, opts);
            csv::Writer rw(open_path(out_dir, f), metadata_line(c), {"t", "x", "u"});
            const auto u = sol.at_level(sol.tgrid.steps());
            for (std::size_t i = 0; i < grid.size(); ++i)
                rw.row({csv::fmt(c.time.horizon), csv::fmt(grid[i]), csv::fmt(u[i])});
            rw.close();
            r.output_files.push_back(f);
        }
        std::ifstream fa(out_dir / files[0], std::ios::binary);
        std::ifstream fb(out_dir / files[1], std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        check(r, "byte_stable_rerun", sa.str() == sb.str() && !sa.str().empty(),
              static_cast<double>(sa.str().size()));
    }
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    c.name = get_or<std::string>(doc, "name", name);
    if (!doc.contains("kind")) throw ConfigError("config is missing 'kind'");
    c.kind = doc.at("kind").get<std::string>();
    if (!kKinds.count(c.kind)) throw ConfigError("unknown experiment kind '" + c.kind + "'");
    c.seed = get_or<std::uint64_t>(doc, "seed", 0);
    c.output = get_or<std::string>(doc, "output", c.name + ".csv");

    const bool needs_model = c.kind == "price" || c.kind == "delta" || c.kind == "sweep" ||
                             c.kind == "gprime-check" || c.kind == "refine" ||
                             c.kind == "barrier";
    const bool needs_payoff = c.kind == "price" || c.kind == "delta" || c.kind == "sweep" ||
                              c.kind == "gprime-check" || c.kind == "refine";
    if (needs_model) c.model = parse_model(require_block(doc, "model"));
    else if (doc.contains("model")) c.model = parse_model(doc.at("model"));
    if (needs_payoff) c.payoff = parse_payoff(require_block(doc, "payoff"));
    else if (doc.contains("payoff")) c.payoff = parse_payoff(doc.at("payoff"));

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        c.grid.xmax = get_or(g, "xmax", c.grid.xmax);
        c.grid.m = get_or<std::size_t>(g, "m", c.grid.m);
        c.grid.p = get_or(g, "p", c.grid.p);
        c.grid.snap = get_or(g, "snap", std::vector<double>{});
    }
    if (doc.contains("time")) {
        const json& t = doc.at("time");
        c.time.horizon = get_or(t, "T", c.time.horizon);
        c.time.steps = get_or<std::size_t>(t, "steps", c.time.steps);
        c.time.theta = get_or(t, "theta", c.time.theta);
    }
    if (!(c.time.horizon > 0.0)) throw ConfigError("time.T must be > 0");
    if (!(c.time.theta >= 0.5 && c.time.theta <= 1.0))
        throw ConfigError("time.theta must lie in [1/2, 1]");
    if (!(c.grid.xmax > 0.0) || c.grid.m < 16)
        throw ConfigError("grid needs xmax > 0 and m >= 16");

    c.canonical = doc.dump();
    c.doc = std::shared_ptr<const void>(new json(std::move(doc)), [](const void* p) {
        delete static_cast<const json*>(p);
    });
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), file.stem().string());
}

RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    RunResult r;
    r.name = config.name;
    r.kind = config.kind;
    try {
        if (config.kind == "price") run_price(config, out_dir, r);
        else if (config.kind == "delta") run_delta(config, out_dir, r);
        else if (config.kind == "sweep") run_sweep(config, out_dir, r);
        else if (config.kind == "gprime-check") run_gprime(config, out_dir, r);
        else if (config.kind == "margrabe") run_margrabe(config, out_dir, r);
        else if (config.kind == "counterexample") run_counterexample(config, out_dir, r);
        else if (config.kind == "barrier") run_barrier(config, out_dir, r);
        else if (config.kind == "sharpness") run_sharpness(config, out_dir, r);
        else if (config.kind == "mc-crosscheck") run_mc_crosscheck(config, out_dir, r);
        else if (config.kind == "refine") run_refine(config, out_dir, r);
        else if (config.kind == "properties") run_properties(config, out_dir, r);
        else throw ConfigError("unknown experiment kind '" + config.kind + "'");
    } catch (const ConfigError& e) {
        r.status = 2;
        r.message = e.what();
    } catch (const SolverError& e) {
        r.status = 3;
        r.message = std::string(e.what()) + " at t=" + csv::fmt(e.time()) + " node " +
                    std::to_string(e.node());
    } catch (const std::invalid_argument& e) {
        r.status = 2;
        r.message = e.what();
    } catch (const std::exception& e) {
        r.status = 3;
        r.message = e.what();
    }
    return r;
}

void emit_summary(std::span<const RunResult> results, std::ostream& out) {
    out << "name,kind,status,passed,failed,detail\n";
    for (const auto& r : results) {
        std::size_t passed = 0, failed = 0;
        std::string detail;
        for (const auto& a : r.assertions) {
            if (a.pass) ++passed;
            else {
                ++failed;
                if (detail.empty()) detail = a.name + "=" + csv::fmt(a.value);
            }
        }
        if (r.status >= 2) detail = r.message;
        const char* status = r.status == 0   ? "PASS"
                             : r.status == 1 ? "FAIL"
                             : r.status == 2 ? "CONFIG_ERROR"
                                             : "NUMERICAL_ERROR";
        out << r.name << ',' << r.kind << ',' << status << ',' << passed << ',' << failed
            << ',' << '"' << detail << '"' << '\n';
    }
}

} // namespace deltalab
