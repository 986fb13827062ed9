// deltalab command line: config-driven experiments plus direct spot checks of
// the closed forms, boundary deltas, barrier certificates and Monte Carlo.

#include "deltalab/analytic.hpp"
#include "deltalab/barrier.hpp"
#include "deltalab/boundary.hpp"
#include "deltalab/csv.hpp"
#include "deltalab/errors.hpp"
#include "deltalab/experiment.hpp"
#include "deltalab/models.hpp"
#include "deltalab/monte_carlo.hpp"
#include "deltalab/normal.hpp"
#include "deltalab/patched.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace {

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("DELTALAB_OUT")) return env;
    return "out";
}

int run_configs(const std::vector<std::string>& files, const std::filesystem::path& out_dir,
                std::size_t jobs) {
    namespace dl = deltalab;
    std::vector<dl::RunResult> results(files.size());
    std::vector<int> statuses(files.size(), 0);

    auto one = [&](std::size_t i) {
        try {
            const dl::ExperimentConfig cfg = dl::parse_config(files[i]);
            results[i] = dl::run(cfg, out_dir);
        } catch (const dl::ConfigError& e) {
            results[i].name = std::filesystem::path(files[i]).stem().string();
            results[i].kind = "?";
            results[i].status = 2;
            results[i].message = e.what();
        }
        statuses[i] = results[i].status;
    };

    if (jobs <= 1 || files.size() <= 1) {
        for (std::size_t i = 0; i < files.size(); ++i) one(i);
    } else {
        std::vector<std::future<void>> futs;
        std::size_t next = 0;
        while (next < files.size()) {
            futs.clear();
            for (std::size_t k = 0; k < jobs && next < files.size(); ++k, ++next)
                futs.push_back(std::async(std::launch::async, one, next));
            for (auto& f : futs) f.get();
        }
    }

    int worst = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& r = results[i];
        std::cout << r.name << " [" << r.kind << "] ";
        if (r.status == 0) std::cout << "PASS";
        else if (r.status == 1) std::cout << "FAIL";
        else if (r.status == 2) std::cout << "CONFIG_ERROR: " << r.message;
        else std::cout << "NUMERICAL_ERROR: " << r.message;
        std::cout << "\n";
        for (const auto& a : r.assertions)
            std::cout << "  " << (a.pass ? "ok   " : "FAIL ") << a.name << " = "
                      << deltalab::csv::fmt(a.value)
                      << (a.detail.empty() ? "" : " (" + a.detail + ")") << "\n";
        worst = std::max(worst, r.status);
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream idx(out_dir / "summary.csv");
    dl::emit_summary(results, idx);
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    namespace dl = deltalab;
    CLI::App app{"deltalab: boundary behavior of degenerate diffusion prices at x = 0"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "Execute experiment config files");
    std::vector<std::string> config_files;
    std::string out_dir_str = default_out_dir().string();
    std::size_t jobs = 1;
    run_cmd->add_option("configs", config_files, "JSON experiment configs")->required();
    run_cmd->add_option("--out", out_dir_str, "Output directory (or DELTALAB_OUT)");
    run_cmd->add_option("--jobs", jobs, "Run configs concurrently");

    // ---- oracle ----
    auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate a closed form");
    std::string oracle_name;
    double ox = 1.0, ot = 1.0, osigma = 0.2, ostrike = 1.0, ogamma = 2.0;
    double ox2 = 1.0, osigma2 = 0.2, oz = 0.0;
    oracle_cmd->add_option("name", oracle_name,
                           "norm-cdf | bs-call | bs-delta | cev-delta | power | margrabe")
        ->required();
    oracle_cmd->add_option("--z", oz, "argument of norm-cdf");
    oracle_cmd->add_option("--x", ox, "price");
    oracle_cmd->add_option("--x2", ox2, "second price (margrabe)");
    oracle_cmd->add_option("--t", ot, "time to maturity");
    oracle_cmd->add_option("--sigma", osigma, "volatility scale");
    oracle_cmd->add_option("--sigma2", osigma2, "second volatility (margrabe)");
    oracle_cmd->add_option("--strike", ostrike, "strike");
    oracle_cmd->add_option("--gamma", ogamma, "power exponent");

    // ---- delta ----
    auto* delta_cmd = app.add_subcommand("delta", "Boundary delta of one model/payoff");
    std::string dmodel = "cev", dpayoff = "call";
    double dsigma = 2.0, dbeta = 1.0, dstrike = 1.0, dgamma = 2.0, dT = 1.0;
    double dxmax = 20.0, dgrading = 2.0;
    std::size_t dm = 801, dsteps = 1000;
    delta_cmd->add_option("--model", dmodel, "cev | gbm");
    delta_cmd->add_option("--payoff", dpayoff, "call | power | affine | affine-plus-call");
    delta_cmd->add_option("--sigma", dsigma, "volatility scale");
    delta_cmd->add_option("--beta", dbeta, "degeneracy exponent");
    delta_cmd->add_option("--strike", dstrike, "strike");
    delta_cmd->add_option("--gamma", dgamma, "power exponent");
    delta_cmd->add_option("--t", dT, "time");
    delta_cmd->add_option("--xmax", dxmax, "domain truncation");
    delta_cmd->add_option("--m", dm, "grid nodes");
    delta_cmd->add_option("--steps", dsteps, "time steps");
    delta_cmd->add_option("--p", dgrading, "grid grading exponent");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "Boundary delta across beta exponents");
    std::vector<double> sbetas{0.0, 0.5, 1.0, 1.5, 2.0};
    double ssigma = 2.0, sstrike = 1.0, sT = 1.0;
    std::size_t sm = 801, ssteps = 1000;
    sweep_cmd->add_option("--betas", sbetas, "exponents");
    sweep_cmd->add_option("--sigma", ssigma, "volatility scale");
    sweep_cmd->add_option("--strike", sstrike, "strike");
    sweep_cmd->add_option("--t", sT, "time");
    sweep_cmd->add_option("--m", sm, "grid nodes");
    sweep_cmd->add_option("--steps", ssteps, "time steps");

    // ---- counterexample ----
    auto* ce_cmd = app.add_subcommand("counterexample",
                                      "Patched example with a jump in the boundary delta");
    double ce_t0 = 0.5, ce_T = 0.75, ce_xmax = 20.0;
    std::size_t ce_m = 801, ce_steps = 300;
    ce_cmd->add_option("--t0", ce_t0, "patch time");
    ce_cmd->add_option("--T", ce_T, "final time");
    ce_cmd->add_option("--m", ce_m, "grid nodes");
    ce_cmd->add_option("--steps", ce_steps, "time steps");
    ce_cmd->add_option("--xmax", ce_xmax, "domain truncation");

    // ---- barrier ----
    auto* barrier_cmd = app.add_subcommand("barrier", "Certify the comparison function");
    double bbeta = 1.0, bsigma = 2.0, beps = 0.0, bN = 0.0, beta0 = 0.5, bt0 = 1.0;
    std::size_t bdensity = 200;
    barrier_cmd->add_option("--beta", bbeta, "degeneracy exponent");
    barrier_cmd->add_option("--sigma", bsigma, "CEV sigma (C = sigma^2/2)");
    barrier_cmd->add_option("--epsilon", beps, "override epsilon");
    barrier_cmd->add_option("--N", bN, "override N");
    barrier_cmd->add_option("--eta", beta0, "initial slab width");
    barrier_cmd->add_option("--t0", bt0, "anchor time");
    barrier_cmd->add_option("--density", bdensity, "samples per axis");

    // ---- mc ----
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo price with confidence interval");
    std::string mmodel = "cev", mpayoff = "call";
    double msigma = 2.0, mbeta = 1.0, mx0 = 1.0, mT = 1.0, mstrike = 1.0, mgamma = 2.0;
    std::size_t mpaths = 1'000'000, msteps = 2048;
    std::uint64_t mseed = 0;
    std::string mout;
    mc_cmd->add_option("--model", mmodel, "cev | gbm");
    mc_cmd->add_option("--payoff", mpayoff, "payoff name");
    mc_cmd->add_option("--sigma", msigma, "volatility scale");
    mc_cmd->add_option("--beta", mbeta, "degeneracy exponent");
    mc_cmd->add_option("--x0", mx0, "spot");
    mc_cmd->add_option("--t", mT, "horizon");
    mc_cmd->add_option("--strike", mstrike, "strike");
    mc_cmd->add_option("--gamma", mgamma, "power exponent");
    mc_cmd->add_option("--paths", mpaths, "path count");
    mc_cmd->add_option("--steps", msteps, "Euler steps");
    mc_cmd->add_option("--seed", mseed, "RNG seed");
    mc_cmd->add_option("--out", mout, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run_configs(config_files, out_dir_str, jobs);

        if (*oracle_cmd) {
            double value = 0.0;
            if (oracle_name == "norm-cdf") value = dl::norm_cdf(oz);
            else if (oracle_name == "bs-call") value = dl::bs_call_price(ox, ot, osigma, ostrike);
            else if (oracle_name == "bs-delta") value = dl::bs_call_delta(ox, ot, osigma, ostrike);
            else if (oracle_name == "cev-delta") value = dl::cev_beta1_boundary_delta(ot, osigma, ostrike);
            else if (oracle_name == "power") {
                const auto v = dl::power_option_price(ox, ot, ogamma);
                std::printf("%.17g boundary_delta_exists=%d\n", v.value,
                            v.boundary_delta_exists ? 1 : 0);
                return 0;
            } else if (oracle_name == "margrabe")
                value = dl::margrabe_price(ox, ox2, ot, osigma, osigma2);
            else {
                std::fprintf(stderr, "unknown oracle '%s'\n", oracle_name.c_str());
                return 2;
            }
            std::printf("%.17g\n", value);
            return 0;
        }

        if (*delta_cmd) {
            dl::DiffusionModel model =
                dmodel == "gbm" ? dl::make_gbm(dsigma) : dl::make_cev(dsigma, dbeta);
            dl::PayoffParams pp;
            pp.strike = dstrike;
            pp.gamma = dgamma;
            dl::Payoff payoff = dl::payoff_library(dpayoff, pp);
            dl::SolverSetup setup;
            setup.xmax = dxmax;
            setup.m = dm;
            setup.grading = dgrading;
            setup.steps = dsteps;
            if (dpayoff == "call" || dpayoff == "affine-plus-call") setup.snap = {dstrike};
            const auto sol = dl::run_solve(model, payoff, dT, setup);
            const auto est = dl::boundary_delta(sol, dT);
            std::printf("t,delta,residual,verdict\n%.17g,%.17g,%.17g,%s\n", dT, est.value,
                        est.residual, est.divergent() ? "divergent" : "finite");
            return 0;
        }

        if (*sweep_cmd) {
            dl::PayoffParams pp;
            pp.strike = sstrike;
            dl::Payoff payoff = dl::payoff_library("call", pp);
            dl::SolverSetup setup;
            setup.m = sm;
            setup.steps = ssteps;
            setup.snap = {sstrike};
            const auto rows = dl::hopf_sweep(sbetas, ssigma, payoff, sT, setup);
            std::printf("beta,delta,residual,verdict\n");
            for (const auto& row : rows)
                std::printf("%.17g,%.17g,%.17g,%s\n", row.beta, row.delta.value,
                            row.delta.residual, row.delta.divergent() ? "divergent" : "finite");
            return 0;
        }

        if (*ce_cmd) {
            const auto grid = dl::build_grid(ce_xmax, ce_m, 2.0);
            const auto tgrid = dl::uniform_time_grid(ce_T, ce_steps);
            const auto ex = dl::build_patched_counterexample(ce_t0, grid, tgrid);
            std::printf("t,delta,residual,verdict\n");
            const std::size_t every = std::max<std::size_t>(1, ce_steps / 32);
            for (std::size_t n = 0; n <= ce_steps; n += every) {
                const double t = tgrid.times[n];
                const auto est = ex.delta_at(t);
                std::printf("%.17g,%.17g,%.17g,%s\n", t, est.value, est.residual,
                            est.divergent() ? "divergent" : "finite");
            }
            return 0;
        }

        if (*barrier_cmd) {
            dl::BarrierParams params;
            params.beta = bbeta;
            params.C = 0.5 * bsigma * bsigma;
            if (beps > 0.0 && bN > 0.0) {
                params.epsilon = beps;
                params.N = bN;
            } else {
                const auto [eps, N] = dl::choose_barrier_params(bbeta);
                params.epsilon = eps;
                params.N = N;
            }
            params.eta = beta0;
            params.t0 = bt0;
            const auto model = dl::make_cev(bsigma, bbeta);
            const auto rep = dl::verify_barrier_degenhopf(model, params, bdensity);
            std::printf("beta,epsilon,N,eta,min_residual,samples,pass\n");
            std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%d\n", bbeta, params.epsilon,
                        params.N, rep.eta_used, rep.min_residual, rep.samples,
                        rep.pass ? 1 : 0);
            return rep.pass ? 0 : 1;
        }

        if (*mc_cmd) {
            dl::PathConfig cfg;
            cfg.n_paths = mpaths;
            cfg.n_steps = msteps;
            cfg.seed = mseed;
            cfg.horizon = mT;
            dl::PayoffParams pp;
            pp.strike = mstrike;
            pp.gamma = mgamma;
            dl::Payoff payoff = dl::payoff_library(mpayoff, pp);
            dl::TerminalSamples samples =
                (mmodel == "gbm" || mbeta == 2.0)
                    ? dl::simulate_gbm_exact(mx0, msigma, mT, cfg)
                    : dl::simulate_cev_euler_absorbed(mx0, msigma, mbeta, mT, cfg);
            const auto est = dl::mc_price(payoff, samples);
            const std::string line = "estimate,stderr,absorbed_fraction\n" +
                                     dl::csv::fmt(est.mean) + "," + dl::csv::fmt(est.std_error) +
                                     "," + dl::csv::fmt(est.absorbed_fraction) + "\n";
            if (mout.empty()) {
                std::fputs(line.c_str(), stdout);
            } else {
                std::ofstream f(mout);
                f << line;
            }
            return 0;
        }
    } catch (const dl::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const dl::SolverError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
