#include "deltalab/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deltalab {

namespace {

double interp_linear(std::span<const double> x, std::span<const double> u, double xq) {
    auto it = std::lower_bound(x.begin(), x.end(), xq);
    if (it == x.begin()) return u.front();
    if (it == x.end()) return u.back();
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double w = (xq - x[lo]) / (x[hi] - x[lo]);
    return u[lo] + w * (u[hi] - u[lo]);
}

} // namespace

ConvergenceTable refine_study(const RefineProblem& problem, std::size_t levels) {
    if (levels < 2) throw std::invalid_argument("refine_study: need at least 2 levels");

    std::vector<Solution1D> sols;
    sols.reserve(levels);
    ConvergenceTable table;
    for (std::size_t L = 0; L < levels; ++L) {
        SolverSetup setup = problem.base;
        setup.m = ((problem.base.m - 1) << L) + 1;
        setup.steps = problem.base.steps << L;
        sols.push_back(run_solve(problem.model, problem.payoff, problem.horizon, setup));

        RefineLevel lvl;
        lvl.m = setup.m;
        lvl.steps = setup.steps;
        lvl.err_vs_oracle = std::numeric_limits<double>::quiet_NaN();
        lvl.err_vs_finer = std::numeric_limits<double>::quiet_NaN();
        if (problem.oracle) {
            const auto& sol = sols.back();
            const auto u = sol.at_level(sol.tgrid.steps());
            double err = 0.0;
            for (std::size_t i = 1; i < sol.grid.size(); ++i) {
                const double x = sol.grid[i];
                if (x > problem.xcheck) break;
                err = std::max(err, std::fabs(u[i] - problem.oracle(x, problem.horizon)));
            }
            lvl.err_vs_oracle = err;
        }
        table.levels.push_back(lvl);
    }

    for (std::size_t L = 0; L + 1 < levels; ++L) {
        const auto& coarse = sols[L];
        const auto& fine = sols[L + 1];
        const auto uc = coarse.at_level(coarse.tgrid.steps());
        const auto uf = fine.at_level(fine.tgrid.steps());
        double err = 0.0;
        for (std::size_t i = 1; i < coarse.grid.size(); ++i) {
            const double x = coarse.grid[i];
            if (x > problem.xcheck) break;
            err = std::max(err, std::fabs(uc[i] - interp_linear(fine.grid.nodes, uf, x)));
        }
        table.levels[L].err_vs_finer = err;
    }

    if (problem.oracle) {
        for (std::size_t L = 0; L + 1 < levels; ++L) {
            const double e0 = table.levels[L].err_vs_oracle;
            const double e1 = table.levels[L + 1].err_vs_oracle;
            table.observed_orders.push_back(std::log2(e0 / e1));
        }
    }
    return table;
}

} // namespace deltalab
