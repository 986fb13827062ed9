#pragma once

#include "deltalab/boundary.hpp"
#include "deltalab/models.hpp"
#include "deltalab/solver1d.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace deltalab {

struct RefineProblem {
    DiffusionModel model;
    Payoff payoff;
    double horizon = 1.0;
    /// Closed-form reference u(x,t), when one exists.
    std::function<double(double x, double t)> oracle;
    /// Errors are measured on nodes 0 < x <= xcheck at the final time (the
    /// far-field closure owns the tail; see solver docs).
    double xcheck = 4.0;
    SolverSetup base; // coarsest level; each level doubles cells and steps
};

struct RefineLevel {
    std::size_t m = 0;
    std::size_t steps = 0;
    double err_vs_oracle = 0.0; // max abs error, NaN when no oracle
    double err_vs_finer = 0.0;  // max abs diff against the next level, NaN on last
};

struct ConvergenceTable {
    std::vector<RefineLevel> levels;
    /// log2(e_L / e_{L+1}) from the oracle column (empty without an oracle).
    std::vector<double> observed_orders;
};

/// Solve the same problem on nested grids (m -> 2(m-1)+1, steps doubled) and
/// tabulate errors against the oracle and against the next-finer level.
ConvergenceTable refine_study(const RefineProblem& problem, std::size_t levels);

} // namespace deltalab
