#include "deltalab/solver1d.hpp"

#include <stdexcept>

namespace deltalab {

Solution1D solve_1d(const DiffusionModel& model, const Payoff& payoff, const Grid1D& grid,
                    const TimeGrid& tgrid, const SolveOptions& options) {
    if (model.dim != 1) throw std::invalid_argument("solve_1d: model must be 1D");
    if (payoff.dim != 1) throw std::invalid_argument("solve_1d: payoff must be 1D");
    if (!(options.theta >= 0.5 && options.theta <= 1.0))
        throw std::invalid_argument("solve_1d: theta must lie in [1/2, 1]");

    const std::size_t m = grid.size();
    const std::size_t steps = tgrid.steps();

    Solution1D sol;
    sol.grid = grid;
    sol.tgrid = tgrid;
    sol.values.assign(steps + 1, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) sol.values[0][i] = payoff(grid[i]);
    const double g0 = sol.values[0][0];

    CoefFn a = [&model](double x, double t) { return model.a1(x, t); };
    ThetaStepper stepper(grid, a, options.far_field, options.lower_order);

    std::vector<double> u = sol.values[0];
    for (std::size_t n = 0; n < steps; ++n) {
        const double t0 = tgrid.times[n];
        const double t1 = tgrid.times[n + 1];
        if (options.theta < 1.0 && n < options.startup_implicit_steps) {
            const double tm = 0.5 * (t0 + t1);
            stepper.step(u, t0, tm, 1.0, g0);
            stepper.step(u, tm, t1, 1.0, g0);
        } else {
            stepper.step(u, t0, t1, options.theta, g0);
        }
        sol.values[n + 1] = u;
    }
    sol.max_cell_peclet = stepper.max_cell_peclet();
    return sol;
}

} // namespace deltalab
