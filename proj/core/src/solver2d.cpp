#include "deltalab/solver2d.hpp"

#include "deltalab/stepper.hpp"

#include <algorithm>
#include <stdexcept>

namespace deltalab {

std::size_t Solution2D::stored_index_of(double t) const {
    const std::size_t level = tgrid.level_of(t);
    auto it = std::find(stored_levels.begin(), stored_levels.end(), level);
    if (it == stored_levels.end())
        throw std::invalid_argument("Solution2D: time level was not recorded");
    return static_cast<std::size_t>(it - stored_levels.begin());
}

std::vector<double> Solution2D::line_along_x1(std::size_t stored, double x2_query) const {
    const std::size_t j = grid2.nearest(x2_query);
    const std::size_t m1 = grid1.size();
    std::vector<double> line(m1);
    for (std::size_t i = 0; i < m1; ++i) line[i] = values[stored][j * m1 + i];
    return line;
}

std::vector<double> Solution2D::line_along_x2(std::size_t stored, double x1_query) const {
    const std::size_t i = grid1.nearest(x1_query);
    const std::size_t m1 = grid1.size();
    const std::size_t m2 = grid2.size();
    std::vector<double> line(m2);
    for (std::size_t j = 0; j < m2; ++j) line[j] = values[stored][j * m1 + i];
    return line;
}

Solution2D solve_2d_with_faces(const DiffusionModel& model, const Payoff& payoff,
                               const Grid1D& grid1, const Grid1D& grid2,
                               const TimeGrid& tgrid, const Solve2DOptions& options) {
    if (model.dim != 2) throw std::invalid_argument("solve_2d: model must be 2D diagonal");
    if (payoff.dim != 2) throw std::invalid_argument("solve_2d: payoff must be 2D");
    if (!(options.theta >= 0.5 && options.theta <= 1.0))
        throw std::invalid_argument("solve_2d: theta must lie in [1/2, 1]");

    const std::size_t m1 = grid1.size();
    const std::size_t m2 = grid2.size();
    const std::size_t steps = tgrid.steps();

    // Face problems: restrict the payoff, solve the 1D equation of the
    // surviving coordinate over the same time grid.
    DiffusionModel model1;
    model1.dim = 1;
    model1.alpha = {model.alpha[0]};
    model1.cev = {model.cev[0]};
    model1.growth_constant = model.growth_constant;
    DiffusionModel model2 = model1;
    model2.alpha = {model.alpha[1]};
    model2.cev = {model.cev[1]};

    Payoff on_face1; // x1 = 0, function of x2
    on_face1.dim = 1;
    on_face1.g1 = [&payoff](double x2) { return payoff(0.0, x2); };
    on_face1.name = payoff.name + "|x1=0";
    Payoff on_face2; // x2 = 0, function of x1
    on_face2.dim = 1;
    on_face2.g1 = [&payoff](double x1) { return payoff(x1, 0.0); };
    on_face2.name = payoff.name + "|x2=0";

    SolveOptions face_opts;
    face_opts.theta = options.theta;
    face_opts.far_field = options.far_field;
    face_opts.startup_implicit_steps = options.startup_implicit_steps;

    Solution2D sol;
    sol.grid1 = grid1;
    sol.grid2 = grid2;
    sol.tgrid = tgrid;
    sol.face1 = solve_1d(model2, on_face1, grid2, tgrid, face_opts);
    sol.face2 = solve_1d(model1, on_face2, grid1, tgrid, face_opts);

    std::vector<double> u(m1 * m2);
    for (std::size_t j = 0; j < m2; ++j)
        for (std::size_t i = 0; i < m1; ++i) u[j * m1 + i] = payoff(grid1[i], grid2[j]);

    auto record = [&](std::size_t level) {
        sol.stored_levels.push_back(level);
        sol.values.push_back(u);
    };
    record(0);

    CoefFn a1 = [&model](double x, double t) { return model.a(0, x, t); };
    CoefFn a2 = [&model](double x, double t) { return model.a(1, x, t); };
    ThetaStepper sweep1(grid1, a1, options.far_field);
    ThetaStepper sweep2(grid2, a2, options.far_field);

    const double r1 = (grid1[m1 - 1] - grid1[m1 - 2]) / (grid1[m1 - 2] - grid1[m1 - 3]);
    const double r2 = (grid2[m2 - 1] - grid2[m2 - 2]) / (grid2[m2 - 2] - grid2[m2 - 3]);

    std::vector<double> line(std::max(m1, m2));
    for (std::size_t n = 0; n < steps; ++n) {
        const double t0 = tgrid.times[n];
        const double t1 = tgrid.times[n + 1];
        const auto& f1 = sol.face1.values[n + 1]; // u(0, x2_j, t1)
        const auto& f2 = sol.face2.values[n + 1]; // u(x1_i, 0, t1)

        // sweep along x1, one tridiagonal solve per interior x2 row
        for (std::size_t j = 1; j + 1 < m2; ++j) {
            std::span<double> row(u.data() + j * m1, m1);
            sweep1.step(row, t0, t1, options.theta, f1[j]);
        }
        // sweep along x2, one solve per interior x1 column
        for (std::size_t i = 1; i + 1 < m1; ++i) {
            for (std::size_t j = 0; j < m2; ++j) line[j] = u[j * m1 + i];
            sweep2.step(std::span<double>(line.data(), m2), t0, t1, options.theta, f2[i]);
            for (std::size_t j = 0; j < m2; ++j) u[j * m1 + i] = line[j];
        }

        // impose faces, then close the far edges
        for (std::size_t j = 0; j < m2; ++j) u[j * m1] = f1[j];
        for (std::size_t i = 0; i < m1; ++i) u[i] = f2[i];
        if (options.far_field == FarField::SecondDerivativeZero) {
            for (std::size_t i = 1; i < m1; ++i)
                u[(m2 - 1) * m1 + i] =
                    (1.0 + r2) * u[(m2 - 2) * m1 + i] - r2 * u[(m2 - 3) * m1 + i];
            for (std::size_t j = 1; j < m2; ++j)
                u[j * m1 + m1 - 1] = (1.0 + r1) * u[j * m1 + m1 - 2] - r1 * u[j * m1 + m1 - 3];
            u[(m2 - 1) * m1] = f1[m2 - 1];
        }

        if (n + 1 == steps || (n + 1) % options.record_every == 0) record(n + 1);
    }
    return sol;
}

} // namespace deltalab
