#pragma once

#include "deltalab/grid.hpp"
#include "deltalab/models.hpp"
#include "deltalab/solver1d.hpp"

#include <cstddef>
#include <vector>

namespace deltalab {

struct Solve2DOptions {
    double theta = 1.0;
    FarField far_field = FarField::SecondDerivativeZero;
    std::size_t startup_implicit_steps = 2;
    /// Store every k-th time level (plus the initial and final ones). The
    /// faces are always stored at full time resolution.
    std::size_t record_every = 1;
};

/// Tensor solution over (time, x1, x2) with the two face problems solved as
/// independent 1D problems and imposed, not solved, as Dirichlet data:
/// the restriction of the interior values to each face equals the face
/// solution exactly, and u(0,0,t) = g(0,0) for all t.
struct Solution2D {
    Grid1D grid1, grid2;
    TimeGrid tgrid;
    std::vector<std::size_t> stored_levels;
    std::vector<std::vector<double>> values; // [stored][j*m1 + i]
    Solution1D face1; // x1 = 0, values along x2
    Solution1D face2; // x2 = 0, values along x1

    double value(std::size_t stored, std::size_t i, std::size_t j) const {
        return values[stored][j * grid1.size() + i];
    }
    std::size_t stored_index_of(double t) const;

    /// Grid line along x1 at the x2 node nearest to x2_query.
    std::vector<double> line_along_x1(std::size_t stored, double x2_query) const;
    /// Grid line along x2 at the x1 node nearest to x1_query.
    std::vector<double> line_along_x2(std::size_t stored, double x1_query) const;
};

/// Lie-split theta scheme for diagonal 2D models: per time step one implicit
/// sweep along x1 (all interior x2 rows) followed by one along x2. The two
/// one-direction operators commute for diagonal coefficients, so the
/// splitting introduces no leading-order error beyond the time scheme's own.
Solution2D solve_2d_with_faces(const DiffusionModel& model, const Payoff& payoff,
                               const Grid1D& grid1, const Grid1D& grid2,
                               const TimeGrid& tgrid, const Solve2DOptions& options = {});

} // namespace deltalab
