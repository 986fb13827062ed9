#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deltalab {

/// Spatial grid on [0, xmax], clustered near 0:
///   node[k] = xmax (k/(m-1))^p
/// node[0] = 0 always; p = 1 is uniform. Optional snap points move the
/// nearest interior node exactly onto a payoff kink or measurement abscissa.
struct Grid1D {
    std::vector<double> nodes;
    double grading = 1.0;

    std::size_t size() const { return nodes.size(); }
    double xmax() const { return nodes.back(); }
    double operator[](std::size_t k) const { return nodes[k]; }

    /// Index of the node nearest to x.
    std::size_t nearest(double x) const;
};

Grid1D build_grid(double xmax, std::size_t m, double p);
Grid1D build_grid(double xmax, std::size_t m, double p, std::span<const double> snap_points);

/// Times 0 = t_0 < ... < t_S = T. Uniform, or graded toward t = 0 with
/// exponent q > 1 to resolve the startup layer of kinked payoffs.
struct TimeGrid {
    std::vector<double> times;

    std::size_t steps() const { return times.size() - 1; }
    double horizon() const { return times.back(); }

    /// Index with times[i] == t up to relative slack; throws if t is not a
    /// time level.
    std::size_t level_of(double t) const;
};

TimeGrid uniform_time_grid(double horizon, std::size_t steps);
TimeGrid graded_time_grid(double horizon, std::size_t steps, double q);

} // namespace deltalab
