#include "deltalab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deltalab {

std::size_t Grid1D::nearest(double x) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.end()) return nodes.size() - 1;
    if (it == nodes.begin()) return 0;
    auto prev = it - 1;
    return static_cast<std::size_t>((x - *prev <= *it - x) ? prev - nodes.begin()
                                                           : it - nodes.begin());
}

Grid1D build_grid(double xmax, std::size_t m, double p) {
    return build_grid(xmax, m, p, {});
}

Grid1D build_grid(double xmax, std::size_t m, double p, std::span<const double> snap_points) {
    if (!(xmax > 0.0)) throw std::invalid_argument("build_grid: xmax must be > 0");
    if (m < 3) throw std::invalid_argument("build_grid: need at least 3 nodes");
    if (!(p >= 1.0)) throw std::invalid_argument("build_grid: grading exponent must be >= 1");

    Grid1D g;
    g.grading = p;
    g.nodes.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        g.nodes[k] = xmax * std::pow(static_cast<double>(k) / static_cast<double>(m - 1), p);
    g.nodes.front() = 0.0;
    g.nodes.back() = xmax;

    for (double s : snap_points) {
        if (!(s > 0.0) || !(s < xmax)) continue;
        const std::size_t i = g.nearest(s);
        if (i == 0 || i + 1 == m) continue;
        // keep strict monotonicity after the move
        if (g.nodes[i - 1] < s && s < g.nodes[i + 1]) g.nodes[i] = s;
    }
    return g;
}

std::size_t TimeGrid::level_of(double t) const {
    const double span = times.back() - times.front();
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * span);
    if (it == times.end() || std::fabs(*it - t) > 1e-9 * std::max(span, 1.0))
        throw std::invalid_argument("TimeGrid::level_of: t is not a stored time level");
    return static_cast<std::size_t>(it - times.begin());
}

TimeGrid uniform_time_grid(double horizon, std::size_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time grid: horizon must be > 0");
    if (steps < 1) throw std::invalid_argument("time grid: need at least one step");
    TimeGrid tg;
    tg.times.resize(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n)
        tg.times[n] = horizon * static_cast<double>(n) / static_cast<double>(steps);
    return tg;
}

TimeGrid graded_time_grid(double horizon, std::size_t steps, double q) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time grid: horizon must be > 0");
    if (steps < 1) throw std::invalid_argument("time grid: need at least one step");
    if (!(q >= 1.0)) throw std::invalid_argument("time grid: grading must be >= 1");
    TimeGrid tg;
    tg.times.resize(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n)
        tg.times[n] =
            horizon * std::pow(static_cast<double>(n) / static_cast<double>(steps), q);
    return tg;
}

} // namespace deltalab
