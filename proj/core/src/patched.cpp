#include "deltalab/patched.hpp"

#include <cmath>
#include <stdexcept>

namespace deltalab {

namespace {

double bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double bump_deriv(double u) {
    if (u <= 0.0) return 0.0;
    const double e = std::exp(-1.0 / u);
    return e / (u * u);
}

double transition_slope(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double b = bump(u);
    return b / (b + bump(1.0 - u));
}

double transition_slope_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double b = bump(u);
    const double g = bump(1.0 - u);
    const double num = bump_deriv(u) * g + b * bump_deriv(1.0 - u);
    const double den = (b + g) * (b + g);
    return num / den;
}

// adaptive Simpson with absolute tolerance
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

constexpr double kQuadTol = 1e-12;

} // namespace

double TransitionFn::slope(double y) const { return transition_slope(y / y0); }

double TransitionFn::curvature(double y) const {
    return transition_slope_deriv(y / y0) / y0;
}

double TransitionFn::value(double y) const {
    if (y <= 0.0) return 0.0;
    auto s = [this](double yy) { return slope(yy); };
    if (y >= y0) return integrate(s, 0.0, y0, kQuadTol) + (y - y0);
    return integrate(s, 0.0, y, kQuadTol);
}

double TransitionFn::shift_constant() const { return y0 - value(y0); }

std::vector<std::string> TransitionFn::violations(std::size_t samples) const {
    std::vector<std::string> out;
    if (value(0.0) != 0.0) out.push_back("h(0) != 0");
    if (slope(0.0) != 0.0) out.push_back("h'(0) != 0");
    if (slope(y0) != 1.0 || curvature(y0) != 0.0)
        out.push_back("h' or h'' wrong at y0");
    double prev_slope = 0.0;
    for (std::size_t k = 1; k <= samples; ++k) {
        const double y = 1.5 * y0 * static_cast<double>(k) / static_cast<double>(samples);
        const double s = slope(y);
        if (s < prev_slope - 1e-14) {
            out.push_back("h' not monotone");
            break;
        }
        if (curvature(y) < 0.0) {
            out.push_back("h not convex");
            break;
        }
        if (y >= y0 && (s != 1.0 || curvature(y) != 0.0)) {
            out.push_back("h' != 1 beyond y0");
            break;
        }
        prev_slope = s;
    }
    return out;
}

double PatchedExample::v(double x, double t) const {
    const double w = t0 - t;
    const double y = x / w;
    return x * x * std::exp(t) + w * h.value(y);
}

double PatchedExample::v_x(double x, double t) const {
    const double y = x / (t0 - t);
    return 2.0 * x * std::exp(t) + h.slope(y);
}

double PatchedExample::coeff_before(double x, double t) const {
    const double w = t0 - t;
    const double y = x / w;
    const double et = std::exp(t);
    const double num = x * x * et * w + x * h.slope(y) - w * h.value(y);
    const double den = 2.0 * et * w + h.curvature(y);
    return num / den;
}

double PatchedExample::coeff_after(double x) const {
    return 0.5 * (x * x + shift_constant * std::exp(-t0));
}

double PatchedExample::v_residual(double x, double t) const {
    const double w = t0 - t;
    const double y = x / w;
    const double et = std::exp(t);
    const double vt = x * x * et - h.value(y) + y * h.slope(y);
    const double vxx = 2.0 * et + h.curvature(y) / w;
    return vt - coeff_before(x, t) * vxx;
}

DeltaEstimate PatchedExample::delta_at(double t) const {
    if (t < t0) {
        // evaluate the closed form on the solution grid so the spacing ladder
        // matches the solved piece
        std::vector<double> vals(w.grid.size());
        for (std::size_t i = 0; i < w.grid.size(); ++i) vals[i] = v(w.grid[i], t);
        return boundary_delta_values(w.grid.nodes, vals);
    }
    return boundary_delta(w, t - t0);
}

PatchedExample build_patched_counterexample(double t0, const Grid1D& grid,
                                            const TimeGrid& tgrid,
                                            const SolveOptions& options) {
    if (!(t0 > 0.0)) throw std::invalid_argument("patched example: t0 must be > 0");
    if (!(tgrid.horizon() > t0))
        throw std::invalid_argument("patched example: time grid must straddle t0");

    PatchedExample ex;
    ex.t0 = t0;
    ex.shift_constant = ex.h.shift_constant();
    ex.h_violations = ex.h.violations();

    // time levels at and beyond the patch time, shifted so w starts at 0
    TimeGrid wt;
    wt.times.push_back(0.0);
    for (double t : tgrid.times)
        if (t > t0 * (1.0 + 1e-12)) wt.times.push_back(t - t0);
    if (wt.times.size() < 2)
        throw std::invalid_argument("patched example: no time levels beyond t0");

    const double C = ex.shift_constant;
    const double add = C * std::exp(-t0);
    DiffusionModel model = make_custom_model(
        [add](double x, double) { return std::sqrt(x * x + add); },
        /*growth_constant=*/1.0 + std::sqrt(add), "patched-after");

    Payoff w0;
    w0.dim = 1;
    const double et0 = std::exp(t0);
    w0.g1 = [et0](double x) { return x * x * et0 + x; };
    w0.growth_degree = 2.0;
    w0.is_convex = true;
    w0.gprime0 = 1.0;
    w0.name = "patched-initial";

    ex.w = solve_1d(model, w0, grid, wt, options);
    return ex;
}

DeltaCurve patched_delta_curve(const PatchedExample& example, std::span<const double> times) {
    std::vector<DeltaEstimate> deltas;
    deltas.reserve(times.size());
    for (double t : times) deltas.push_back(example.delta_at(t));
    return analyze_delta_curve(std::vector<double>(times.begin(), times.end()),
                               std::move(deltas));
}

} // namespace deltalab
