#include "deltalab/stepper.hpp"

#include "deltalab/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace deltalab {

Stencil1D::Stencil1D(std::span<const double> x) {
    const std::size_t m = x.size();
    if (m < 3) throw std::invalid_argument("Stencil1D: need at least 3 nodes");
    wl.resize(m - 2);
    wc.resize(m - 2);
    wr.resize(m - 2);
    dl.resize(m - 2);
    dc.resize(m - 2);
    dr.resize(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double hl = x[i] - x[i - 1];
        const double hr = x[i + 1] - x[i];
        if (!(hl > 0.0) || !(hr > 0.0))
            throw std::invalid_argument("Stencil1D: nodes must be strictly increasing");
        const std::size_t k = i - 1;
        wl[k] = 2.0 / (hl * (hl + hr));
        wc[k] = -2.0 / (hl * hr);
        wr[k] = 2.0 / (hr * (hl + hr));
        dl[k] = -hr / (hl * (hl + hr));
        dc[k] = (hr - hl) / (hl * hr);
        dr[k] = hl / (hr * (hl + hr));
    }
    far_ratio = (x[m - 1] - x[m - 2]) / (x[m - 2] - x[m - 3]);
}

ThetaStepper::ThetaStepper(const Grid1D& grid, CoefFn a, FarField far,
                           std::optional<LowerOrderTerms> lot)
    : x_(grid.nodes), stencil_(grid.nodes), a_(std::move(a)), lot_(std::move(lot)), far_(far) {
    const std::size_t n = x_.size() - 2;
    exp_l_.resize(n);
    exp_c_.resize(n);
    exp_r_.resize(n);
    lo_.resize(n);
    di_.resize(n);
    up_.resize(n);
    cp_.resize(n);
    piv_.resize(n);
    rhs_.resize(n);
    dscratch_.resize(n);
}

void ThetaStepper::prepare(double t0, double t1, double theta) {
    if (has_key_ && t0 == key_t0_ && t1 == key_t1_ && theta == key_theta_) return;
    key_t0_ = t0;
    key_t1_ = t1;
    key_theta_ = theta;
    has_key_ = true;

    const std::size_t n = x_.size() - 2;
    const double dt = t1 - t0;

    auto op_weights = [&](double t, std::size_t k, double& l, double& c, double& r) {
        const double xi = x_[k + 1];
        const double a = a_(xi, t);
        l = a * stencil_.wl[k];
        c = a * stencil_.wc[k];
        r = a * stencil_.wr[k];
        if (lot_) {
            const double b = lot_->b(xi, t);
            const double cc = lot_->c(xi, t);
            l += b * stencil_.dl[k];
            c += b * stencil_.dc[k] + cc;
            r += b * stencil_.dr[k];
            if (a > 0.0) {
                const double h = x_[k + 2] - x_[k];
                const double pe = std::fabs(b) * 0.5 * h / a;
                if (pe > max_peclet_) max_peclet_ = pe;
            }
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        double l, c, r;
        if (theta < 1.0) {
            op_weights(t0, k, l, c, r);
            exp_l_[k] = (1.0 - theta) * dt * l;
            exp_c_[k] = (1.0 - theta) * dt * c;
            exp_r_[k] = (1.0 - theta) * dt * r;
        }
        op_weights(t1, k, l, c, r);
        lo_[k] = -theta * dt * l;
        di_[k] = 1.0 - theta * dt * c;
        up_[k] = -theta * dt * r;
    }

    if (far_ == FarField::SecondDerivativeZero) {
        // u_{m-1} = (1+r) u_{m-2} - r u_{m-3} folded into the last row
        const double r = stencil_.far_ratio;
        di_[n - 1] += up_[n - 1] * (1.0 + r);
        lo_[n - 1] -= up_[n - 1] * r;
    }

    // Thomas forward elimination of the matrix alone (rhs handled per line)
    double piv = di_[0];
    if (piv == 0.0) throw SolverError("singular tridiagonal system", t1, 1);
    piv_[0] = piv;
    cp_[0] = up_[0] / piv;
    for (std::size_t k = 1; k < n; ++k) {
        piv = di_[k] - lo_[k] * cp_[k - 1];
        if (piv == 0.0) throw SolverError("singular tridiagonal system", t1, k + 1);
        piv_[k] = piv;
        cp_[k] = up_[k] / piv;
    }
}

void ThetaStepper::step(std::span<double> u, double t0, double t1, double theta,
                        double boundary0) {
    const std::size_t m = x_.size();
    const std::size_t n = m - 2;
    prepare(t0, t1, theta);

    if (theta < 1.0) {
        for (std::size_t k = 0; k < n; ++k)
            rhs_[k] = u[k + 1] + exp_l_[k] * u[k] + exp_c_[k] * u[k + 1] + exp_r_[k] * u[k + 2];
    } else {
        for (std::size_t k = 0; k < n; ++k) rhs_[k] = u[k + 1];
    }
    rhs_[0] -= lo_[0] * boundary0;
    if (far_ == FarField::DirichletPayoff) rhs_[n - 1] -= up_[n - 1] * u[m - 1];

    // forward/back substitution with cached pivots
    dscratch_[0] = rhs_[0] / piv_[0];
    for (std::size_t k = 1; k < n; ++k)
        dscratch_[k] = (rhs_[k] - lo_[k] * dscratch_[k - 1]) / piv_[k];
    u[n] = dscratch_[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) u[k + 1] = dscratch_[k] - cp_[k] * u[k + 2];

    u[0] = boundary0;
    if (far_ == FarField::SecondDerivativeZero)
        u[m - 1] = (1.0 + stencil_.far_ratio) * u[m - 2] - stencil_.far_ratio * u[m - 3];

    for (std::size_t k = 0; k < m; ++k)
        if (!std::isfinite(u[k]))
            throw SolverError("non-finite solution value (instability)", t1, k);
}

} // namespace deltalab
