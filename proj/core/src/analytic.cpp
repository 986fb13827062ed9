#include "deltalab/analytic.hpp"

#include "deltalab/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace deltalab {

namespace {

void require_bs_args(double x, double t, double sigma, double strike) {
    if (!(x >= 0.0)) throw std::invalid_argument("bs_call: x must be >= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("bs_call: t must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("bs_call: sigma must be > 0");
    if (!(strike > 0.0)) throw std::invalid_argument("bs_call: strike must be > 0");
}

} // namespace

double bs_call_price(double x, double t, double sigma, double strike) {
    require_bs_args(x, t, sigma, strike);
    if (x == 0.0) return 0.0;
    if (t == 0.0) return std::max(x - strike, 0.0); // payoff limit, no division by zero
    const double s = sigma * std::sqrt(t);
    const double d1 = (std::log(x / strike) + 0.5 * sigma * sigma * t) / s;
    const double d2 = d1 - s;
    return x * norm_cdf(d1) - strike * norm_cdf(d2);
}

double bs_call_delta(double x, double t, double sigma, double strike) {
    require_bs_args(x, t, sigma, strike);
    if (x == 0.0) return 0.0;
    if (t == 0.0) return x >= strike ? 1.0 : 0.0;
    const double s = sigma * std::sqrt(t);
    const double d1 = (std::log(x / strike) + 0.5 * sigma * sigma * t) / s;
    return norm_cdf(d1);
}

double cev_beta1_boundary_delta(double t, double sigma, double strike) {
    if (!(t > 0.0)) throw std::invalid_argument("cev_beta1_boundary_delta: t must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("cev_beta1_boundary_delta: sigma must be > 0");
    if (!(strike > 0.0)) throw std::invalid_argument("cev_beta1_boundary_delta: strike must be > 0");
    return std::exp(-2.0 * strike / (sigma * sigma * t));
}

PowerOptionValue power_option_price(double x, double t, double gamma) {
    if (!(x >= 0.0)) throw std::invalid_argument("power_option_price: x must be >= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("power_option_price: t must be >= 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("power_option_price: gamma must be > 0");
    PowerOptionValue out;
    out.boundary_delta_exists = gamma >= 1.0;
    out.value = (x == 0.0 ? 0.0 : std::pow(x, gamma)) * std::exp((gamma * gamma - gamma) * t);
    return out;
}

double margrabe_price(double x1, double x2, double t, double sigma1, double sigma2) {
    if (!(x1 >= 0.0 && x2 >= 0.0))
        throw std::invalid_argument("margrabe_price: prices must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("margrabe_price: t must be > 0");
    if (!(sigma1 > 0.0 && sigma2 > 0.0))
        throw std::invalid_argument("margrabe_price: sigmas must be > 0");
    if (x2 == 0.0) return 0.0;        // (0 - x1)^+ pathwise
    if (x1 == 0.0) return x2;         // E x2(T) of a martingale
    const double s = std::sqrt((sigma1 * sigma1 + sigma2 * sigma2) * t);
    const double dp = (std::log(x2 / x1) + 0.5 * s * s) / s;
    const double dm = dp - s;
    return x2 * norm_cdf(dp) - x1 * norm_cdf(dm);
}

} // namespace deltalab
