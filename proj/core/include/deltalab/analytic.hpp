#pragma once

namespace deltalab {

/// Driftless Black-Scholes call value
///   u(x,t) = x Phi(d1) - K Phi(d2),  d1,2 = (ln(x/K) +- sigma^2 t/2)/sqrt(sigma^2 t)
/// with t the time to maturity. u(0,t) = 0; t = 0 returns the payoff (x-K)^+.
double bs_call_price(double x, double t, double sigma, double strike);

/// Call delta u_x = Phi(d1); equals 0 at x = 0 and converges to 1 as x -> inf.
double bs_call_delta(double x, double t, double sigma, double strike);

/// Boundary delta of the CEV beta = 1 call: u_x(0,t) = exp(-2K/(sigma^2 t)).
/// Strictly inside (0,1) for t > 0; rejects t <= 0.
double cev_beta1_boundary_delta(double t, double sigma, double strike);

struct PowerOptionValue {
    double value = 0.0;
    /// u_x(0,t) exists iff gamma >= 1; callers asking for the boundary delta
    /// of a gamma < 1 power claim get a divergence verdict, not a number.
    bool boundary_delta_exists = true;
};

/// Power claim under a(x,t) = x^2:  u(x,t) = x^gamma exp((gamma^2-gamma) t).
PowerOptionValue power_option_price(double x, double t, double gamma);

/// Exchange option on two independent driftless GBMs, payoff (x2-x1)^+,
/// effective variance sigma1^2 + sigma2^2:
///   u = x2 Phi(d+) - x1 Phi(d-),  d+- = (ln(x2/x1) +- s^2 t/2)/(s sqrt(t)).
/// Limits: u(0,x2) = x2, u(x1,0) = 0.
double margrabe_price(double x1, double x2, double t, double sigma1, double sigma2);

} // namespace deltalab
