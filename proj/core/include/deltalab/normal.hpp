#pragma once

namespace deltalab {

/// Standard normal CDF. Absolute error below 1e-14 against the defining
/// integral (erfc-based; see tests/test_normal.cpp for the quadrature check).
double norm_cdf(double z);

/// Standard normal density.
double norm_pdf(double z);

/// Inverse standard normal CDF for p in (0,1), Wichura's PPND16 rational
/// approximation (relative error ~1e-16). Used by the Monte Carlo engine so
/// the uniform-to-normal map is fixed and platform independent.
double inv_norm_cdf(double p);

} // namespace deltalab
