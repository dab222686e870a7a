#pragma once

namespace robust {

// Φ⁻¹(3/4): upper quartile of the standard normal. Converts a median
// absolute deviation into a standard-deviation estimate, and appears in the
// calibration of median-of-absolute-projections scale estimators.
inline constexpr double kNormalUpperQuartile = 0.67448975019608174320;

// Median of the squared standard normal, i.e. kNormalUpperQuartile².
inline constexpr double kChiSq1Median = 0.45493642311957275194;

// Standard normal density at x.
double std_normal_pdf(double x);

// Standard normal cdf. Implemented in-repo (power series for small
// arguments, continued fraction for the tail); absolute error below 1e-12
// over the whole real line, measured closer to 2e-16.
double std_normal_cdf(double x);

// Inverse of std_normal_cdf on (0,1). Rational initial estimate refined by
// safeguarded Newton steps (bisection fallback keeps the iterate inside a
// monotone bracket). Guarantees |std_normal_cdf(result) - q| <= 1e-10.
// Throws DomainError outside (0,1).
double std_normal_quantile(double q);

// Quantile of |Z| for Z standard normal, q in [0,1).
double half_normal_quantile(double q);

// Quantile of Z² (chi-squared, one degree of freedom), q in [0,1).
// Equals half_normal_quantile(q)².
double chi2_1_quantile(double q);

}  // namespace robust
