#pragma once

namespace privcurve {

// Standard normal. cdf/pdf are defined for all reals; quantile requires
// 0 < p < 1 and throws std::domain_error otherwise. Absolute error of
// cdf/pdf <= 1e-12; quantile(cdf(x)) = x to 1e-9 for |x| <= 6.
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);
// Upper-tail variants, numerically stable for tiny q: sf(x) = 1 - cdf(x),
// quantile_upper(q) = quantile(1 - q). Needed because trade-off formulas are
// phrased in terms of 1 - alpha and alpha can be within 1e-16 of 0 or 1.
double normal_sf(double x);
double normal_quantile_upper(double q);

// Chi-squared with k >= 1 degrees of freedom. cdf/pdf require x >= 0;
// quantile requires 0 < p < 1. Domain violations throw std::domain_error.
double chi2_cdf(int k, double x);
double chi2_pdf(int k, double x);
double chi2_quantile(int k, double p);
double chi2_sf(int k, double x);
double chi2_quantile_upper(int k, double q);

// Modified Bessel function of the second kind K_nu(x), x > 0, any real
// order (K_{-nu} = K_nu). Relative error <= 1e-9 for |nu| <= 50,
// x in [1e-6, 700]. When the value over- or underflows the double range the
// natural log of K_nu(x) is returned instead and *log_scaled is set; pass
// nullptr to have that case throw std::overflow_error.
double bessel_k(double order, double x, bool* log_scaled = nullptr);
// Always-log variant: ln K_nu(x).
double bessel_k_log(double order, double x);

}  // namespace privcurve
