#include "privcurve/special.h"

#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_randist.h>
#include <gsl/gsl_sf_bessel.h>

namespace privcurve {
namespace {

// GSL's default error handler aborts the process; turn it off once and
// surface problems as exceptions instead.
const int kGslHandlerOff = [] {
  gsl_set_error_handler_off();
  return 0;
}();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must be in (0,1)");
  return gsl_cdf_ugaussian_Pinv(p);
}

double normal_quantile_upper(double q) {
  require(q > 0.0 && q < 1.0, "normal_quantile_upper: q must be in (0,1)");
  return gsl_cdf_ugaussian_Qinv(q);
}

double chi2_cdf(int k, double x) {
  require(k >= 1, "chi2_cdf: k must be >= 1");
  require(x >= 0.0, "chi2_cdf: x must be >= 0");
  return gsl_cdf_chisq_P(x, double(k));
}

double chi2_sf(int k, double x) {
  require(k >= 1, "chi2_sf: k must be >= 1");
  require(x >= 0.0, "chi2_sf: x must be >= 0");
  return gsl_cdf_chisq_Q(x, double(k));
}

double chi2_pdf(int k, double x) {
  require(k >= 1, "chi2_pdf: k must be >= 1");
  require(x >= 0.0, "chi2_pdf: x must be >= 0");
  return gsl_ran_chisq_pdf(x, double(k));
}

double chi2_quantile(int k, double p) {
  require(k >= 1, "chi2_quantile: k must be >= 1");
  require(p > 0.0 && p < 1.0, "chi2_quantile: p must be in (0,1)");
  return gsl_cdf_chisq_Pinv(p, double(k));
}

double chi2_quantile_upper(int k, double q) {
  require(k >= 1, "chi2_quantile_upper: k must be >= 1");
  require(q > 0.0 && q < 1.0, "chi2_quantile_upper: q must be in (0,1)");
  return gsl_cdf_chisq_Qinv(q, double(k));
}

double bessel_k_log(double order, double x) {
  require(x > 0.0, "bessel_k: x must be > 0");
  gsl_sf_result res;
  // K is even in the order.
  const int status = gsl_sf_bessel_lnKnu_e(std::fabs(order), x, &res);
  if (status != GSL_SUCCESS) {
    throw std::domain_error(std::string("bessel_k: lnKnu failed: ") +
                            gsl_strerror(status));
  }
  return res.val;
}

double bessel_k(double order, double x, bool* log_scaled) {
  const double lnk = bessel_k_log(order, x);
  if (log_scaled != nullptr) *log_scaled = false;
  // exp() would overflow above ~709.78 or underflow to 0 below ~-745; hand
  // back the log-scaled value in that range.
  if (lnk > std::log(DBL_MAX) || lnk < std::log(DBL_MIN)) {
    if (log_scaled == nullptr) {
      throw std::overflow_error("bessel_k: value outside double range");
    }
    *log_scaled = true;
    return lnk;
  }
  return std::exp(lnk);
}

}  // namespace privcurve
