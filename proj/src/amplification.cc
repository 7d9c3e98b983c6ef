#include "privcurve/amplification.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "privcurve/parallel.h"

namespace privcurve {
namespace {

void check_spec(const MechanismSpec& spec) {
  if (!(spec.sigma_theta > 0.0) || !(spec.sigma_z > 0.0)) {
    throw std::domain_error("MechanismSpec: sigmas must be > 0");
  }
  if (spec.d < 1 || spec.n < 1 || spec.l < 1) {
    throw std::domain_error("MechanismSpec: d, n, l must be >= 1");
  }
  if (spec.Delta < 0.0 || spec.C < 0.0) {
    throw std::domain_error("MechanismSpec: Delta and C must be >= 0");
  }
}

void check_order(double alpha, const char* who) {
  if (!(alpha > 1.0)) {
    throw std::domain_error(std::string(who) + ": order alpha must be > 1");
  }
}

}  // namespace

WorstCasePlacement worst_case_placement(double s, double Delta) {
  if (!(s > 0.0)) {
    throw std::domain_error("worst_case_placement: s must be > 0");
  }
  if (Delta < 0.0) {
    throw std::domain_error("worst_case_placement: Delta must be >= 0");
  }
  WorstCasePlacement out;
  out.v_star = 0.5 * (std::sqrt(Delta * Delta + 4.0 * s) - Delta);
  out.w_star = out.v_star + Delta;
  out.r = (s + out.v_star * out.v_star) / (s + out.w_star * out.w_star);
  return out;
}

TradeoffCurve single_point_bound(const MechanismSpec& spec) {
  check_spec(spec);
  const double s = spec.sigma_theta * spec.sigma_theta * spec.d;
  const WorstCasePlacement wc = worst_case_placement(s, spec.Delta);
  const TradeoffCurve floor = gaussian_tradeoff(spec.Delta / spec.sigma_theta);
  const TradeoffCurve limit = variance_tradeoff(
      std::sqrt(s + wc.v_star * wc.v_star), std::sqrt(s + wc.w_star * wc.w_star));
  const TradeoffCurve shifted = sandwich_shift(limit, spec.C / spec.d);
  return pointwise_max({floor, shifted}).first;
}

TradeoffCurve multi_point_bound(const MechanismSpec& spec) {
  check_spec(spec);
  if (spec.d <= spec.n || spec.d < spec.l) {
    throw std::domain_error("multi_point_bound: needs d > n and d >= l");
  }
  const double s = spec.sigma_theta * spec.sigma_theta * (spec.d - spec.n);
  const WorstCasePlacement wc = worst_case_placement(s, spec.Delta);
  const double lambda =
      (s + wc.w_star * wc.w_star) / (s + wc.v_star * wc.v_star);
  const double gamma =
      spec.C * spec.n * std::sqrt(double(spec.l) / (spec.d - spec.n));
  const TradeoffCurve floor = gaussian_tradeoff(spec.Delta / spec.sigma_theta);
  const TradeoffCurve shifted =
      sandwich_shift(chi2_variance_tradeoff(lambda, spec.n * spec.l), gamma);
  return pointwise_max({floor, shifted}).first;
}

double renyi_gaussian_shift(double alpha, double Delta, double sigma) {
  check_order(alpha, "renyi_gaussian_shift");
  if (!(sigma > 0.0)) {
    throw std::domain_error("renyi_gaussian_shift: sigma must be > 0");
  }
  return alpha * Delta * Delta / (2.0 * sigma * sigma);
}

double renyi_variance_max(double alpha, double s, double Delta) {
  check_order(alpha, "renyi_variance_max");
  const double r = worst_case_placement(s, Delta).r;
  // Finite iff alpha r + 1 - alpha > 0, i.e. s > alpha (alpha - 1) Delta^2.
  const double tail = alpha * r + 1.0 - alpha;
  if (!(tail > 0.0)) return std::numeric_limits<double>::infinity();
  return (alpha * std::log(r) - std::log(tail)) / (2.0 * (alpha - 1.0));
}

double renyi_multi_upper(double alpha, double s, double Delta, int n, int l) {
  if (n < 1 || l < 1) {
    throw std::domain_error("renyi_multi_upper: n, l must be >= 1");
  }
  return double(n) * double(l) * renyi_variance_max(alpha, s, Delta);
}

RenyiEstimate fdp_to_rdp_mc(const TradeoffCurve& curve, double alpha, long L,
                            int M, RngStream stream) {
  check_order(alpha, "fdp_to_rdp_mc");
  if (L < 1) throw std::domain_error("fdp_to_rdp_mc: L must be >= 1");
  if (M < 2) throw std::domain_error("fdp_to_rdp_mc: M must be >= 2");

  RenyiEstimate out;
  out.alpha = alpha;
  out.replications = M;
  out.samples_per_rep = L;

  // The change-of-measure identity behind the estimator requires a strictly
  // positive curve on (0,1); a curve hitting zero early has an infinite
  // divergence of every order.
  if (!(curve.eval(1.0 - 1e-9) > 0.0)) {
    out.value = std::numeric_limits<double>::infinity();
    out.infinite = true;
    return out;
  }

  std::vector<double> reps(static_cast<size_t>(M));
  parallel_for(size_t(M), [&](size_t k) {
    Philox rng(stream.substream(uint64_t(k)));
    // log sum exp of (1 - alpha) log |f'(U_j)|, stored for the second pass.
    std::vector<double> lt(static_cast<size_t>(L));
    double max_lt = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < L; ++j) {
      const double d = std::abs(curve.deriv(rng.next_double()));
      const double v = d > 0.0 ? (1.0 - alpha) * std::log(d)
                               : std::numeric_limits<double>::infinity();
      lt[size_t(j)] = v;
      max_lt = std::max(max_lt, v);
    }
    if (std::isinf(max_lt)) {
      reps[k] = max_lt > 0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
      return;
    }
    double sum = 0.0;
    for (long j = 0; j < L; ++j) sum += std::exp(lt[size_t(j)] - max_lt);
    reps[k] = (max_lt + std::log(sum / double(L))) / (alpha - 1.0);
  });

  double mean = 0.0;
  for (int k = 0; k < M; ++k) mean += reps[size_t(k)];
  mean /= M;
  double ss = 0.0;
  for (int k = 0; k < M; ++k) {
    const double dev = reps[size_t(k)] - mean;
    ss += dev * dev;
  }
  out.value = mean;
  out.std_error = std::sqrt(ss / (M - 1));
  out.infinite = !std::isfinite(mean);
  return out;
}

}  // namespace privcurve
