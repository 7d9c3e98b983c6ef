#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace privcurve {

struct CrossoverPair {
  double c1 = 0.0;  // 0 < c1 < c2 < 1
  double c2 = 0.0;
};

namespace detail {
class CurveImpl;
}

// A trade-off function: the map from type-I error alpha in [0,1] to the
// minimal achievable type-II error beta. Every curve is convex,
// non-increasing, with eval(0) <= 1 and eval(1) = 0; deriv is the one-sided
// derivative (<= 0), taken from the active component at kinks of a max
// curve (ties broken toward the first-listed component).
//
// Curves are immutable closed-form objects evaluated on demand; tabulation
// happens only at CSV export. Rationale: the Monte Carlo Renyi conversion
// integrates |deriv|^{1-alpha}, and interpolation error would contaminate
// that integrand.
class TradeoffCurve {
 public:
  enum class Kind { Gaussian, VarianceShift, ChiSquared, Shifted, Max, Tabulated };

  double eval(double alpha) const;
  double deriv(double alpha) const;
  Kind kind() const;

  // True for a Shifted curve whose shift gamma >= 1/2 (identically zero) --
  // such a curve distinguishes nothing and carries no usable derivative.
  bool degenerate() const;

  // Max curves: component list, every sign change of the two-component
  // difference found by the bracketed scan, and the (c1, c2) pair when there
  // are exactly two. Other kinds return empty/nullopt.
  const std::vector<TradeoffCurve>& components() const;
  const std::vector<double>& crossing_points() const;
  std::optional<CrossoverPair> crossovers() const;

  // Tabulated curves (oracle output): reported discretization error bound.
  // Zero for closed-form kinds.
  double discretization_bound() const;

  explicit TradeoffCurve(std::shared_ptr<const detail::CurveImpl> impl);

 private:
  std::shared_ptr<const detail::CurveImpl> impl_;
};

// G_mu: trade-off between N(0,1) and N(mu,1); eval(a) = Phi(Phi^-1(1-a) - mu).
TradeoffCurve gaussian_tradeoff(double mu);

// Trade-off between centered Gaussians N(0, sigma1^2) and N(0, sigma2^2):
//   sigma1 <= sigma2:  T1(a) = 2 Phi((sigma1/sigma2) Phi^-1(1 - a/2)) - 1
//   sigma1 >  sigma2:  T2(a) = 2 - 2 Phi((sigma1/sigma2) Phi^-1((a+1)/2))
TradeoffCurve variance_tradeoff(double sigma1, double sigma2);

// Trade-off between chi-squared families whose covariances differ by a
// common eigenvalue ratio lambda (dof = n*l):
//   lambda > 1: F(F^-1(1-a)/lambda); lambda < 1: mirrored; lambda = 1: 1-a.
TradeoffCurve chi2_variance_tradeoff(double lambda_ratio, int dof);

// Total-variation sandwich shift: eval(a) = max(0, base(min(1, a+gamma)) -
// gamma). Requires 0 <= gamma; gamma >= 1/2 yields the degenerate
// identically-zero curve (flagged, not an error).
TradeoffCurve sandwich_shift(const TradeoffCurve& base, double gamma);

// Pointwise maximum. For two components, sign changes of their difference
// are located by a bracketed scan + root refinement over (0,1); exactly two
// changes yield a CrossoverPair.
std::pair<TradeoffCurve, std::optional<CrossoverPair>> pointwise_max(
    const std::vector<TradeoffCurve>& curves);

// Tabulated curve through the given (alpha, beta) pairs (linear
// interpolation, clamped outside). Used by the numeric oracle.
TradeoffCurve tabulated_tradeoff(std::vector<double> alphas,
                                 std::vector<double> betas,
                                 double discretization_bound);

// CSV export: header "alpha,beta,derivative", `points` uniformly spaced
// interior points alpha_i = i/(points+1).
void export_curve_csv(const TradeoffCurve& curve, const std::string& path,
                      int points = 1000);

}  // namespace privcurve
