#include "privcurve/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "privcurve/roots.h"
#include "privcurve/special.h"

namespace privcurve {
namespace detail {

class CurveImpl {
 public:
  virtual ~CurveImpl() = default;
  virtual double eval(double alpha) const = 0;
  virtual double deriv(double alpha) const = 0;
  virtual TradeoffCurve::Kind kind() const = 0;
  virtual bool degenerate() const { return false; }
  virtual const std::vector<TradeoffCurve>& components() const {
    static const std::vector<TradeoffCurve> kEmpty;
    return kEmpty;
  }
  virtual const std::vector<double>& crossing_points() const {
    static const std::vector<double> kEmpty;
    return kEmpty;
  }
  virtual std::optional<CrossoverPair> crossovers() const {
    return std::nullopt;
  }
  virtual double discretization_bound() const { return 0.0; }
};

namespace {

// Interior clamp for derivative evaluation; the derivative is defined on
// (0,1) and callers sampling U ~ Uniform(0,1) never hit the endpoints.
double clamp_interior(double a) {
  return std::min(std::max(a, 1e-300), 1.0 - 1e-16);
}

double chi2_logpdf(int k, double x) {
  return (0.5 * k - 1.0) * std::log(x) - 0.5 * x - std::lgamma(0.5 * k) -
         0.5 * k * M_LN2;
}

class GaussianCurve final : public CurveImpl {
 public:
  explicit GaussianCurve(double mu) : mu_(mu) {
    if (mu < 0.0) throw std::domain_error("gaussian_tradeoff: mu must be >= 0");
  }
  double eval(double a) const override {
    if (a <= 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    return normal_cdf(normal_quantile_upper(a) - mu_);
  }
  double deriv(double a) const override {
    const double z = normal_quantile_upper(clamp_interior(a));
    // phi(z - mu) / phi(z) in closed form.
    return -std::exp(mu_ * z - 0.5 * mu_ * mu_);
  }
  TradeoffCurve::Kind kind() const override {
    return TradeoffCurve::Kind::Gaussian;
  }

 private:
  double mu_;
};

class VarianceCurve final : public CurveImpl {
 public:
  VarianceCurve(double s1, double s2) : s1_(s1), s2_(s2), rho_(s1 / s2) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
      throw std::domain_error("variance_tradeoff: sigmas must be > 0");
    }
  }
  double eval(double a) const override {
    if (a <= 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    if (s1_ <= s2_) {
      // T1: reject when |x| is large.
      const double z = normal_quantile_upper(0.5 * a);
      return std::max(0.0, 2.0 * normal_cdf(rho_ * z) - 1.0);
    }
    // T2: reject when |x| is small.
    const double z = normal_quantile(0.5 * (1.0 + a));
    return 2.0 * normal_sf(rho_ * z);
  }
  double deriv(double a) const override {
    a = clamp_interior(a);
    const double z = s1_ <= s2_ ? normal_quantile_upper(0.5 * a)
                                : normal_quantile(0.5 * (1.0 + a));
    return -rho_ * std::exp(0.5 * z * z * (1.0 - rho_ * rho_));
  }
  TradeoffCurve::Kind kind() const override {
    return TradeoffCurve::Kind::VarianceShift;
  }

 private:
  double s1_, s2_, rho_;
};

class Chi2Curve final : public CurveImpl {
 public:
  Chi2Curve(double lambda, int dof) : lambda_(lambda), dof_(dof) {
    if (!(lambda > 0.0)) {
      throw std::domain_error("chi2_variance_tradeoff: lambda must be > 0");
    }
    if (dof < 1) {
      throw std::domain_error("chi2_variance_tradeoff: dof must be >= 1");
    }
  }
  double eval(double a) const override {
    if (a <= 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    if (lambda_ == 1.0) return 1.0 - a;
    if (lambda_ > 1.0) {
      // Alternative has larger scale: reject for large sum of squares.
      return chi2_cdf(dof_, chi2_quantile_upper(dof_, a) / lambda_);
    }
    // Mirrored test: reject for small sum of squares.
    return chi2_sf(dof_, chi2_quantile(dof_, a) / lambda_);
  }
  double deriv(double a) const override {
    a = clamp_interior(a);
    if (lambda_ == 1.0) return -1.0;
    const double c = lambda_ > 1.0 ? chi2_quantile_upper(dof_, a)
                                   : chi2_quantile(dof_, a);
    // Likelihood ratio in log space; the pdf ratio overflows for extreme a.
    return -std::exp(chi2_logpdf(dof_, c / lambda_) - chi2_logpdf(dof_, c) -
                     std::log(lambda_));
  }
  TradeoffCurve::Kind kind() const override {
    return TradeoffCurve::Kind::ChiSquared;
  }

 private:
  double lambda_;
  int dof_;
};

class ShiftedCurve final : public CurveImpl {
 public:
  ShiftedCurve(TradeoffCurve base, double gamma)
      : base_(std::move(base)), gamma_(gamma) {
    if (gamma < 0.0) {
      throw std::domain_error("sandwich_shift: gamma must be >= 0");
    }
  }
  double eval(double a) const override {
    if (degenerate()) return 0.0;
    return std::max(0.0, base_.eval(std::min(1.0, a + gamma_)) - gamma_);
  }
  double deriv(double a) const override {
    if (degenerate()) return 0.0;
    const double shifted = std::min(1.0, a + gamma_);
    if (shifted >= 1.0) return 0.0;                       // clipped: flat
    if (base_.eval(shifted) - gamma_ <= 0.0) return 0.0;  // clipped: flat
    return base_.deriv(shifted);
  }
  TradeoffCurve::Kind kind() const override {
    return TradeoffCurve::Kind::Shifted;
  }
  bool degenerate() const override { return gamma_ >= 0.5; }

 private:
  TradeoffCurve base_;
  double gamma_;
};

class MaxCurve final : public CurveImpl {
 public:
  explicit MaxCurve(std::vector<TradeoffCurve> cs) : components_(std::move(cs)) {
    if (components_.size() == 2) scan_crossings();
  }
  double eval(double a) const override {
    double best = components_[0].eval(a);
    for (size_t i = 1; i < components_.size(); ++i) {
      best = std::max(best, components_[i].eval(a));
    }
    return best;
  }
  double deriv(double a) const override {
    // Derivative of the active component; ties go to the first listed.
    size_t active = 0;
    double best = components_[0].eval(a);
    for (size_t i = 1; i < components_.size(); ++i) {
      const double v = components_[i].eval(a);
      if (v > best) {
        best = v;
        active = i;
      }
    }
    return components_[active].deriv(a);
  }
  TradeoffCurve::Kind kind() const override { return TradeoffCurve::Kind::Max; }
  const std::vector<TradeoffCurve>& components() const override {
    return components_;
  }
  const std::vector<double>& crossing_points() const override {
    return crossings_;
  }
  std::optional<CrossoverPair> crossovers() const override {
    if (crossings_.size() != 2) return std::nullopt;
    return CrossoverPair{crossings_[0], crossings_[1]};
  }

 private:
  void scan_crossings() {
    // Bracketed scan of the two-component difference over (0,1), then root
    // refinement. Zero runs (identical tails) are skipped: a crossing needs
    // a genuine sign change between the nearest nonzero values.
    constexpr int kCells = 2048;
    const double lo = 1e-9, hi = 1.0 - 1e-9;
    auto diff = [&](double a) {
      return components_[0].eval(a) - components_[1].eval(a);
    };
    double prev_a = lo;
    double prev_d = diff(lo);
    for (int i = 1; i <= kCells; ++i) {
      const double a = lo + (hi - lo) * double(i) / kCells;
      const double d = diff(a);
      if (d != 0.0) {
        if (prev_d != 0.0 && (prev_d > 0.0) != (d > 0.0)) {
          crossings_.push_back(find_root_bracketed(diff, prev_a, a, 1e-14));
        }
        prev_a = a;
        prev_d = d;
      }
    }
  }

  std::vector<TradeoffCurve> components_;
  std::vector<double> crossings_;
};

class TabulatedCurve final : public CurveImpl {
 public:
  TabulatedCurve(std::vector<double> alphas, std::vector<double> betas,
                 double bound)
      : alphas_(std::move(alphas)), betas_(std::move(betas)), bound_(bound) {
    if (alphas_.size() != betas_.size() || alphas_.size() < 2) {
      throw std::invalid_argument("tabulated_tradeoff: need >= 2 points");
    }
    if (!std::is_sorted(alphas_.begin(), alphas_.end())) {
      throw std::invalid_argument("tabulated_tradeoff: alphas must be sorted");
    }
  }
  double eval(double a) const override {
    if (a <= alphas_.front()) return betas_.front();
    if (a >= alphas_.back()) return betas_.back();
    const auto it = std::upper_bound(alphas_.begin(), alphas_.end(), a);
    const size_t i = size_t(it - alphas_.begin());
    const double w = (a - alphas_[i - 1]) / (alphas_[i] - alphas_[i - 1]);
    return betas_[i - 1] + w * (betas_[i] - betas_[i - 1]);
  }
  double deriv(double a) const override {
    size_t i = 1;
    if (a > alphas_.front()) {
      const auto it = std::upper_bound(alphas_.begin(), alphas_.end(), a);
      i = std::min(size_t(it - alphas_.begin()), alphas_.size() - 1);
    }
    return (betas_[i] - betas_[i - 1]) / (alphas_[i] - alphas_[i - 1]);
  }
  TradeoffCurve::Kind kind() const override {
    return TradeoffCurve::Kind::Tabulated;
  }
  double discretization_bound() const override { return bound_; }

 private:
  std::vector<double> alphas_, betas_;
  double bound_;
};

}  // namespace
}  // namespace detail

TradeoffCurve::TradeoffCurve(std::shared_ptr<const detail::CurveImpl> impl)
    : impl_(std::move(impl)) {}

double TradeoffCurve::eval(double alpha) const { return impl_->eval(alpha); }
double TradeoffCurve::deriv(double alpha) const { return impl_->deriv(alpha); }
TradeoffCurve::Kind TradeoffCurve::kind() const { return impl_->kind(); }
bool TradeoffCurve::degenerate() const { return impl_->degenerate(); }
const std::vector<TradeoffCurve>& TradeoffCurve::components() const {
  return impl_->components();
}
const std::vector<double>& TradeoffCurve::crossing_points() const {
  return impl_->crossing_points();
}
std::optional<CrossoverPair> TradeoffCurve::crossovers() const {
  return impl_->crossovers();
}
double TradeoffCurve::discretization_bound() const {
  return impl_->discretization_bound();
}

TradeoffCurve gaussian_tradeoff(double mu) {
  return TradeoffCurve(std::make_shared<detail::GaussianCurve>(mu));
}

TradeoffCurve variance_tradeoff(double sigma1, double sigma2) {
  return TradeoffCurve(std::make_shared<detail::VarianceCurve>(sigma1, sigma2));
}

TradeoffCurve chi2_variance_tradeoff(double lambda_ratio, int dof) {
  return TradeoffCurve(
      std::make_shared<detail::Chi2Curve>(lambda_ratio, dof));
}

TradeoffCurve sandwich_shift(const TradeoffCurve& base, double gamma) {
  return TradeoffCurve(std::make_shared<detail::ShiftedCurve>(base, gamma));
}

std::pair<TradeoffCurve, std::optional<CrossoverPair>> pointwise_max(
    const std::vector<TradeoffCurve>& curves) {
  if (curves.empty()) {
    throw std::invalid_argument("pointwise_max: need at least one curve");
  }
  if (curves.size() == 1) return {curves[0], std::nullopt};
  TradeoffCurve out(std::make_shared<detail::MaxCurve>(curves));
  return {out, out.crossovers()};
}

TradeoffCurve tabulated_tradeoff(std::vector<double> alphas,
                                 std::vector<double> betas,
                                 double discretization_bound) {
  return TradeoffCurve(std::make_shared<detail::TabulatedCurve>(
      std::move(alphas), std::move(betas), discretization_bound));
}

void export_curve_csv(const TradeoffCurve& curve, const std::string& path,
                      int points) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw std::runtime_error("export_curve_csv: cannot open " + path);
  }
  std::fputs("alpha,beta,derivative\n", f);
  for (int i = 1; i <= points; ++i) {
    const double a = double(i) / (points + 1);
    std::fprintf(f, "%.17g,%.17g,%.17g\n", a, curve.eval(a), curve.deriv(a));
  }
  std::fclose(f);
}

}  // namespace privcurve
