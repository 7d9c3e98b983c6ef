#include "privcurve/oracle.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "privcurve/cf_invert.h"
#include "privcurve/special.h"

namespace privcurve {
namespace {

void check_density_spec(const MechanismSpec& spec, const char* who) {
  if (!(spec.sigma_theta > 0.0) || !(spec.sigma_z > 0.0)) {
    throw std::domain_error(std::string(who) + ": sigmas must be > 0");
  }
  if (spec.d < 2) {
    throw std::domain_error(std::string(who) +
                            ": d must be >= 2 (the d = 1 density diverges)");
  }
}

Eigen::MatrixXd gaussian_fill(Philox& rng, int rows, int cols) {
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = rng.next_gaussian();
  }
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> sample_product(const Eigen::MatrixXd& v,
                                            const MechanismSpec& spec,
                                            int count, RngStream stream) {
  if (v.rows() != spec.n || v.cols() != spec.d) {
    throw std::invalid_argument("sample_product: v must be n x d");
  }
  if (count < 0) throw std::invalid_argument("sample_product: count < 0");
  Philox rng(stream);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(size_t(count));
  for (int k = 0; k < count; ++k) {
    const Eigen::MatrixXd V =
        spec.sigma_theta * gaussian_fill(rng, spec.n, spec.d) + v;
    const Eigen::MatrixXd Z =
        spec.sigma_z * gaussian_fill(rng, spec.d, spec.l);
    out.push_back(V * Z);
  }
  return out;
}

DensityGrid density_vz_1d(double v_norm, const MechanismSpec& spec,
                          const Grid1D& grid) {
  check_density_spec(spec, "density_vz_1d");
  if (v_norm < 0.0) {
    throw std::domain_error("density_vz_1d: v_norm must be >= 0");
  }
  const double c2 =
      spec.sigma_z * spec.sigma_z * spec.sigma_theta * spec.sigma_theta;
  const double vz2 = spec.sigma_z * spec.sigma_z * v_norm * v_norm;
  const double half_d = 0.5 * spec.d;
  const auto phi = [=](double t) {
    const double t2 = t * t;
    const double denom = 1.0 + c2 * t2;
    return std::complex<double>(
        std::pow(denom, -half_d) * std::exp(-0.5 * vz2 * t2 / denom), 0.0);
  };
  DensityGrid out = invert_characteristic_function_1d(phi, grid);
  if (out.mass < 1.0 - 1e-4) {
    throw std::runtime_error(
        "density_vz_1d: grid captures less than 1 - 1e-4 of the mass; widen "
        "it");
  }
  if (v_norm == 0.0) {
    // Independent closed form; disagreement means the inversion (or the
    // Bessel evaluation) is wrong, so fail loudly rather than return numbers.
    double sup = 0.0;
    for (int i = 0; i < out.grid.n_points; ++i) {
      sup = std::max(sup, std::abs(out.grid.values[size_t(i)] -
                                   bessel_density_vz0(out.grid.x(i), spec)));
    }
    if (sup > 1e-6) {
      throw std::runtime_error(
          "density_vz_1d: closed-form cross-check failed (sup error " +
          std::to_string(sup) + ")");
    }
  }
  return out;
}

double bessel_density_vz0(double s, const MechanismSpec& spec) {
  check_density_spec(spec, "bessel_density_vz0");
  const double c = spec.sigma_theta * spec.sigma_z;
  const double nu = 0.5 * (spec.d - 1);
  const double x = std::abs(s) / c;
  if (x == 0.0) {
    // x^nu K_nu(x) -> Gamma(nu) 2^(nu-1) as x -> 0.
    return std::exp(std::lgamma(nu) - std::lgamma(0.5 * spec.d)) /
           (2.0 * std::sqrt(M_PI) * c);
  }
  const double logf = nu * std::log(x) + bessel_k_log(nu, x) - nu * M_LN2 -
                      0.5 * std::log(M_PI) - std::lgamma(0.5 * spec.d);
  return std::exp(logf) / c;
}

TradeoffCurve exact_tradeoff_1d(const DensityGrid& p, const DensityGrid& q,
                                const std::vector<double>& alphas) {
  if (p.grid.lo != q.grid.lo || p.grid.hi != q.grid.hi ||
      p.grid.n_points != q.grid.n_points) {
    throw std::invalid_argument("exact_tradeoff_1d: densities on equal grids");
  }
  if (alphas.size() < 2 || !std::is_sorted(alphas.begin(), alphas.end())) {
    throw std::invalid_argument(
        "exact_tradeoff_1d: need >= 2 sorted evaluation points");
  }
  const double h = p.grid.spacing();
  const int n = p.grid.n_points;

  // Atoms of the discretized pair, sorted by likelihood ratio q/p descending:
  // the randomized Neyman-Pearson test rejects atoms in this order, tracing
  // the exact trade-off polygon of the discrete pair.
  struct Atom {
    double ratio, pm, qm;
  };
  std::vector<Atom> atoms;
  atoms.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    const double pm = p.grid.values[size_t(i)] * h;
    const double qm = q.grid.values[size_t(i)] * h;
    if (pm == 0.0 && qm == 0.0) continue;
    const double ratio =
        pm > 0.0 ? qm / pm : std::numeric_limits<double>::infinity();
    atoms.push_back({ratio, pm, qm});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.ratio > b.ratio; });

  std::vector<double> poly_a{0.0}, poly_b{1.0};
  double cum_a = 0.0, cum_b = 1.0;
  for (const Atom& at : atoms) {
    cum_a += at.pm;
    cum_b -= at.qm;
    if (cum_a == poly_a.back()) {
      poly_b.back() = cum_b;  // vertical step: keep the lower beta
    } else {
      poly_a.push_back(cum_a);
      poly_b.push_back(cum_b);
    }
  }

  std::vector<double> betas;
  betas.reserve(alphas.size());
  for (const double a : alphas) {
    if (a <= poly_a.front()) {
      betas.push_back(poly_b.front());
    } else if (a >= poly_a.back()) {
      betas.push_back(poly_b.back());
    } else {
      const auto it = std::upper_bound(poly_a.begin(), poly_a.end(), a);
      const size_t i = size_t(it - poly_a.begin());
      const double w = (a - poly_a[i - 1]) / (poly_a[i] - poly_a[i - 1]);
      betas.push_back(poly_b[i - 1] + w * (poly_b[i] - poly_b[i - 1]));
    }
  }

  const double bound = std::abs(1.0 - p.mass) + std::abs(1.0 - q.mass) +
                       p.truncation_bound + q.truncation_bound;
  return tabulated_tradeoff(alphas, std::move(betas), bound);
}

VerifyReport verify_single_point_bound(const MechanismSpec& spec,
                                       const std::vector<int>& d_list,
                                       const std::vector<double>& alphas,
                                       double tolerance) {
  VerifyReport report;
  report.pass = true;
  for (const int d : d_list) {
    MechanismSpec sp = spec;
    sp.d = d;
    const double s = sp.sigma_theta * sp.sigma_theta * d;
    const WorstCasePlacement wc = worst_case_placement(s, sp.Delta);
    const TradeoffCurve bound = single_point_bound(sp);
    const TradeoffCurve floor = gaussian_tradeoff(sp.Delta / sp.sigma_theta);

    // 12 standard deviations of the wider alternative; the product tails are
    // subexponential so this loses far less mass than the 1e-4 budget.
    const double hw =
        12.0 * sp.sigma_z * std::sqrt(s + wc.w_star * wc.w_star);
    Grid1D grid(-hw, hw, 1 << 15);
    const DensityGrid dp = density_vz_1d(wc.v_star, sp, grid);
    const DensityGrid dq = density_vz_1d(wc.w_star, sp, grid);
    const TradeoffCurve exact = exact_tradeoff_1d(dp, dq, alphas);

    VerifyDimension dim;
    dim.d = d;
    dim.discretization_bound = exact.discretization_bound();
    dim.pass = true;
    for (const double a : alphas) {
      VerifyRecord rec;
      rec.alpha = a;
      rec.exact_beta = exact.eval(a);
      rec.bound_beta = bound.eval(a);
      rec.floor_beta = floor.eval(a);
      rec.margin = std::min(rec.exact_beta - rec.bound_beta,
                            rec.exact_beta - rec.floor_beta);
      rec.pass = rec.margin >= -tolerance;
      dim.pass = dim.pass && rec.pass;
      dim.records.push_back(rec);
    }
    report.pass = report.pass && dim.pass;
    report.dims.push_back(std::move(dim));
  }
  return report;
}

EmpiricalRoc empirical_power(
    const std::vector<Eigen::MatrixXd>& samples0,
    const std::vector<Eigen::MatrixXd>& samples1,
    const std::function<double(const Eigen::MatrixXd&)>& statistic,
    const std::vector<double>& thresholds) {
  if (samples0.empty() || samples1.empty()) {
    throw std::invalid_argument("empirical_power: empty sample set");
  }
  std::vector<double> t0, t1;
  t0.reserve(samples0.size());
  t1.reserve(samples1.size());
  for (const auto& s : samples0) t0.push_back(statistic(s));
  for (const auto& s : samples1) t1.push_back(statistic(s));

  EmpiricalRoc roc;
  const double n0 = double(t0.size()), n1 = double(t1.size());
  for (const double c : thresholds) {
    double rej0 = 0.0, acc1 = 0.0;
    for (const double t : t0) rej0 += t > c ? 1.0 : 0.0;
    for (const double t : t1) acc1 += t <= c ? 1.0 : 0.0;
    const double a = rej0 / n0, b = acc1 / n1;
    roc.alpha_hat.push_back(a);
    roc.beta_hat.push_back(b);
    roc.alpha_se.push_back(std::sqrt(a * (1.0 - a) / n0));
    roc.beta_se.push_back(std::sqrt(b * (1.0 - b) / n1));
  }
  return roc;
}

GaussianRowModel simulate_ngd(const RidgeProblem& problem,
                              const NgdConfig& config, int reps,
                              RngStream stream) {
  problem.validate();
  if (config.stationary) {
    throw std::invalid_argument("simulate_ngd: needs a finite horizon");
  }
  if (!(config.eta > 0.0) || config.sigma < 0.0 || config.steps < 0) {
    throw std::domain_error("simulate_ngd: bad config");
  }
  if (reps < 2) throw std::invalid_argument("simulate_ngd: reps must be >= 2");

  const double m = double(problem.X.rows());
  const int d = int(problem.X.cols());
  const int n = int(problem.Y.cols());
  const Eigen::MatrixXd S =
      problem.X.transpose() * problem.X / m +
      problem.lambda * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d) - 2.0 * config.eta * S;
  const Eigen::MatrixXd B =
      (2.0 * config.eta / m) * problem.Y.transpose() * problem.X;
  const double noise = std::sqrt(2.0 * config.eta) * config.sigma;

  Eigen::MatrixXd mean_sum = Eigen::MatrixXd::Zero(n, d);
  std::vector<Eigen::MatrixXd> outer_sum(size_t(n),
                                         Eigen::MatrixXd::Zero(d, d));
  for (int r = 0; r < reps; ++r) {
    Philox rng(stream.substream(uint64_t(r)));
    Eigen::MatrixXd V = gaussian_fill(rng, n, d);
    for (int t = 0; t < config.steps; ++t) {
      V = V * M + B + noise * gaussian_fill(rng, n, d);
    }
    mean_sum += V;
    for (int i = 0; i < n; ++i) {
      outer_sum[size_t(i)] += V.row(i).transpose() * V.row(i);
    }
  }

  GaussianRowModel out;
  out.means = mean_sum / double(reps);
  // Rows are independent with a shared covariance: pool the per-row sample
  // covariances, each centered at its own empirical mean.
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd mi = out.means.row(i).transpose();
    pooled += outer_sum[size_t(i)] - double(reps) * mi * mi.transpose();
  }
  out.row_cov = pooled / (double(n) * (reps - 1));
  return out;
}

}  // namespace privcurve
