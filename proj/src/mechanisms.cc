#include "privcurve/mechanisms.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "privcurve/cf_invert.h"
#include "privcurve/linalg.h"

namespace privcurve {
namespace {

// Row-norm slack: bounds are contracts on the data, checked with a relative
// tolerance so that constructed instances sitting exactly on the bound pass.
constexpr double kBoundSlack = 1.0 + 1e-9;

struct NgdMatrices {
  Eigen::MatrixXd S;  // X^T X / m + lambda I
  Eigen::MatrixXd B;  // (2 eta / m) Y^T X
  Eigen::VectorXd s_eigs;
  Eigen::MatrixXd s_vecs;
};

NgdMatrices ngd_matrices(const RidgeProblem& problem, double eta) {
  const double m = double(problem.X.rows());
  const int d = int(problem.X.cols());
  NgdMatrices out;
  out.S = problem.X.transpose() * problem.X / m +
          problem.lambda * Eigen::MatrixXd::Identity(d, d);
  out.B = (2.0 * eta / m) * problem.Y.transpose() * problem.X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.S);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("ngd_moments: eigendecomposition failed");
  }
  out.s_eigs = es.eigenvalues();
  out.s_vecs = es.eigenvectors();
  return out;
}

void check_ngd_config(const NgdConfig& config) {
  if (!(config.eta > 0.0)) {
    throw std::domain_error("ngd: eta must be > 0");
  }
  if (config.sigma < 0.0) {
    throw std::domain_error("ngd: sigma must be >= 0");
  }
  if (!config.stationary && config.steps < 0) {
    throw std::domain_error("ngd: steps must be >= 0");
  }
}

// Covariance eigendecomposition with a positive-definiteness check shared by
// the trade-off constructors.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> pd_eigs(const Eigen::MatrixXd& c,
                                                    const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string(who) +
                             ": covariance eigendecomposition failed");
  }
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() <= scale * 1e-14) {
    throw std::domain_error(std::string(who) +
                            ": row_cov must be positive definite");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

void check_same_cov(const GaussianRowModel& a, const GaussianRowModel& b,
                    const char* who) {
  if (a.means.rows() != b.means.rows() || a.means.cols() != b.means.cols()) {
    throw std::invalid_argument(std::string(who) + ": mean shapes differ");
  }
  if (a.row_cov.rows() != a.means.cols() ||
      a.row_cov.rows() != a.row_cov.cols()) {
    throw std::invalid_argument(std::string(who) + ": row_cov shape mismatch");
  }
  const double scale = std::max(1.0, a.row_cov.cwiseAbs().maxCoeff());
  if ((a.row_cov - b.row_cov).cwiseAbs().maxCoeff() > scale * 1e-12) {
    throw std::domain_error(std::string(who) +
                            ": models must share the row covariance");
  }
}

}  // namespace

void RidgeProblem::validate() const {
  if (X.rows() < 1 || X.cols() < 1 || Y.cols() < 1) {
    throw std::invalid_argument("RidgeProblem: X and Y must be nonempty");
  }
  if (X.rows() != Y.rows()) {
    throw std::invalid_argument("RidgeProblem: X and Y row counts differ");
  }
  if (!(lambda > 0.0)) {
    throw std::domain_error("RidgeProblem: lambda must be > 0");
  }
  if (M_x < 0.0 || M_y < 0.0 || M_theta < 0.0) {
    throw std::domain_error("RidgeProblem: norm bounds must be >= 0");
  }
  if (M_x > 0.0 && X.rowwise().norm().maxCoeff() > M_x * kBoundSlack) {
    throw std::domain_error("RidgeProblem: a row of X exceeds M_x");
  }
  if (M_y > 0.0 && Y.rowwise().norm().maxCoeff() > M_y * kBoundSlack) {
    throw std::domain_error("RidgeProblem: a row of Y exceeds M_y");
  }
}

Eigen::MatrixXd ridge_fit(const RidgeProblem& problem) {
  problem.validate();
  const double m = double(problem.X.rows());
  const int d = int(problem.X.cols());
  const Eigen::MatrixXd A =
      problem.X.transpose() * problem.X +
      m * problem.lambda * Eigen::MatrixXd::Identity(d, d);
  // A is symmetric positive definite (lambda > 0), so Cholesky applies.
  return A.llt().solve(problem.X.transpose() * problem.Y).transpose();
}

double ridge_sensitivity(double M_x, double M_y, double M_theta, double lambda,
                         int m) {
  if (m < 1) throw std::domain_error("ridge_sensitivity: m must be >= 1");
  if (!(lambda > 0.0)) {
    throw std::domain_error("ridge_sensitivity: lambda must be > 0");
  }
  if (M_x < 0.0 || M_y < 0.0 || M_theta < 0.0) {
    throw std::domain_error("ridge_sensitivity: bounds must be >= 0");
  }
  return 2.0 * (M_x * M_x * M_theta + M_x * M_y + lambda * M_theta) /
         (m * lambda);
}

Eigen::MatrixXd output_perturb(const Eigen::MatrixXd& weights,
                               double sigma_theta, RngStream stream) {
  if (sigma_theta < 0.0) {
    throw std::domain_error("output_perturb: sigma_theta must be >= 0");
  }
  return weights + rng_gaussian_matrix(stream, int(weights.rows()),
                                       int(weights.cols()), sigma_theta);
}

GaussianRowModel ngd_moments(const RidgeProblem& problem,
                             const NgdConfig& config) {
  problem.validate();
  check_ngd_config(config);
  const NgdMatrices nm = ngd_matrices(problem, config.eta);
  const int d = int(nm.S.rows());
  const double two_eta_s2 = 2.0 * config.eta * config.sigma * config.sigma;

  if (config.stationary &&
      !(config.eta * nm.s_eigs.maxCoeff() < 0.5)) {
    throw std::domain_error(
        "ngd_moments: stationary law needs eta * lambda_max(S) < 1/2");
  }

  // Per eigendirection of S (eigenvalue s, contraction factor m = 1 - 2 eta
  // s): the geometric sums sum_{j<t} m^j and sum_{j<t} m^{2j}.
  Eigen::VectorXd mean_sum(d), cov_diag(d);
  for (int i = 0; i < d; ++i) {
    const double mi = 1.0 - 2.0 * config.eta * nm.s_eigs[i];
    if (config.stationary) {
      mean_sum[i] = 1.0 / (1.0 - mi);
      cov_diag[i] = two_eta_s2 / (1.0 - mi * mi);
    } else {
      const double t = double(config.steps);
      const double mt = std::pow(mi, config.steps);
      mean_sum[i] = std::abs(1.0 - mi) < 1e-14 ? t : (1.0 - mt) / (1.0 - mi);
      const double m2 = mi * mi, m2t = mt * mt;
      const double cov_sum =
          std::abs(1.0 - m2) < 1e-14 ? t : (1.0 - m2t) / (1.0 - m2);
      cov_diag[i] = m2t + two_eta_s2 * cov_sum;  // V_0 has identity covariance
    }
  }

  GaussianRowModel out;
  out.means = nm.B * nm.s_vecs * mean_sum.asDiagonal() * nm.s_vecs.transpose();
  out.row_cov = nm.s_vecs * cov_diag.asDiagonal() * nm.s_vecs.transpose();
  return out;
}

NgdStationaryDiagnostics ngd_stationary_diagnostics(const RidgeProblem& problem,
                                                    const NgdConfig& config) {
  problem.validate();
  check_ngd_config(config);
  const NgdMatrices nm = ngd_matrices(problem, config.eta);
  if (!(config.eta * nm.s_eigs.maxCoeff() < 0.5)) {
    throw std::domain_error(
        "ngd_stationary_diagnostics: needs eta * lambda_max(S) < 1/2");
  }
  const int d = int(nm.S.rows());
  const double s2 = config.sigma * config.sigma;
  Eigen::VectorXd rec(d), cmp(d);
  for (int i = 0; i < d; ++i) {
    const double si = nm.s_eigs[i];
    const double mi = 1.0 - 2.0 * config.eta * si;
    rec[i] = 2.0 * config.eta * s2 / (1.0 - mi * mi);
    cmp[i] = s2 / (mi * si);  // sigma^2 M^-1 S^-1, same eigenbasis
  }
  NgdStationaryDiagnostics out;
  out.recursion_form = nm.s_vecs * rec.asDiagonal() * nm.s_vecs.transpose();
  out.compact_form = nm.s_vecs * cmp.asDiagonal() * nm.s_vecs.transpose();
  out.max_abs_difference =
      (out.recursion_form - out.compact_form).cwiseAbs().maxCoeff();
  return out;
}

TradeoffCurve model_tradeoff(const GaussianRowModel& a,
                             const GaussianRowModel& b) {
  check_same_cov(a, b, "model_tradeoff");
  const auto [eigs, vecs] = pd_eigs(a.row_cov, "model_tradeoff");
  const Eigen::MatrixXd delta = a.means - b.means;  // n x d
  // sum_rows delta_i^T C^-1 delta_i via the eigenbasis.
  const Eigen::MatrixXd proj = delta * vecs;  // n x d
  double mu2 = 0.0;
  for (int j = 0; j < proj.cols(); ++j) {
    mu2 += proj.col(j).squaredNorm() / eigs[j];
  }
  return gaussian_tradeoff(std::sqrt(mu2));
}

TradeoffCurve query_tradeoff(const GaussianRowModel& a,
                             const GaussianRowModel& b,
                             const Eigen::VectorXd& z) {
  check_same_cov(a, b, "query_tradeoff");
  if (z.size() != a.means.cols() || z.norm() == 0.0) {
    throw std::domain_error("query_tradeoff: z must be a nonzero d-vector");
  }
  const double denom2 = z.dot(a.row_cov * z);
  if (!(denom2 > 0.0)) {
    throw std::domain_error("query_tradeoff: z^T row_cov z must be > 0");
  }
  const double mu = ((a.means - b.means) * z).norm() / std::sqrt(denom2);
  return gaussian_tradeoff(mu);
}

WorstSeed worst_seed(const GaussianRowModel& a, const GaussianRowModel& b) {
  check_same_cov(a, b, "worst_seed");
  const auto [eigs, vecs] = pd_eigs(a.row_cov, "worst_seed");
  const Eigen::VectorXd inv_sqrt = eigs.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd c_inv_sqrt =
      vecs * inv_sqrt.asDiagonal() * vecs.transpose();
  const Eigen::MatrixXd whitened = (a.means - b.means) * c_inv_sqrt;

  const SingularTriplet top = top_singular_triplet(whitened);
  WorstSeed out;
  out.degenerate = top.degenerate;
  out.achieved_mu = top.degenerate ? 0.0 : top.sigma_max;
  Eigen::VectorXd z = c_inv_sqrt * top.right;
  out.z = z / z.norm();
  return out;
}

std::pair<RidgeProblem, RidgeProblem> pathological_pair(
    const Eigen::VectorXd& a, const Eigen::VectorXd& u,
    const Eigen::VectorXd& v, double scale, double lambda) {
  if (std::abs(u.norm() - 1.0) > 1e-9) {
    throw std::domain_error("pathological_pair: u must be unit norm");
  }
  if (!(lambda > 0.0)) {
    throw std::domain_error("pathological_pair: lambda must be > 0");
  }
  const double a_max = a.cwiseAbs().maxCoeff();
  const double m = double(a.size());
  const double a2 = a.squaredNorm();
  const double out_scale = std::max(1.0, std::abs(scale));

  RidgeProblem base;
  base.X = a * u.transpose();
  base.Y = a * v.transpose();
  base.lambda = lambda;
  base.M_x = a_max;
  base.M_y = a_max * v.norm() * out_scale;
  // Both fits are multiples of (||a||^2 / (m lambda + ||a||^2)) v u^T.
  base.M_theta = a2 / (m * lambda + a2) * v.norm() * out_scale;

  RidgeProblem scaled = base;
  scaled.Y *= scale;
  return {base, scaled};
}

}  // namespace privcurve
