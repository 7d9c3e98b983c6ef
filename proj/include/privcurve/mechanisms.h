#pragma once

#include <utility>

#include <Eigen/Dense>

#include "privcurve/rng.h"
#include "privcurve/tradeoff.h"

namespace privcurve {

// A private regression task: m samples, d features, n outputs, ridge
// penalty lambda, and the norm bounds (M_x on rows of X, M_y on rows of Y,
// M_theta on the released weights) that the sensitivity computation uses.
//
// Objective, fixed once for the whole module:
//   F_lambda(w) = (1/m) sum_i ||w x_i - y_i||^2 + lambda ||w||_F^2
// Everything downstream (minimizer, gradients, NGD matrices) is derived from
// this normalization.
struct RidgeProblem {
  Eigen::MatrixXd X;  // m x d
  Eigen::MatrixXd Y;  // m x n
  double lambda = 1.0;
  double M_x = 0.0;
  double M_y = 0.0;
  double M_theta = 0.0;

  void validate() const;  // shape/bound invariants; throws on violation
};

// Noisy gradient descent configuration. steps is the finite horizon;
// stationary = true requests the t -> infinity law instead (requires the
// contraction check below to pass).
struct NgdConfig {
  double eta = 0.0;
  double sigma = 0.0;
  int steps = 0;
  bool stationary = false;
};

// Law of a weight matrix whose n rows are independent Gaussians with the
// given means (row i of `means`) and a shared d x d covariance.
struct GaussianRowModel {
  Eigen::MatrixXd means;    // n x d
  Eigen::MatrixXd row_cov;  // d x d, symmetric PD
};

// Minimizer of F_lambda: w* = Y^T X (X^T X + m lambda I)^-1  (n x d).
Eigen::MatrixXd ridge_fit(const RidgeProblem& problem);

// L2 sensitivity of the ridge map under single-row replacement:
//   Delta = 2 (M_x^2 M_theta + M_x M_y + lambda M_theta) / (m lambda).
double ridge_sensitivity(double M_x, double M_y, double M_theta,
                         double lambda, int m);

// weights + sigma_theta * (i.i.d. standard Gaussian matrix), reproducible
// per stream.
Eigen::MatrixXd output_perturb(const Eigen::MatrixXd& weights,
                               double sigma_theta, RngStream stream);

// Exact Gaussian law of the NGD iterate V_t started from V_0 ~ standard
// Gaussian rows, under the update
//   V_{t+1} = V_t M + B + sqrt(2 eta) sigma N,
//   M = I - 2 eta (X^T X / m + lambda I),  B = (2 eta / m) Y^T X.
// Row moments (M is symmetric, computed by eigendecomposition so that large
// t stays exact):
//   mu_t    = B (I - M)^-1 (I - M^t)
//   Sigma_t = M^{2t} + 2 eta sigma^2 (I - M^2)^-1 (I - M^{2t})
// stationary = true returns the t -> infinity limit; it requires
// eta * lambda_max(X^T X / m + lambda I) < 1/2 (all eigenvalues of M in
// (0,1)) and throws std::domain_error otherwise.
GaussianRowModel ngd_moments(const RidgeProblem& problem,
                             const NgdConfig& config);

// Both closed forms for the stationary covariance, for diagnostic
// comparison: the geometric sum of the recursion (authoritative) and the
// compact expression sigma^2 M^-1 S^-1 (S = X^T X / m + lambda I) that is
// sometimes quoted for this recursion but only agrees in the eta -> 0
// limit.
struct NgdStationaryDiagnostics {
  Eigen::MatrixXd recursion_form;  // 2 eta sigma^2 (I - M^2)^-1
  Eigen::MatrixXd compact_form;    // sigma^2 M^-1 S^-1
  double max_abs_difference = 0.0;
};
NgdStationaryDiagnostics ngd_stationary_diagnostics(
    const RidgeProblem& problem, const NgdConfig& config);

// Trade-off of releasing the full weight matrix: G_mu with
// mu^2 = sum_rows (mu_i - mu'_i)^T row_cov^-1 (mu_i - mu'_i).
// Requires both models to share row_cov (domain error otherwise).
TradeoffCurve model_tradeoff(const GaussianRowModel& a,
                             const GaussianRowModel& b);

// Trade-off of releasing only the query V z for a fixed seed z != 0:
// G with parameter ||(mu - mu') z|| / sqrt(z^T row_cov z).
TradeoffCurve query_tradeoff(const GaussianRowModel& a,
                             const GaussianRowModel& b,
                             const Eigen::VectorXd& z);

struct WorstSeed {
  Eigen::VectorXd z;         // unit-norm maximizing seed
  double achieved_mu = 0.0;  // query_tradeoff parameter at z
  bool degenerate = false;   // equal means: every seed is equally useless
};

// Adversarial seed: z = row_cov^-1/2 * (top right singular vector of
// (mu - mu') row_cov^-1/2), normalized; achieved_mu is the corresponding
// top singular value. No other seed attains a larger query parameter.
WorstSeed worst_seed(const GaussianRowModel& a, const GaussianRowModel& b);

// Rank-1 adjacent pair on which the query trade-off at the worst seed is
// exactly as bad as releasing the whole model: D = (X = a u^T, Y = a v^T)
// and D' = (X, scale * Y). u must be unit norm. The induced shift between
// the two ridge fits is
//   mu = (scale - 1) ||a||^2 / (m lambda + ||a||^2) * v u^T,
// which has rank 1, so sigma_max(mu) = ||mu||_F.
std::pair<RidgeProblem, RidgeProblem> pathological_pair(
    const Eigen::VectorXd& a, const Eigen::VectorXd& u,
    const Eigen::VectorXd& v, double scale, double lambda = 1.0);

}  // namespace privcurve
