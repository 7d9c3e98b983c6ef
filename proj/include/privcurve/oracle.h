#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "privcurve/amplification.h"
#include "privcurve/grid.h"
#include "privcurve/mechanisms.h"
#include "privcurve/rng.h"
#include "privcurve/tradeoff.h"

namespace privcurve {

// Brute-force ground truth for the analytic modules: exact 1-D densities by
// characteristic-function inversion, exact trade-off curves by
// Neyman-Pearson tests on those densities, and direct simulation of the
// mechanisms.

// `count` samples of (sigma_theta N + v) Z, each n x l; N is n x d standard
// Gaussian, Z is d x l with N(0, sigma_z^2) entries, fresh per sample.
std::vector<Eigen::MatrixXd> sample_product(const Eigen::MatrixXd& v,
                                            const MechanismSpec& spec,
                                            int count, RngStream stream);

// Density of the scalar release V Z for n = l = 1, where V = sigma_theta N + v;
// only ||v|| matters (the law is invariant to rotating v). Inverted from the
// characteristic function
//   phi(t) = (1 + sz^2 st^2 t^2)^(-d/2)
//            * exp(- sz^2 ||v||^2 t^2 / (2 (1 + sz^2 st^2 t^2))).
// For v_norm = 0 the result is cross-checked against the closed form below
// (sup-difference <= 1e-6, else std::runtime_error). Grids covering less
// than 1 - 1e-4 of the mass raise a coverage error.
DensityGrid density_vz_1d(double v_norm, const MechanismSpec& spec,
                          const Grid1D& grid);

// Closed form of the above at v = 0 (d >= 2; d = 1 diverges at s = 0):
//   p(s) = |s/c|^{(d-1)/2} K_{(d-1)/2}(|s/c|) / (2^{(d-1)/2} sqrt(pi)
//          Gamma(d/2) c),  c = sigma_theta sigma_z.
double bessel_density_vz0(double s, const MechanismSpec& spec);

// Exact trade-off between two densities on the same grid: the randomized
// likelihood-ratio (Neyman-Pearson) test, thresholding atoms sorted by
// density ratio, exact up to discretization. Returns a Tabulated curve at
// the requested alphas carrying the discretization bound.
TradeoffCurve exact_tradeoff_1d(const DensityGrid& p, const DensityGrid& q,
                                const std::vector<double>& alphas);

struct VerifyRecord {
  double alpha = 0.0;
  double exact_beta = 0.0;
  double bound_beta = 0.0;  // h(alpha)
  double floor_beta = 0.0;  // G_{Delta/sigma_theta}(alpha)
  double margin = 0.0;      // min(exact - bound, exact - floor)
  bool pass = false;
};
struct VerifyDimension {
  int d = 0;
  std::vector<VerifyRecord> records;
  double discretization_bound = 0.0;
  bool pass = false;
};
struct VerifyReport {
  std::vector<VerifyDimension> dims;
  bool pass = false;
};

// For each d: builds the exact densities of VZ and WZ at the worst-case
// placement (||v|| = v*, ||w|| = w*), computes the exact Neyman-Pearson
// trade-off, and checks it dominates both single_point_bound's h and the
// post-processing floor G_{Delta/sigma_theta} at every alpha, within
// `tolerance`. A failure here falsifies the implementation, not the theory.
VerifyReport verify_single_point_bound(const MechanismSpec& spec,
                                       const std::vector<int>& d_list,
                                       const std::vector<double>& alphas,
                                       double tolerance = 1e-3);

struct EmpiricalRoc {
  std::vector<double> alpha_hat, beta_hat;  // per threshold
  std::vector<double> alpha_se, beta_se;    // binomial standard errors
};

// Empirical ROC of the threshold test "reject H0 when statistic > c" over
// the given thresholds; samples0 are H0 (null) draws, samples1 are H1.
EmpiricalRoc empirical_power(
    const std::vector<Eigen::MatrixXd>& samples0,
    const std::vector<Eigen::MatrixXd>& samples1,
    const std::function<double(const Eigen::MatrixXd&)>& statistic,
    const std::vector<double>& thresholds);

// Runs the exact NGD update `reps` times with independent noise; returns
// empirical row means and the pooled (rows are i.i.d.) row covariance.
GaussianRowModel simulate_ngd(const RidgeProblem& problem,
                              const NgdConfig& config, int reps,
                              RngStream stream);

}  // namespace privcurve
