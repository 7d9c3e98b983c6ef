#pragma once

#include "privcurve/rng.h"
#include "privcurve/tradeoff.h"

namespace privcurve {

// Parameters indexing every release-amplification bound: weight noise
// sigma_theta, seed scale sigma_z, weight dimension d, output rows n, seed
// columns l, adjacent-pair shift Delta, and the CLT constant C (unknown in
// principle; 1 by convention here, configurable).
struct MechanismSpec {
  double sigma_theta = 1.0;
  double sigma_z = 1.0;
  int d = 1;
  int n = 1;
  int l = 1;
  double Delta = 0.0;
  double C = 1.0;
};

// Monte Carlo Renyi divergence estimate at order alpha.
struct RenyiEstimate {
  double alpha = 0.0;
  double value = 0.0;
  // Sample standard deviation of the per-replication estimates (not divided
  // by sqrt(M)): the spread of independent reruns of the whole estimator.
  double std_error = 0.0;
  int replications = 0;
  long samples_per_rep = 0;
  bool infinite = false;
};

// The mean pair (v*, w* = v* + Delta) maximizing the Renyi divergence of the
// limiting variance-shifted Gaussians at fixed s:
//   v* = (sqrt(Delta^2 + 4 s) - Delta) / 2, so that v* w* = s, and
//   r  = (2 s + Delta^2 - Delta sqrt(Delta^2 + 4 s)) / (2 s)
//      = (s + v*^2) / (s + w*^2)  in (0, 1].
struct WorstCasePlacement {
  double v_star = 0.0;
  double w_star = 0.0;
  double r = 1.0;
};
WorstCasePlacement worst_case_placement(double s, double Delta);

// Lower bound h for single-point release (n = l = 1):
//   h = max( G_{Delta/sigma_theta},
//            sandwich_shift(variance_tradeoff(sqrt(s + v*^2), sqrt(s + w*^2)),
//                           C / d) ),  s = sigma_theta^2 d.
// sigma_z cancels by scale invariance. The curve carries the crossover pair
// (c1, c2) when the two branches cross exactly twice.
TradeoffCurve single_point_bound(const MechanismSpec& spec);

// Lower bound h for multi-point release (requires d > n and d >= l):
//   h = max( G_{Delta/sigma_theta},
//            sandwich_shift(chi2_variance_tradeoff(lambda, n*l), C_{n,l,d}) )
// with s = sigma_theta^2 (d - n), v* from worst_case_placement(s, Delta),
// lambda = (s + (v*+Delta)^2) / (s + v*^2), C_{n,l,d} = C n sqrt(l/(d-n)).
TradeoffCurve multi_point_bound(const MechanismSpec& spec);

// Renyi divergence of order alpha between N(0, sigma^2) and N(Delta,
// sigma^2): alpha Delta^2 / (2 sigma^2).
double renyi_gaussian_shift(double alpha, double Delta, double sigma);

// Worst-case Renyi divergence between the variance-shifted Gaussians
// N(0, s + v^2) over placements at distance Delta:
//   (1 / (2 (alpha-1))) (alpha log r - log(alpha r + 1 - alpha)),
//   r = r_{s,Delta}; finite iff s > alpha (alpha-1) Delta^2 (equivalently
//   alpha r + 1 - alpha > 0), +infinity otherwise (returned as INFINITY,
//   not an error).
double renyi_variance_max(double alpha, double s, double Delta);

// Multi-point upper bound: n * l * renyi_variance_max(alpha, s, Delta);
// asymptotically alpha n l Delta^2 / (4 s) + o(1/s).
double renyi_multi_upper(double alpha, double s, double Delta, int n, int l);

// f-DP to RDP conversion, Monte Carlo:
//   each replication k draws L i.i.d. U ~ Uniform(0,1) from substream k and
//   computes (1/(alpha-1)) log( (1/L) sum |curve.deriv(U)|^{1-alpha} )
//   (evaluated in log space); value = mean over M replications, std_error =
//   their sample standard deviation. Requires the curve to vanish only at
//   alpha = 1 (checked at 1 - 1e-9); otherwise the order-alpha divergence is
//   infinite and the estimate is flagged infinite.
// Replications run in parallel (worker count from PRIVCURVE_THREADS);
// results are identical for identical (stream, L, M) regardless of workers.
RenyiEstimate fdp_to_rdp_mc(const TradeoffCurve& curve, double alpha, long L,
                            int M, RngStream stream);

}  // namespace privcurve
