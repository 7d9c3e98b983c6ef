#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "privcurve/cf_invert.h"
#include "privcurve/grid.h"
#include "privcurve/linalg.h"
#include "privcurve/rng.h"
#include "privcurve/roots.h"
#include "privcurve/special.h"

namespace privcurve {
namespace {

// ---------------------------------------------------------------------------
// Philox / RngStream

// Published known-answer vectors for philox4x32-10 (Random123 distribution).
TEST(Philox, KnownAnswerVectors) {
  using A4 = std::array<uint32_t, 4>;
  using A2 = std::array<uint32_t, 2>;
  EXPECT_EQ(detail::philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}),
            (A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(detail::philox4x32_10(
                A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                A2{0xffffffffu, 0xffffffffu}),
            (A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(detail::philox4x32_10(
                A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                A2{0xa4093822u, 0x299f31d0u}),
            (A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, SameStreamReproduces) {
  Philox a(RngStream{42, 7});
  Philox b(RngStream{42, 7});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Philox, DistinctStreamsDiffer) {
  Philox a(RngStream{42, 7});
  Philox b(RngStream{42, 8});
  Philox c(RngStream{43, 7});
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const uint64_t va = a.next_u64();
    equal_ab += va == b.next_u64();
    equal_ac += va == c.next_u64();
  }
  EXPECT_LE(equal_ab, 1);
  EXPECT_LE(equal_ac, 1);
}

TEST(Philox, SubstreamsAreDeterministicAndDistinct) {
  const RngStream root{123, 5};
  const RngStream s1 = root.substream(0);
  const RngStream s2 = root.substream(1);
  EXPECT_EQ(s1.master_seed, root.substream(0).master_seed);
  EXPECT_EQ(s1.stream_id, root.substream(0).stream_id);
  Philox a(s1), b(s2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_LE(equal, 1);
}

TEST(Philox, DoublesAreInOpenUnitInterval) {
  Philox rng(RngStream{9, 9});
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
  EXPECT_LT(mn, 1e-4);
  EXPECT_GT(mx, 1.0 - 1e-4);
}

TEST(Philox, GaussianMoments) {
  Philox rng(RngStream{10, 0});
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    s1 += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

// ---------------------------------------------------------------------------
// Normal

TEST(Normal, CdfAtZeroIsHalf) { EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5); }

TEST(Normal, QuantileAtHalfIsZero) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
}

TEST(Normal, CdfAtOnePointNineSix) {
  EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-6);
}

TEST(Normal, QuantileCdfRoundtrip) {
  // Upper tail goes through sf/quantile_upper: for x near 6 the double
  // rounding of cdf(x) toward 1 alone costs ulp(1)/2 / pdf(6) ~ 9e-9, so the
  // cdf-composed roundtrip cannot reach 1e-9 there in double precision.
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double back = x <= 0.0 ? normal_quantile(normal_cdf(x))
                                 : normal_quantile_upper(normal_sf(x));
    EXPECT_NEAR(back, x, 1e-9) << "x=" << x;
  }
  // The cdf-composed roundtrip still holds where cdf retains precision.
  for (double x = -6.0; x <= 5.5; x += 0.25) {
    EXPECT_NEAR(normal_quantile(normal_cdf(x)), x, 1e-9) << "x=" << x;
  }
  // And stays within the representation-limited bound at the edge.
  EXPECT_NEAR(normal_quantile(normal_cdf(6.0)), 6.0, 1e-8);
}

TEST(Normal, UpperTailVariantsAgree) {
  EXPECT_NEAR(normal_sf(1.3), 1.0 - normal_cdf(1.3), 1e-15);
  EXPECT_NEAR(normal_quantile_upper(0.31), normal_quantile(0.69), 1e-12);
  // Stable far in the tail where 1 - p would round to 1.
  const double z = normal_quantile_upper(1e-300);
  EXPECT_NEAR(normal_sf(z) / 1e-300, 1.0, 1e-9);
}

TEST(Normal, PdfMatchesClosedForm) {
  for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    EXPECT_NEAR(normal_pdf(x), std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI),
                1e-15);
  }
}

TEST(Normal, QuantileDomainErrors) {
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
  EXPECT_THROW(normal_quantile(1.0), std::domain_error);
  EXPECT_THROW(normal_quantile(-0.2), std::domain_error);
  EXPECT_THROW(normal_quantile_upper(0.0), std::domain_error);
}

// ---------------------------------------------------------------------------
// Chi-squared

TEST(Chi2, CdfStartsAtZero) { EXPECT_DOUBLE_EQ(chi2_cdf(2, 0.0), 0.0); }

TEST(Chi2, TwoDofClosedForm) {
  // k = 2 is Exp(1/2): F(x) = 1 - e^{-x/2}, so F(2 ln 2) = 1/2.
  EXPECT_NEAR(chi2_cdf(2, 2.0 * M_LN2), 0.5, 1e-12);
  for (double x : {0.1, 1.0, 3.0, 10.0}) {
    EXPECT_NEAR(chi2_cdf(2, x), 1.0 - std::exp(-0.5 * x), 1e-12);
  }
}

TEST(Chi2, QuantileCdfRoundtrip) {
  EXPECT_NEAR(chi2_quantile(5, chi2_cdf(5, 3.7)), 3.7, 1e-8);
  for (int k : {1, 2, 7, 40}) {
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999}) {
      const double x = chi2_quantile(k, p);
      EXPECT_NEAR(chi2_cdf(k, x), p, 1e-8) << "k=" << k << " p=" << p;
    }
  }
}

TEST(Chi2, PdfIntegratesToOne) {
  // Simpson on [0, quantile(1 - 1e-12)]; avoids the k=1 endpoint singularity
  // by starting the panel a hair inside.
  for (int k : {2, 3, 10}) {
    const double hi = chi2_quantile(k, 1.0 - 1e-12);
    const int n = 200000;
    const double h = hi / n;
    double acc = chi2_pdf(k, 1e-300) + chi2_pdf(k, hi);
    for (int i = 1; i < n; ++i) {
      acc += chi2_pdf(k, i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    EXPECT_NEAR(acc * h / 3.0, 1.0, 1e-6) << "k=" << k;
  }
}

TEST(Chi2, UpperTailVariantsAgree) {
  EXPECT_NEAR(chi2_sf(4, 3.0), 1.0 - chi2_cdf(4, 3.0), 1e-14);
  EXPECT_NEAR(chi2_quantile_upper(4, 0.25), chi2_quantile(4, 0.75), 1e-9);
  // Extreme upper tail stays finite and monotone (used by curve derivatives).
  const double q1 = chi2_quantile_upper(10, 1e-14);
  const double q2 = chi2_quantile_upper(10, 1e-15);
  EXPECT_GT(q2, q1);
  EXPECT_LT(q2, 200.0);
}

TEST(Chi2, DomainErrors) {
  EXPECT_THROW(chi2_cdf(2, -1.0), std::domain_error);
  EXPECT_THROW(chi2_quantile(2, 0.0), std::domain_error);
  EXPECT_THROW(chi2_quantile(2, 1.0), std::domain_error);
  EXPECT_THROW(chi2_cdf(0, 1.0), std::domain_error);
}

// ---------------------------------------------------------------------------
// Bessel K

TEST(BesselK, HalfIntegerClosedForm) {
  // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}.
  for (double x : {0.1, 1.0, 5.0, 40.0}) {
    const double expect = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);
    EXPECT_NEAR(bessel_k(0.5, x) / expect, 1.0, 1e-9) << "x=" << x;
  }
  EXPECT_NEAR(bessel_k(0.5, 1.0), 0.46106850444789445, 1e-9);
}

TEST(BesselK, OrderSymmetry) {
  EXPECT_DOUBLE_EQ(bessel_k(-0.5, 1.0), bessel_k(0.5, 1.0));
  EXPECT_DOUBLE_EQ(bessel_k(-3.25, 2.0), bessel_k(3.25, 2.0));
}

TEST(BesselK, KZeroAtFive) {
  EXPECT_NEAR(bessel_k(0.0, 5.0) / 0.0036910983340425947, 1.0, 1e-9);
}

TEST(BesselK, MatchesIntegralRepresentation) {
  // K_nu(x) = \int_0^inf e^{-x cosh t} cosh(nu t) dt, Simpson quadrature.
  for (const auto& [nu, x] : std::vector<std::pair<double, double>>{
           {2.5, 3.0}, {0.0, 0.7}, {7.0, 12.0}}) {
    const double hi = std::acosh(760.0 / x);
    const int n = 60000;
    const double h = hi / n;
    auto f = [&](double t) {
      return std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    };
    double acc = f(0.0) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    const double oracle = acc * h / 3.0;
    EXPECT_NEAR(bessel_k(nu, x) / oracle, 1.0, 1e-9) << nu << "," << x;
  }
}

TEST(BesselK, LogScaledUnderflow) {
  bool log_scaled = false;
  const double v = bessel_k(0.0, 800.0, &log_scaled);
  EXPECT_TRUE(log_scaled);
  // log K_0(800) ~ log(sqrt(pi/1600)) - 800.
  EXPECT_NEAR(v, 0.5 * std::log(M_PI / 1600.0) - 800.0, 0.01);
  EXPECT_THROW(bessel_k(0.0, 800.0), std::overflow_error);
  EXPECT_NEAR(bessel_k_log(0.5, 1.0), std::log(0.46106850444789445), 1e-9);
}

TEST(BesselK, DomainErrors) {
  EXPECT_THROW(bessel_k(0.5, 0.0), std::domain_error);
  EXPECT_THROW(bessel_k(0.5, -1.0), std::domain_error);
}

// ---------------------------------------------------------------------------
// Root finding

TEST(Roots, Linear) {
  EXPECT_NEAR(find_root_bracketed([](double x) { return x - 0.3; }, 0, 1),
              0.3, 1e-14);
}

TEST(Roots, CubeRootOfTwo) {
  EXPECT_NEAR(find_root_bracketed([](double x) { return x * x * x - 2.0; },
                                  1, 2),
              std::cbrt(2.0), 1e-12);
}

TEST(Roots, CosinePiOverTwo) {
  EXPECT_NEAR(find_root_bracketed([](double x) { return std::cos(x); }, 1, 2),
              M_PI_2, 1e-12);
}

TEST(Roots, EndpointRoots) {
  EXPECT_DOUBLE_EQ(
      find_root_bracketed([](double x) { return x; }, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(
      find_root_bracketed([](double x) { return x - 1.0; }, 0.0, 1.0), 1.0);
}

TEST(Roots, NoSignChangeThrows) {
  EXPECT_THROW(
      find_root_bracketed([](double x) { return x * x + 1.0; }, -1, 1),
      std::invalid_argument);
}

TEST(Roots, Deterministic) {
  auto f = [](double x) { return std::tanh(3.0 * (x - 0.77)); };
  const double r1 = find_root_bracketed(f, 0, 1);
  const double r2 = find_root_bracketed(f, 0, 1);
  EXPECT_EQ(r1, r2);
  EXPECT_NEAR(r1, 0.77, 1e-12);
}

// ---------------------------------------------------------------------------
// Linear algebra

TEST(MatrixSqrt, Identity) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR((matrix_sqrt_psd(I) - I).norm(), 0.0, 1e-12);
}

TEST(MatrixSqrt, Diagonal) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 4.0;
  m(1, 1) = 9.0;
  const Eigen::MatrixXd r = matrix_sqrt_psd(m);
  EXPECT_NEAR(r(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(r(1, 1), 3.0, 1e-12);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-12);
}

TEST(MatrixSqrt, RandomPsdRoundtripAndCommute) {
  std::mt19937 gen(31);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + int(gen() % 6);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = nd(gen);
    }
    const Eigen::MatrixXd m = b * b.transpose();
    const Eigen::MatrixXd r = matrix_sqrt_psd(m);
    EXPECT_NEAR((r - r.transpose()).norm(), 0.0, 1e-10);
    EXPECT_LE((r * r - m).norm(), 1e-8);
    EXPECT_LE((r * m - m * r).norm(), 1e-8);
  }
}

TEST(MatrixSqrt, RejectsAsymmetricAndIndefinite) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(matrix_sqrt_psd(a), std::domain_error);
  Eigen::MatrixXd ind(2, 2);
  ind << 1, 0, 0, -1;
  EXPECT_THROW(matrix_sqrt_psd(ind), std::domain_error);
}

TEST(TopSingular, RankOne) {
  Eigen::VectorXd u(3), v(4);
  u << 1, 2, 2;
  v << 0, 3, 0, 4;
  const SingularTriplet t = top_singular_triplet(u * v.transpose());
  EXPECT_FALSE(t.degenerate);
  EXPECT_NEAR(t.sigma_max, u.norm() * v.norm(), 1e-10);
  EXPECT_NEAR(std::abs(t.left.dot(u / u.norm())), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(t.right.dot(v / v.norm())), 1.0, 1e-10);
}

TEST(TopSingular, DiagonalMatrix) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const SingularTriplet t = top_singular_triplet(m);
  EXPECT_NEAR(t.sigma_max, 3.0, 1e-12);
  EXPECT_NEAR(t.right[0], 1.0, 1e-12);
  EXPECT_NEAR(t.left[0], 1.0, 1e-12);
}

TEST(TopSingular, ZeroMatrixDegenerate) {
  const SingularTriplet t = top_singular_triplet(Eigen::MatrixXd::Zero(3, 2));
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.sigma_max, 0.0);
  EXPECT_NEAR(t.left.norm(), 1.0, 1e-15);
  EXPECT_NEAR(t.right.norm(), 1.0, 1e-15);
}

TEST(TopSingular, DominatesRandomProbes) {
  std::mt19937 gen(7);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = nd(gen);
  }
  const SingularTriplet t = top_singular_triplet(m);
  EXPECT_NEAR((m * t.right).norm(), t.sigma_max, 1e-9);
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd z(6);
    for (int j = 0; j < 6; ++j) z[j] = nd(gen);
    EXPECT_LE((m * z).norm() / z.norm(), t.sigma_max + 1e-9);
  }
}

TEST(TopSingular, MatchesPowerIteration) {
  std::mt19937 gen(99);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = nd(gen);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Ones(6).normalized();
  const Eigen::MatrixXd mtm = m.transpose() * m;
  for (int it = 0; it < 20000; ++it) z = (mtm * z).normalized();
  const double oracle = std::sqrt(z.dot(mtm * z));
  EXPECT_NEAR(top_singular_triplet(m).sigma_max, oracle, 1e-8);
}

// ---------------------------------------------------------------------------
// Characteristic function inversion

TEST(CfInvert, StandardGaussian) {
  Grid1D grid(-12.0, 12.0, 4096);
  const DensityGrid d = invert_characteristic_function_1d(
      [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0); },
      grid);
  EXPECT_NEAR(d.mass, 1.0, 1e-6);
  EXPECT_FALSE(d.truncation_warning);
  double sup = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    sup = std::max(sup, std::abs(d.grid.values[size_t(i)] -
                                 normal_pdf(d.grid.x(i))));
  }
  EXPECT_LE(sup, 1e-8);
}

TEST(CfInvert, TranslationProperty) {
  const double a = 1.375;  // exactly representable shift
  Grid1D grid(-14.0, 14.0, 4096);
  auto phi0 = [](double t) {
    return std::complex<double>(std::exp(-0.5 * t * t), 0.0);
  };
  auto phia = [&](double t) {
    return std::exp(std::complex<double>(0.0, t * a)) * phi0(t);
  };
  const DensityGrid d0 = invert_characteristic_function_1d(phi0, grid);
  const DensityGrid da = invert_characteristic_function_1d(phia, grid);
  double sup = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    sup = std::max(sup, std::abs(da.grid.values[size_t(i)] -
                                 normal_pdf(da.grid.x(i) - a)));
  }
  EXPECT_LE(sup, 1e-8);
  EXPECT_NEAR(da.mass, d0.mass, 1e-9);
}

TEST(CfInvert, RejectsBadCharacteristicFunctions) {
  Grid1D grid(-10.0, 10.0, 512);
  // phi(0) != 1.
  EXPECT_THROW(invert_characteristic_function_1d(
                   [](double t) {
                     return std::complex<double>(0.5 * std::exp(-t * t), 0);
                   },
                   grid),
               std::domain_error);
  // Not Hermitian: e^{t} is real but asymmetric.
  EXPECT_THROW(invert_characteristic_function_1d(
                   [](double t) {
                     return std::complex<double>(std::exp(t - t * t), 0);
                   },
                   grid),
               std::domain_error);
}

TEST(CfInvert, TruncationWarningForHeavyTailedCf) {
  // Laplace density has CF 1/(1+t^2), far from zero at any finite window.
  Grid1D grid(-10.0, 10.0, 256);
  const DensityGrid d = invert_characteristic_function_1d(
      [](double t) { return std::complex<double>(1.0 / (1.0 + t * t), 0); },
      grid);
  EXPECT_TRUE(d.truncation_warning);
  EXPECT_GT(d.truncation_bound, 0.0);
}

TEST(CfInvert, MatchesSampleHistogram) {
  // CF of the standard normal vs a histogram of 10^6 Philox gaussians.
  Grid1D grid(-8.0, 8.0, 2048);
  const DensityGrid d = invert_characteristic_function_1d(
      [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0); },
      grid);
  const int kBins = 32;
  const double lo = -4.0, hi = 4.0, w = (hi - lo) / kBins;
  std::vector<double> expected(kBins, 0.0);
  // Bin probability by fine Riemann sum over the inverted density.
  const double h = d.grid.spacing();
  for (int i = 0; i < d.grid.n_points; ++i) {
    const double x = d.grid.x(i);
    const int b = int(std::floor((x - lo) / w));
    if (b >= 0 && b < kBins) expected[size_t(b)] += d.grid.values[size_t(i)] * h;
  }
  std::vector<long> counts(kBins, 0);
  Philox rng(RngStream{2024, 1});
  const long n = 1000000;
  for (long i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    const int b = int(std::floor((g - lo) / w));
    if (b >= 0 && b < kBins) ++counts[size_t(b)];
  }
  for (int b = 0; b < kBins; ++b) {
    const double p = expected[size_t(b)];
    const double se = std::sqrt(p * (1.0 - p) / double(n));
    EXPECT_NEAR(double(counts[size_t(b)]) / double(n), p, 3.0 * se + 1e-9)
        << "bin " << b;
  }
}

// ---------------------------------------------------------------------------
// rng_gaussian_matrix / Grid1D

TEST(RngMatrix, ZeroStdIsZeroMatrix) {
  const Eigen::MatrixXd m = rng_gaussian_matrix(RngStream{1, 2}, 3, 4, 0.0);
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m.cols(), 4);
  EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
}

TEST(RngMatrix, Reproducible) {
  const Eigen::MatrixXd a = rng_gaussian_matrix(RngStream{5, 6}, 7, 3, 2.0);
  const Eigen::MatrixXd b = rng_gaussian_matrix(RngStream{5, 6}, 7, 3, 2.0);
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RngMatrix, SampleMeanNearZero) {
  const Eigen::MatrixXd m =
      rng_gaussian_matrix(RngStream{11, 0}, 1000, 1000, 1.0);
  EXPECT_NEAR(m.mean(), 0.0, 5e-3);
}

TEST(Grid, ValidateRejectsBadGrids) {
  EXPECT_THROW(Grid1D(1.0, 1.0, 16), std::invalid_argument);
  EXPECT_THROW(Grid1D(0.0, 1.0, 1), std::invalid_argument);
  const Grid1D g(0.0, 1.0, 11);
  EXPECT_NEAR(g.spacing(), 0.1, 1e-15);
  EXPECT_NEAR(g.x(10), 1.0, 1e-15);
}

}  // namespace
}  // namespace privcurve
