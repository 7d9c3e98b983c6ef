#include "privcurve/cf_invert.h"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace privcurve {

void Grid1D::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("Grid1D: requires lo < hi");
  if (n_points < 2) throw std::invalid_argument("Grid1D: requires n_points >= 2");
  if (!values.empty() && int(values.size()) != n_points) {
    throw std::invalid_argument("Grid1D: values length must equal n_points");
  }
}

Grid1D::Grid1D(double lo_, double hi_, int n) : lo(lo_), hi(hi_), n_points(n) {
  validate();
}

namespace {
// FFTW planning mutates global state; execution of distinct plans is safe.
std::mutex fftw_plan_mutex;
}  // namespace

DensityGrid invert_characteristic_function_1d(
    const std::function<std::complex<double>(double)>& phi,
    const Grid1D& grid) {
  grid.validate();
  const int n = grid.n_points;
  const double h = grid.spacing();
  const double dt = 2.0 * M_PI / (n * h);
  const int k0 = n / 2;  // index of t = 0

  if (std::abs(phi(0.0) - 1.0) > 1e-9) {
    throw std::domain_error(
        "invert_characteristic_function_1d: phi(0) must be 1");
  }
  for (double frac : {0.02, 0.1, 0.37, 0.83}) {
    const double t_probe = frac * k0 * dt;
    if (std::abs(phi(-t_probe) - std::conj(phi(t_probe))) > 1e-9) {
      throw std::domain_error(
          "invert_characteristic_function_1d: phi must be Hermitian");
    }
  }

  // f(x_j) = dt/2pi * sum_k phi(t_k) e^{-i t_k x_j}, t_k = (k - k0) dt.
  // With x_j = lo + j h and dt*h = 2pi/n this factors into one forward DFT
  // with constant phase twiddles on both sides.
  std::vector<std::complex<double>> in(n), out(n);
  for (int k = 0; k < n; ++k) {
    const double t = (k - k0) * dt;
    in[k] = phi(t) * std::exp(std::complex<double>(0.0, -t * grid.lo));
  }
  {
    std::unique_lock<std::mutex> lock(fftw_plan_mutex);
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
        FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(plan);
    lock.lock();
    fftw_destroy_plan(plan);
  }

  DensityGrid density;
  density.grid = grid;
  density.grid.values.assign(n, 0.0);
  const double scale = dt / (2.0 * M_PI);
  const double phase0 = 2.0 * M_PI * k0 / n;
  double most_negative = 0.0;
  for (int j = 0; j < n; ++j) {
    // e^{+i 2pi k0 j / n} undoes the t-grid offset; (-1)^j for even n.
    const std::complex<double> tw =
        std::exp(std::complex<double>(0.0, phase0 * j));
    double v = scale * (tw * out[j]).real();
    if (v < most_negative) most_negative = v;
    density.grid.values[j] = std::max(v, 0.0);
  }

  // Truncation diagnostics: the window keeps |t| <= k0*dt; if the CF has not
  // decayed below 1e-12 there, report a heuristic tail bound of one more
  // window-width at the boundary magnitude.
  const double edge =
      0.5 * (std::abs(phi(-k0 * dt)) + std::abs(phi((n - 1 - k0) * dt)));
  density.truncation_bound = edge * (k0 * dt) / M_PI;
  density.truncation_warning = edge > 1e-12 || most_negative < -1e-8;
  if (most_negative < -1e-8) {
    density.truncation_bound =
        std::max(density.truncation_bound, -most_negative);
  }

  // Trapezoid mass, kept as metadata (no silent renormalization).
  double mass = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    mass += 0.5 * (density.grid.values[j] + density.grid.values[j + 1]) * h;
  }
  density.mass = mass;
  return density;
}

Eigen::MatrixXd rng_gaussian_matrix(RngStream stream, int rows, int cols,
                                    double std) {
  if (std < 0.0) {
    throw std::domain_error("rng_gaussian_matrix: std must be >= 0");
  }
  Philox gen(stream);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = std * gen.next_gaussian();
    }
  }
  return m;
}

}  // namespace privcurve
