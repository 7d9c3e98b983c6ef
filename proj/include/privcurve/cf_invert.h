#pragma once

#include <complex>
#include <functional>

#include "privcurve/grid.h"
#include "privcurve/rng.h"

#include <Eigen/Dense>

namespace privcurve {

// Recovers a density on `grid` from its characteristic function phi via
// f(x) = (1/2pi) \int e^{-itx} phi(t) dt, discretized on the conjugate
// frequency grid t_k = (k - floor(N/2)) * 2pi/(N h) and evaluated with one
// FFT. The rectangle rule on that grid is exact up to (a) truncation of the
// CF outside |t| <= pi/h and (b) periodization of the density with period
// N*h, so accuracy is controlled entirely by the grid: finer spacing widens
// the frequency window, a wider window suppresses aliasing.
//
// Preconditions checked: phi(0) = 1 and Hermitian symmetry
// phi(-t) = conj(phi(t)) (spot-checked; violations throw std::domain_error).
// If |phi| at the window boundary exceeds 1e-12 the result carries a
// truncation warning plus a heuristic bound estimate.
//
// The returned density is clipped to be nonnegative; clips larger than 1e-8
// in magnitude also raise the truncation warning.
DensityGrid invert_characteristic_function_1d(
    const std::function<std::complex<double>(double)>& phi, const Grid1D& grid);

// Matrix of i.i.d. N(0, std^2) entries, filled row-major from the stream's
// beginning; identical (stream, rows, cols, std) always reproduces the same
// matrix.
Eigen::MatrixXd rng_gaussian_matrix(RngStream stream, int rows, int cols,
                                    double std);

}  // namespace privcurve
