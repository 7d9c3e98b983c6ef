#pragma once

#include <functional>
#include <limits>

namespace privcurve {

// Finds a root of f on [lo, hi] given f(lo) * f(hi) <= 0, by Brent's method
// (bisection-safeguarded inverse quadratic interpolation). Converges to a
// bracket of width <= tol + 4 * eps * |x|; fully deterministic. Throws
// std::invalid_argument when the endpoints do not bracket a sign change.
double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi,
                           double tol = 4 * std::numeric_limits<double>::epsilon());

}  // namespace privcurve
