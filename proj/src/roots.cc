#include "privcurve/roots.h"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace privcurve {

// Brent (1973), the classic zeroin: keeps a bisection bracket [a,b] at all
// times and attempts secant / inverse quadratic steps inside it.
double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument(
        "find_root_bracketed: f(lo) and f(hi) do not bracket a sign change");
  }
  if (tol < 0.0) tol = 0.0;

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * DBL_EPSILON * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Interpolation step: secant if two points, inverse quadratic if three.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol1 * q),
                              std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (fb == 0.0) return b;
  }
  return b;  // bracket width is below tolerance by now for any sane f
}

}  // namespace privcurve
