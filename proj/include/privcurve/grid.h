#pragma once

#include <vector>

namespace privcurve {

// Uniform 1-D grid with an optional per-point payload (e.g. density values).
// Invariants: lo < hi, n_points >= 2, values empty or of length n_points.
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  int n_points = 2;
  std::vector<double> values;

  Grid1D() = default;
  Grid1D(double lo_, double hi_, int n);

  double spacing() const { return (hi - lo) / (n_points - 1); }
  double x(int i) const { return lo + spacing() * i; }
  void validate() const;  // throws std::invalid_argument on violation
};

// A numeric density supported on a uniform grid. grid.values holds the
// density; mass is its trapezoid integral (kept as metadata, the values are
// never silently renormalized).
struct DensityGrid {
  Grid1D grid;
  double mass = 0.0;
  bool log_available = false;
  // Estimated mass lost to truncating the characteristic function at the
  // window boundary (heuristic: one window-width at boundary magnitude).
  double truncation_bound = 0.0;
  bool truncation_warning = false;
};

}  // namespace privcurve
