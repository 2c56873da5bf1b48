// Periodic box description and wavenumber bookkeeping.
//
// Conventions used throughout the library:
//   * the box is [-L/2, L/2)^3, grid point j at x_j = -L/2 + j*(L/n);
//   * coefficient index j carries the signed mode j_s in [-n/2, n/2)
//     (j_s = j for j < n/2, j - n otherwise) and wavenumber k = 2*pi*j_s/L;
//   * fields are stored as coefficients of exp(i k . x) with x measured from
//     the box center, so radially symmetric data has real coefficients;
//   * array layout is x-fastest: idx = jx + n*(jy + n*jz).
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "obss/errors.hpp"

namespace obss {

// Nonnegative Sobolev regularity index; H^0 coincides with L^2.
using SobolevIndex = double;

struct PeriodicGrid {
  int n = 32;                       // points per axis, even, >= 16
  double box_side = 8.0;            // L
  double dealias_fraction = 2.0 / 3.0;

  void validate() const {
    if (n < 16 || n % 2 != 0)
      throw ConfigError("grid.n must be even and >= 16, got " + std::to_string(n));
    if (!(box_side > 0))
      throw ConfigError("grid.box_side must be positive");
    if (!(dealias_fraction > 0) || dealias_fraction > 1)
      throw ConfigError("grid.dealias_fraction must lie in (0, 1]");
  }

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  double dx() const { return box_side / n; }
  double kmin() const { return 2.0 * std::numbers::pi / box_side; }
  double kmax() const { return kmin() * (n / 2); }

  int signed_index(int j) const { return j < n / 2 ? j : j - n; }
  double wavenumber(int j) const { return kmin() * signed_index(j); }
  double coord(int j) const { return -0.5 * box_side + j * dx(); }

  // Largest |j_s| kept by the dealias mask (2/3 rule by default).
  int dealias_cutoff() const {
    return static_cast<int>(std::floor(dealias_fraction * (n / 2)));
  }

  bool operator==(const PeriodicGrid& o) const {
    return n == o.n && box_side == o.box_side &&
           dealias_fraction == o.dealias_fraction;
  }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }
};

inline void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b,
                              const char* where) {
  if (a != b)
    throw GridMismatchError(std::string(where) + ": fields live on different grids");
}

}  // namespace obss
