// Small least squares helpers for rate and exponent fits.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "obss/errors.hpp"

namespace obss {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DegenerateInputError("fit_line: need >= 2 matched samples");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw DegenerateInputError("fit_line: singular");
  return LineFit{(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

// log y = e * log x + log C  ->  (exponent e, prefactor C)
inline LineFit fit_loglog(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 1e-300)) continue;
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

// log y = r * x + log C  ->  (rate r, prefactor C)
inline LineFit fit_semilog(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 1e-300)) continue;
    lx.push_back(xs[i]);
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, count == 1 ? 0.0 : double(i) / (count - 1));
  return out;
}

inline std::vector<double> linear_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * (count == 1 ? 0.0 : double(i) / (count - 1));
  return out;
}

}  // namespace obss
