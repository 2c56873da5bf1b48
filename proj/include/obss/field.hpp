// Spectral fields on the periodic box: storage, transforms, norms, RNG helpers.
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "obss/fft.hpp"
#include "obss/grid.hpp"

namespace obss {

using Complex = std::complex<double>;

class SpectralScalarField {
 public:
  SpectralScalarField() = default;
  explicit SpectralScalarField(const PeriodicGrid& g)
      : grid_(g), coef_(g.size(), Complex(0.0, 0.0)) {}
  SpectralScalarField(const PeriodicGrid& g, std::vector<Complex> coef)
      : grid_(g), coef_(std::move(coef)) {
    assert(coef_.size() == grid_.size());
  }

  static SpectralScalarField zero(const PeriodicGrid& g) {
    return SpectralScalarField(g);
  }

  static SpectralScalarField from_physical(const PeriodicGrid& g,
                                           std::span<const double> values) {
    assert(values.size() == g.size());
    SpectralScalarField f(g);
    for (std::size_t i = 0; i < values.size(); ++i) f.coef_[i] = values[i];
    fft_for(g.n).forward(f.coef_.data());
    const double scale = 1.0 / static_cast<double>(g.size());
    apply_center_phase(g, f.coef_.data(), scale);
    return f;
  }

  std::vector<double> to_physical() const {
    std::vector<Complex> work = coef_;
    apply_center_phase(grid_, work.data(), 1.0);
    fft_for(grid_.n).backward(work.data());
    std::vector<double> out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = work[i].real();
    return out;
  }

  const PeriodicGrid& grid() const { return grid_; }
  std::vector<Complex>& coef() { return coef_; }
  const std::vector<Complex>& coef() const { return coef_; }
  Complex& operator[](std::size_t i) { return coef_[i]; }
  const Complex& operator[](std::size_t i) const { return coef_[i]; }

  Complex& at(int jx, int jy, int jz) {
    return coef_[index(grid_, jx, jy, jz)];
  }
  const Complex& at(int jx, int jy, int jz) const {
    return coef_[index(grid_, jx, jy, jz)];
  }

  static std::size_t index(const PeriodicGrid& g, int jx, int jy, int jz) {
    return static_cast<std::size_t>(jx) +
           static_cast<std::size_t>(g.n) * (static_cast<std::size_t>(jy) +
                                            static_cast<std::size_t>(g.n) * jz);
  }

  SpectralScalarField& operator+=(const SpectralScalarField& o) {
    require_same_grid(grid_, o.grid_, "operator+=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
    return *this;
  }
  SpectralScalarField& operator-=(const SpectralScalarField& o) {
    require_same_grid(grid_, o.grid_, "operator-=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
    return *this;
  }
  SpectralScalarField& operator*=(double a) {
    for (auto& c : coef_) c *= a;
    return *this;
  }
  // this += a * o
  void axpy(double a, const SpectralScalarField& o) {
    require_same_grid(grid_, o.grid_, "axpy");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * o.coef_[i];
  }

  double l2() const {
    double s = 0.0;
    for (const auto& c : coef_) s += std::norm(c);
    return std::sqrt(cube(grid_.box_side) * s);
  }

  // Direct evaluation of the trig series at an arbitrary point (slow; tests
  // and spot checks only).
  double eval_at(double x, double y, double z) const {
    const int n = grid_.n;
    std::vector<Complex> ex(n), ey(n), ez(n);
    for (int j = 0; j < n; ++j) {
      const double k = grid_.wavenumber(j);
      ex[j] = std::polar(1.0, k * x);
      ey[j] = std::polar(1.0, k * y);
      ez[j] = std::polar(1.0, k * z);
    }
    Complex acc(0, 0);
    std::size_t i = 0;
    for (int jz = 0; jz < n; ++jz)
      for (int jy = 0; jy < n; ++jy) {
        const Complex eyz = ey[jy] * ez[jz];
        for (int jx = 0; jx < n; ++jx, ++i) acc += coef_[i] * ex[jx] * eyz;
      }
    return acc.real();
  }

  // Restore exact Hermitian symmetry (real-valued field).
  void enforce_hermitian() {
    const int n = grid_.n;
    for (int jz = 0; jz < n; ++jz)
      for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) {
          const std::size_t i = index(grid_, jx, jy, jz);
          const std::size_t r =
              index(grid_, (n - jx) % n, (n - jy) % n, (n - jz) % n);
          if (r < i) continue;
          const Complex avg = 0.5 * (coef_[i] + std::conj(coef_[r]));
          coef_[i] = avg;
          coef_[r] = std::conj(avg);
        }
  }

  double hermitian_defect() const {
    const int n = grid_.n;
    double worst = 0.0;
    for (int jz = 0; jz < n; ++jz)
      for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) {
          const std::size_t i = index(grid_, jx, jy, jz);
          const std::size_t r =
              index(grid_, (n - jx) % n, (n - jy) % n, (n - jz) % n);
          worst = std::max(worst, std::abs(coef_[i] - std::conj(coef_[r])));
        }
    return worst;
  }

 private:
  static double cube(double v) { return v * v * v; }

  // Physical coordinates are measured from the box center; the FFT index
  // basis is corner based. The two differ by (-1)^(jx+jy+jz) per mode.
  static void apply_center_phase(const PeriodicGrid& g, Complex* c,
                                 double scale) {
    const int n = g.n;
    std::size_t i = 0;
    for (int jz = 0; jz < n; ++jz)
      for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx, ++i) {
          const double s = ((jx + jy + jz) & 1) ? -scale : scale;
          c[i] *= s;
        }
  }

  PeriodicGrid grid_;
  std::vector<Complex> coef_;
};

inline SpectralScalarField operator+(SpectralScalarField a,
                                     const SpectralScalarField& b) {
  a += b;
  return a;
}
inline SpectralScalarField operator-(SpectralScalarField a,
                                     const SpectralScalarField& b) {
  a -= b;
  return a;
}
inline SpectralScalarField operator*(double s, SpectralScalarField a) {
  a *= s;
  return a;
}

class SpectralVectorField {
 public:
  SpectralVectorField() = default;
  explicit SpectralVectorField(const PeriodicGrid& g)
      : comp_{SpectralScalarField(g), SpectralScalarField(g),
              SpectralScalarField(g)} {}
  SpectralVectorField(SpectralScalarField x, SpectralScalarField y,
                      SpectralScalarField z)
      : comp_{std::move(x), std::move(y), std::move(z)} {
    require_same_grid(comp_[0].grid(), comp_[1].grid(), "SpectralVectorField");
    require_same_grid(comp_[0].grid(), comp_[2].grid(), "SpectralVectorField");
  }

  static SpectralVectorField zero(const PeriodicGrid& g) {
    return SpectralVectorField(g);
  }

  const PeriodicGrid& grid() const { return comp_[0].grid(); }
  SpectralScalarField& operator[](int i) { return comp_[i]; }
  const SpectralScalarField& operator[](int i) const { return comp_[i]; }

  bool divergence_free_flag = false;

  SpectralVectorField& operator+=(const SpectralVectorField& o) {
    for (int i = 0; i < 3; ++i) comp_[i] += o.comp_[i];
    divergence_free_flag = divergence_free_flag && o.divergence_free_flag;
    return *this;
  }
  SpectralVectorField& operator-=(const SpectralVectorField& o) {
    for (int i = 0; i < 3; ++i) comp_[i] -= o.comp_[i];
    divergence_free_flag = divergence_free_flag && o.divergence_free_flag;
    return *this;
  }
  SpectralVectorField& operator*=(double a) {
    for (auto& c : comp_) c *= a;
    return *this;
  }
  void axpy(double a, const SpectralVectorField& o) {
    for (int i = 0; i < 3; ++i) comp_[i].axpy(a, o.comp_[i]);
  }

  double l2() const {
    double s = 0.0;
    for (const auto& c : comp_)
      for (const auto& v : c.coef()) s += std::norm(v);
    return std::sqrt(grid().box_side * grid().box_side * grid().box_side * s);
  }

 private:
  std::array<SpectralScalarField, 3> comp_;
};

inline SpectralVectorField operator+(SpectralVectorField a,
                                     const SpectralVectorField& b) {
  a += b;
  return a;
}
inline SpectralVectorField operator-(SpectralVectorField a,
                                     const SpectralVectorField& b) {
  a -= b;
  return a;
}
inline SpectralVectorField operator*(double s, SpectralVectorField a) {
  a *= s;
  return a;
}

// L^2 inner product (real fields); L^3 * sum conj(a) b is real up to roundoff.
inline double l2_inner(const SpectralScalarField& a,
                       const SpectralScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "l2_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.coef().size(); ++i)
    s += (std::conj(a[i]) * b[i]).real();
  const double L = a.grid().box_side;
  return L * L * L * s;
}

inline double l2_inner(const SpectralVectorField& a,
                       const SpectralVectorField& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += l2_inner(a[i], b[i]);
  return s;
}

// Sobolev norm via the Fourier multiplier (1+|k|^2)^(s/2).
inline double hs_norm(const SpectralScalarField& f, SobolevIndex s) {
  const PeriodicGrid& g = f.grid();
  const int n = g.n;
  double acc = 0.0;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz) {
    const double kz = g.wavenumber(jz);
    for (int jy = 0; jy < n; ++jy) {
      const double ky = g.wavenumber(jy);
      for (int jx = 0; jx < n; ++jx, ++i) {
        const double kx = g.wavenumber(jx);
        const double k2 = kx * kx + ky * ky + kz * kz;
        acc += std::pow(1.0 + k2, s) * std::norm(f[i]);
      }
    }
  }
  const double L = g.box_side;
  return std::sqrt(L * L * L * acc);
}

inline double hs_norm(const SpectralVectorField& f, SobolevIndex s) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double c = hs_norm(f[i], s);
    acc += c * c;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Random field generators (deterministic under the given seed).

namespace detail {
inline void hermitize(SpectralScalarField& f) { f.enforce_hermitian(); }
}  // namespace detail

// Flat-spectrum random field with modes restricted to |j_s| <= band per the
// Euclidean radius band [band_lo, band_hi] (in units of kmin).
inline SpectralScalarField random_scalar_field(const PeriodicGrid& g,
                                               std::uint64_t seed,
                                               double band_lo, double band_hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralScalarField f(g);
  const int n = g.n;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz)
    for (int jy = 0; jy < n; ++jy)
      for (int jx = 0; jx < n; ++jx, ++i) {
        const double sx = g.signed_index(jx);
        const double sy = g.signed_index(jy);
        const double sz = g.signed_index(jz);
        const double r = std::sqrt(sx * sx + sy * sy + sz * sz);
        // Draws happen for every mode so the stream is layout independent.
        const double re = gauss(rng), im = gauss(rng);
        if (r >= band_lo && r <= band_hi) f[i] = Complex(re, im);
      }
  detail::hermitize(f);
  return f;
}

inline SpectralScalarField random_scalar_field(const PeriodicGrid& g,
                                               std::uint64_t seed) {
  return random_scalar_field(g, seed, 0.0, g.dealias_cutoff());
}

// Random field concentrated on the lattice shell |j_s| in [shell-1/2, shell+1/2).
inline SpectralScalarField random_shell_field(const PeriodicGrid& g,
                                              std::uint64_t seed, double shell) {
  return random_scalar_field(g, seed, shell - 0.5,
                             std::nextafter(shell + 0.5, 0.0));
}

inline SpectralVectorField random_vector_field(const PeriodicGrid& g,
                                               std::uint64_t seed,
                                               double band_lo, double band_hi) {
  return SpectralVectorField(
      random_scalar_field(g, seed * 3 + 0, band_lo, band_hi),
      random_scalar_field(g, seed * 3 + 1, band_lo, band_hi),
      random_scalar_field(g, seed * 3 + 2, band_lo, band_hi));
}

inline SpectralVectorField random_vector_field(const PeriodicGrid& g,
                                               std::uint64_t seed) {
  return random_vector_field(g, seed, 0.0, g.dealias_cutoff());
}

}  // namespace obss
