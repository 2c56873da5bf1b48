// Synthetic known-spectrum propagators.
//
// These stand in for e^{tau L_ss} when no unstable eigenpair is available at
// desk scale: a Fourier multiplier exp(tau (a - nu (|k| - k0)^2)) acting on
// divergence-free mean-zero fields. Its top spectral rate is exactly `a`,
// attained on the lattice shell |k| = k0, any divergence-free field supported
// on that shell is an exact eigenfunction, and the |k|^2 falloff reproduces
// heat-like smoothing. Outputs built on these propagators are always labeled
// synthetic.
#pragma once

#include <cmath>
#include <vector>

#include "obss/semigroups.hpp"

namespace obss {

// Divergence-free random field supported on the exact lattice shell
// |j_s|^2 = shell_sq. Throws if the shell is empty.
inline SpectralVectorField shell_eigenfunction(const PeriodicGrid& g,
                                               std::uint64_t seed,
                                               int shell_sq) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralVectorField v(g);
  const int n = g.n;
  bool any = false;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz) {
    const int sz = g.signed_index(jz);
    for (int jy = 0; jy < n; ++jy) {
      const int sy = g.signed_index(jy);
      for (int jx = 0; jx < n; ++jx, ++i) {
        const int sx = g.signed_index(jx);
        const double re0 = gauss(rng), im0 = gauss(rng);
        const double re1 = gauss(rng), im1 = gauss(rng);
        const double re2 = gauss(rng), im2 = gauss(rng);
        if (sx * sx + sy * sy + sz * sz != shell_sq) continue;
        v[0][i] = Complex(re0, im0);
        v[1][i] = Complex(re1, im1);
        v[2][i] = Complex(re2, im2);
        any = true;
      }
    }
  }
  if (!any)
    throw ConfigError("shell_eigenfunction: lattice shell " +
                      std::to_string(shell_sq) + " is empty");
  for (int c = 0; c < 3; ++c) v[c].enforce_hermitian();
  v = leray_project(v);
  const double nrm = v.l2();
  if (nrm < 1e-300) throw NumericalError("shell_eigenfunction: degenerate");
  v *= 1.0 / nrm;
  return v;
}

class SyntheticVectorPropagator : public VectorPropagator {
 public:
  SyntheticVectorPropagator(const PeriodicGrid& g, double a, int shell_sq,
                            double nu = 1.0)
      : grid_(g), a_(a), shell_sq_(shell_sq), nu_(nu) {
    if (shell_sq <= 0) throw ConfigError("synthetic shell must be positive");
    k0_ = g.kmin() * std::sqrt(static_cast<double>(shell_sq));
    rate_.resize(g.size());
    std::size_t i = 0;
    for (int jz = 0; jz < g.n; ++jz) {
      const double kz = g.wavenumber(jz);
      for (int jy = 0; jy < g.n; ++jy) {
        const double ky = g.wavenumber(jy);
        for (int jx = 0; jx < g.n; ++jx, ++i) {
          const double kx = g.wavenumber(jx);
          const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
          const double d = kk - k0_;
          rate_[i] = a_ - nu_ * d * d;
        }
      }
    }
  }

  const PeriodicGrid& grid() const override { return grid_; }
  double a() const { return a_; }
  double k0() const { return k0_; }
  int shell_sq() const { return shell_sq_; }

  // Exact eigenfunction with L_syn rho = a rho (unit L2).
  SpectralVectorField eigenfunction(std::uint64_t seed = 7) const {
    return shell_eigenfunction(grid_, seed, shell_sq_);
  }

  SpectralVectorField apply(const SpectralVectorField& v,
                            double tau) const override {
    SpectralVectorField out = leray_project(v);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < rate_.size(); ++i)
        out[c][i] *= std::exp(tau * rate_[i]);
      out[c][SpectralScalarField::index(grid_, 0, 0, 0)] = Complex(0, 0);
    }
    return out;
  }

 private:
  PeriodicGrid grid_;
  double a_;
  int shell_sq_;
  double nu_;
  double k0_;
  std::vector<double> rate_;
};

// Complex-pair variant: the plane span{rho_r, rho_i} rotates with rate
// a + i omega while the rest of the shell decays with the base multiplier.
class SyntheticRotatingPropagator : public VectorPropagator {
 public:
  SyntheticRotatingPropagator(const PeriodicGrid& g, double a, double omega,
                              int shell_sq, double nu = 1.0,
                              std::uint64_t seed = 11)
      : base_(g, a - 1.0, shell_sq, nu), a_(a), omega_(omega) {
    // Base rate on the shell is a-1 < a, so the rotating pair dominates.
    rho_r_ = shell_eigenfunction(g, seed, shell_sq);
    rho_i_ = shell_eigenfunction(g, seed + 1, shell_sq);
    rho_i_.axpy(-l2_inner(rho_i_, rho_r_), rho_r_);
    rho_i_ *= 1.0 / rho_i_.l2();
  }

  const PeriodicGrid& grid() const override { return base_.grid(); }
  double a() const { return a_; }
  double omega() const { return omega_; }
  const SpectralVectorField& rho_re() const { return rho_r_; }
  const SpectralVectorField& rho_im() const { return rho_i_; }

  SpectralVectorField apply(const SpectralVectorField& v,
                            double tau) const override {
    SpectralVectorField w = leray_project(v);
    const double cr = l2_inner(w, rho_r_);
    const double ci = l2_inner(w, rho_i_);
    w.axpy(-cr, rho_r_);
    w.axpy(-ci, rho_i_);
    SpectralVectorField out = base_.apply(w, tau);
    const double g = std::exp(a_ * tau);
    const double c = std::cos(omega_ * tau), s = std::sin(omega_ * tau);
    out.axpy(g * (cr * c - ci * s), rho_r_);
    out.axpy(g * (cr * s + ci * c), rho_i_);
    return out;
  }

 private:
  SyntheticVectorPropagator base_;
  double a_;
  double omega_;
  SpectralVectorField rho_r_;
  SpectralVectorField rho_i_;
};

// Scalar multiplier propagator (test oracle for the Duhamel quadrature).
class SyntheticScalarPropagator : public ScalarPropagator {
 public:
  SyntheticScalarPropagator(const PeriodicGrid& g, double a, int shell_sq,
                            double nu = 1.0)
      : grid_(g) {
    const double k0 = g.kmin() * std::sqrt(static_cast<double>(shell_sq));
    rate_.resize(g.size());
    std::size_t i = 0;
    for (int jz = 0; jz < g.n; ++jz) {
      const double kz = g.wavenumber(jz);
      for (int jy = 0; jy < g.n; ++jy) {
        const double ky = g.wavenumber(jy);
        for (int jx = 0; jx < g.n; ++jx, ++i) {
          const double kx = g.wavenumber(jx);
          const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
          rate_[i] = a - nu * (kk - k0) * (kk - k0);
        }
      }
    }
  }

  const PeriodicGrid& grid() const override { return grid_; }
  double rate_at(std::size_t i) const { return rate_[i]; }

  SpectralScalarField apply(const SpectralScalarField& f,
                            double tau) const override {
    SpectralScalarField out = f;
    for (std::size_t i = 0; i < rate_.size(); ++i)
      out[i] *= std::exp(tau * rate_[i]);
    return out;
  }

 private:
  PeriodicGrid grid_;
  std::vector<double> rate_;
};

}  // namespace obss
