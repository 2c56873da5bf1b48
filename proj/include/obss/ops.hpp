// Pseudo-spectral field algebra: derivatives, dealiasing, Leray projection,
// advection products, gravity kernel, Hardy quotient.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "obss/field.hpp"

namespace obss {

// Multiplier application m(kx, ky, kz) acting coefficient-wise.
template <class Fn>
SpectralScalarField apply_multiplier(const SpectralScalarField& f, Fn&& m) {
  SpectralScalarField out = f;
  const PeriodicGrid& g = f.grid();
  std::size_t i = 0;
  for (int jz = 0; jz < g.n; ++jz) {
    const double kz = g.wavenumber(jz);
    for (int jy = 0; jy < g.n; ++jy) {
      const double ky = g.wavenumber(jy);
      for (int jx = 0; jx < g.n; ++jx, ++i)
        out[i] *= m(g.wavenumber(jx), ky, kz);
    }
  }
  return out;
}

inline SpectralScalarField derivative(const SpectralScalarField& f, int axis) {
  SpectralScalarField out = f;
  const PeriodicGrid& g = f.grid();
  const int n = g.n;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz)
    for (int jy = 0; jy < n; ++jy)
      for (int jx = 0; jx < n; ++jx, ++i) {
        const int j = axis == 0 ? jx : (axis == 1 ? jy : jz);
        // The unpaired Nyquist mode has no well-defined odd derivative.
        const double k = (j == n / 2) ? 0.0 : g.wavenumber(j);
        out[i] *= Complex(0.0, k);
      }
  return out;
}

inline SpectralVectorField gradient(const SpectralScalarField& f) {
  return SpectralVectorField(derivative(f, 0), derivative(f, 1),
                             derivative(f, 2));
}

inline SpectralScalarField divergence(const SpectralVectorField& v) {
  SpectralScalarField out = derivative(v[0], 0);
  out += derivative(v[1], 1);
  out += derivative(v[2], 2);
  return out;
}

inline SpectralVectorField curl(const SpectralVectorField& v) {
  return SpectralVectorField(derivative(v[2], 1) - derivative(v[1], 2),
                             derivative(v[0], 2) - derivative(v[2], 0),
                             derivative(v[1], 0) - derivative(v[0], 1));
}

inline SpectralScalarField laplacian(const SpectralScalarField& f) {
  return apply_multiplier(f, [](double kx, double ky, double kz) {
    return -(kx * kx + ky * ky + kz * kz);
  });
}

inline SpectralVectorField laplacian(const SpectralVectorField& v) {
  return SpectralVectorField(laplacian(v[0]), laplacian(v[1]),
                             laplacian(v[2]));
}

// Sharp per-axis mask at the grid's dealias cutoff.
inline void dealias_inplace(SpectralScalarField& f) {
  const PeriodicGrid& g = f.grid();
  const int cut = g.dealias_cutoff();
  const int n = g.n;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz) {
    const bool mz = std::abs(g.signed_index(jz)) > cut;
    for (int jy = 0; jy < n; ++jy) {
      const bool myz = mz || std::abs(g.signed_index(jy)) > cut;
      for (int jx = 0; jx < n; ++jx, ++i)
        if (myz || std::abs(g.signed_index(jx)) > cut) f[i] = Complex(0, 0);
    }
  }
}

inline void dealias_inplace(SpectralVectorField& v) {
  for (int i = 0; i < 3; ++i) dealias_inplace(v[i]);
}

// ---------------------------------------------------------------------------
// Leray projection

inline SpectralVectorField leray_project(const SpectralVectorField& v) {
  SpectralVectorField out = v;
  const PeriodicGrid& g = v.grid();
  const int n = g.n;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz) {
    const double kz = g.wavenumber(jz);
    for (int jy = 0; jy < n; ++jy) {
      const double ky = g.wavenumber(jy);
      for (int jx = 0; jx < n; ++jx, ++i) {
        const double kx = g.wavenumber(jx);
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;  // mean mode passes through
        const Complex kdot =
            (kx * out[0][i] + ky * out[1][i] + kz * out[2][i]) / k2;
        out[0][i] -= kx * kdot;
        out[1][i] -= ky * kdot;
        out[2][i] -= kz * kdot;
      }
    }
  }
  out.divergence_free_flag = true;
  return out;
}

// ||div v||_L2 relative to ||v||_H1; ~1e-15 for projected fields.
inline double relative_divergence(const SpectralVectorField& v) {
  const double d = divergence(v).l2();
  const double s = hs_norm(v, 1.0);
  return s > 0 ? d / s : 0.0;
}

// ---------------------------------------------------------------------------
// Physical-space products

struct PhysicalVector {
  std::array<std::vector<double>, 3> c;
};

inline PhysicalVector to_physical(const SpectralVectorField& v) {
  return PhysicalVector{{v[0].to_physical(), v[1].to_physical(),
                         v[2].to_physical()}};
}

inline double max_abs(const PhysicalVector& p) {
  double m = 0.0;
  for (const auto& a : p.c)
    for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// u . grad(theta), dealiased. The overload taking PhysicalVector lets
// steppers reuse the transformed velocity.
inline SpectralScalarField advect(const PhysicalVector& u_phys,
                                  const SpectralScalarField& theta) {
  const PeriodicGrid& g = theta.grid();
  std::array<std::vector<double>, 3> grad;
  for (int a = 0; a < 3; ++a) grad[a] = derivative(theta, a).to_physical();
  std::vector<double> prod(g.size());
  for (std::size_t i = 0; i < prod.size(); ++i)
    prod[i] = u_phys.c[0][i] * grad[0][i] + u_phys.c[1][i] * grad[1][i] +
              u_phys.c[2][i] * grad[2][i];
  SpectralScalarField out = SpectralScalarField::from_physical(g, prod);
  dealias_inplace(out);
  return out;
}

inline SpectralScalarField advect(const SpectralVectorField& u,
                                  const SpectralScalarField& theta) {
  require_same_grid(u.grid(), theta.grid(), "advect");
  return advect(to_physical(u), theta);
}

// (u . grad) v componentwise.
inline SpectralVectorField advect(const PhysicalVector& u_phys,
                                  const SpectralVectorField& v) {
  return SpectralVectorField(advect(u_phys, v[0]), advect(u_phys, v[1]),
                             advect(u_phys, v[2]));
}

inline SpectralVectorField advect(const SpectralVectorField& u,
                                  const SpectralVectorField& v) {
  require_same_grid(u.grid(), v.grid(), "advect");
  return advect(to_physical(u), v);
}

// Pointwise product a*b, dealiased.
inline SpectralScalarField multiply(const SpectralScalarField& a,
                                    const SpectralScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  auto pa = a.to_physical();
  auto pb = b.to_physical();
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  SpectralScalarField out = SpectralScalarField::from_physical(a.grid(), pa);
  dealias_inplace(out);
  return out;
}

// ---------------------------------------------------------------------------
// Gravity kernel
//
// Periodic zero-mean realization of 1/|x|: series coefficients
// 4*pi / (L^3 |k|^2), k != 0. The field approximates 1/|x| - const near the
// box center. Stored dealiased so the two product routes below agree exactly
// in the retained band.

inline SpectralScalarField gravity_potential(const PeriodicGrid& g) {
  SpectralScalarField G(g);
  const double L3 = g.box_side * g.box_side * g.box_side;
  const int n = g.n;
  std::size_t i = 0;
  for (int jz = 0; jz < n; ++jz) {
    const double kz = g.wavenumber(jz);
    for (int jy = 0; jy < n; ++jy) {
      const double ky = g.wavenumber(jy);
      for (int jx = 0; jx < n; ++jx, ++i) {
        const double kx = g.wavenumber(jx);
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 > 0.0) G[i] = 4.0 * std::numbers::pi / (L3 * k2);
      }
    }
  }
  dealias_inplace(G);
  return G;
}

inline SpectralVectorField gravity_kernel_gradient(const PeriodicGrid& g) {
  return gradient(gravity_potential(g));
}

// P(theta * grad G_per); overload with a precomputed kernel for hot loops.
inline SpectralVectorField gravity_gradient(const SpectralScalarField& theta,
                                            const PhysicalVector& gradG_phys) {
  const PeriodicGrid& g = theta.grid();
  auto pt = theta.to_physical();
  SpectralVectorField prod(g);
  for (int a = 0; a < 3; ++a) {
    std::vector<double> p(g.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = pt[i] * gradG_phys.c[a][i];
    prod[a] = SpectralScalarField::from_physical(g, p);
  }
  dealias_inplace(prod);
  return leray_project(prod);
}

inline SpectralVectorField gravity_gradient(const SpectralScalarField& theta) {
  return gravity_gradient(theta,
                          to_physical(gravity_kernel_gradient(theta.grid())));
}

// Equivalent route -P(G_per * grad theta); the projector kills grad(theta*G).
inline SpectralVectorField gravity_gradient_alt(
    const SpectralScalarField& theta) {
  const PeriodicGrid& g = theta.grid();
  const auto Gp = gravity_potential(g).to_physical();
  SpectralVectorField prod(g);
  for (int a = 0; a < 3; ++a) {
    auto da = derivative(theta, a).to_physical();
    std::vector<double> p(g.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = -Gp[i] * da[i];
    prod[a] = SpectralScalarField::from_physical(g, p);
  }
  dealias_inplace(prod);
  return leray_project(prod);
}

// ---------------------------------------------------------------------------
// Hardy quotient ||theta/|x||| / ||grad theta||, |x| from the box center
// regularized below half a grid cell.

inline double hardy_quotient(const SpectralScalarField& theta) {
  const PeriodicGrid& g = theta.grid();
  const double gnorm = [&] {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = derivative(theta, a).l2();
      s += d * d;
    }
    return std::sqrt(s);
  }();
  if (gnorm < 1e-14 * (1.0 + theta.l2()))
    throw DegenerateInputError("hardy_quotient: gradient vanishes");

  const auto pt = theta.to_physical();
  const double rmin = 0.5 * g.dx();
  const double dV = g.dx() * g.dx() * g.dx();
  double acc = 0.0;
  std::size_t i = 0;
  for (int jz = 0; jz < g.n; ++jz) {
    const double z = g.coord(jz);
    for (int jy = 0; jy < g.n; ++jy) {
      const double y = g.coord(jy);
      for (int jx = 0; jx < g.n; ++jx, ++i) {
        const double x = g.coord(jx);
        const double r = std::max(std::sqrt(x * x + y * y + z * z), rmin);
        acc += pt[i] * pt[i] / (r * r);
      }
    }
  }
  return std::sqrt(acc * dV) / gnorm;
}

// ---------------------------------------------------------------------------
// Radial cutoff used by the xi.grad terms: chi(r) = 1 for r <= r_on, quintic
// rolloff to 0 at r_off. Exact on fields supported inside r_on.

struct RadialCutoff {
  double r_on;
  double r_off;

  double operator()(double r) const {
    if (r <= r_on) return 1.0;
    if (r >= r_off) return 0.0;
    const double s = (r - r_on) / (r_off - r_on);
    // C^2 smoothstep, descending.
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  }
};

// The three physical arrays chi(|x|) * x_a used by (xi . grad).
struct CutoffCoordinates {
  std::array<std::vector<double>, 3> cx;

  CutoffCoordinates(const PeriodicGrid& g, RadialCutoff chi) {
    for (auto& a : cx) a.resize(g.size());
    std::size_t i = 0;
    for (int jz = 0; jz < g.n; ++jz) {
      const double z = g.coord(jz);
      for (int jy = 0; jy < g.n; ++jy) {
        const double y = g.coord(jy);
        for (int jx = 0; jx < g.n; ++jx, ++i) {
          const double x = g.coord(jx);
          const double w = chi(std::sqrt(x * x + y * y + z * z));
          cx[0][i] = w * x;
          cx[1][i] = w * y;
          cx[2][i] = w * z;
        }
      }
    }
  }
};

// (chi * xi) . grad f, dealiased.
inline SpectralScalarField radial_advect(const CutoffCoordinates& xi,
                                         const SpectralScalarField& f) {
  const PeriodicGrid& g = f.grid();
  std::vector<double> prod(g.size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    const auto da = derivative(f, a).to_physical();
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += xi.cx[a][i] * da[i];
  }
  SpectralScalarField out = SpectralScalarField::from_physical(g, prod);
  dealias_inplace(out);
  return out;
}

inline SpectralVectorField radial_advect(const CutoffCoordinates& xi,
                                         const SpectralVectorField& v) {
  return SpectralVectorField(radial_advect(xi, v[0]), radial_advect(xi, v[1]),
                             radial_advect(xi, v[2]));
}

}  // namespace obss
