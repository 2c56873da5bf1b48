// Coordinate and amplitude maps between natural (x,t) and self-similar
// (xi, tau) variables, plus the parabolic scaling action.
//
// Dilation x -> s*x is realized by evaluating the trig series at the scaled
// lattice (three separable axis contractions). Points that fall outside the
// source box are smoothly windowed to zero instead of wrapping: data there is
// genuinely lost to the periodic truncation, and the window makes that loss
// explicit and measurable.
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "obss/field.hpp"
#include "obss/ops.hpp"

namespace obss {

enum class FieldWeight { velocity, pressure, forcing };

inline double weight_exponent(FieldWeight w) {
  switch (w) {
    case FieldWeight::velocity: return 0.5;   // also temperature
    case FieldWeight::pressure: return 1.0;
    case FieldWeight::forcing: return 1.5;    // also heat source
  }
  return 0.5;
}

struct ResampleReport {
  // |f|^2 fraction sitting where the window is < 1 (lost or attenuated mass).
  double clipped_fraction = 0.0;
};

namespace detail {

struct DilationKey {
  int n;
  double box;
  double scale;
  bool operator<(const DilationKey& o) const {
    return std::tie(n, box, scale) < std::tie(o.n, o.box, o.scale);
  }
};

// Per-axis evaluation matrix E[j*n+m] = w(y_j) exp(i k_m y_j), y_j = s*x_j,
// plus the plain window row weights for the clipping report.
struct DilationMatrix {
  std::vector<Complex> E;
  std::vector<double> window;
};

inline constexpr double kWindowOn = 0.90;
inline constexpr double kWindowOff = 0.995;

inline double edge_window(double y, double half_box) {
  const double a = std::abs(y) / half_box;
  if (a <= kWindowOn) return 1.0;
  if (a >= kWindowOff) return 0.0;
  const double s = (a - kWindowOn) / (kWindowOff - kWindowOn);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline const DilationMatrix& dilation_matrix(const PeriodicGrid& g, double s) {
  static std::mutex mu;
  static std::map<DilationKey, std::unique_ptr<DilationMatrix>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[DilationKey{g.n, g.box_side, s}];
  if (!slot) {
    auto m = std::make_unique<DilationMatrix>();
    const int n = g.n;
    m->E.resize(static_cast<std::size_t>(n) * n);
    m->window.resize(n);
    for (int j = 0; j < n; ++j) {
      const double y = s * g.coord(j);
      const double w = edge_window(y, 0.5 * g.box_side);
      m->window[j] = w;
      for (int mm = 0; mm < n; ++mm)
        m->E[static_cast<std::size_t>(j) * n + mm] =
            w * std::polar(1.0, g.wavenumber(mm) * y);
    }
    slot = std::move(m);
  }
  return *slot;
}

}  // namespace detail

// Samples field(s * x) on the field's own grid. Exact for band-limited data
// whose dilated content stays inside the box and below Nyquist.
inline SpectralScalarField dilate(const SpectralScalarField& f, double s,
                                  ResampleReport* report = nullptr) {
  const PeriodicGrid& g = f.grid();
  if (s == 1.0) {
    if (report) report->clipped_fraction = 0.0;
    return f;
  }
  const auto& M = detail::dilation_matrix(g, s);
  const int n = g.n;
  const std::size_t nn = g.size();
  std::vector<Complex> a = f.coef(), b(nn);

  // contract x: b[jx, my, mz] = sum_mx E[jx,mx] a[mx, my, mz]
  for (int mz = 0; mz < n; ++mz)
    for (int my = 0; my < n; ++my) {
      const std::size_t base = static_cast<std::size_t>(n) * (my + static_cast<std::size_t>(n) * mz);
      for (int jx = 0; jx < n; ++jx) {
        Complex acc(0, 0);
        const Complex* row = &M.E[static_cast<std::size_t>(jx) * n];
        for (int mx = 0; mx < n; ++mx) acc += row[mx] * a[base + mx];
        b[base + jx] = acc;
      }
    }
  // contract y: a[jx, jy, mz] = sum_my E[jy,my] b[jx, my, mz]
  for (int mz = 0; mz < n; ++mz)
    for (int jy = 0; jy < n; ++jy) {
      const Complex* row = &M.E[static_cast<std::size_t>(jy) * n];
      for (int jx = 0; jx < n; ++jx) {
        Complex acc(0, 0);
        for (int my = 0; my < n; ++my)
          acc += row[my] * b[jx + static_cast<std::size_t>(n) * (my + static_cast<std::size_t>(n) * mz)];
        a[jx + static_cast<std::size_t>(n) * (jy + static_cast<std::size_t>(n) * mz)] = acc;
      }
    }
  // contract z: b[jx, jy, jz] = sum_mz E[jz,mz] a[jx, jy, mz]
  for (int jz = 0; jz < n; ++jz) {
    const Complex* row = &M.E[static_cast<std::size_t>(jz) * n];
    for (int jy = 0; jy < n; ++jy)
      for (int jx = 0; jx < n; ++jx) {
        Complex acc(0, 0);
        for (int mz = 0; mz < n; ++mz)
          acc += row[mz] * a[jx + static_cast<std::size_t>(n) * (jy + static_cast<std::size_t>(n) * mz)];
        b[jx + static_cast<std::size_t>(n) * (jy + static_cast<std::size_t>(n) * jz)] = acc;
      }
  }

  std::vector<double> phys(nn);
  for (std::size_t i = 0; i < nn; ++i) phys[i] = b[i].real();

  if (report) {
    // Mass of the *output samples* sitting under an attenuated window.
    double clipped = 0.0, total = 0.0;
    std::size_t i = 0;
    for (int jz = 0; jz < n; ++jz)
      for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx, ++i) {
          const double w = M.window[jx] * M.window[jy] * M.window[jz];
          const double v2 = phys[i] * phys[i];
          total += v2;
          if (w < 1.0) clipped += v2 * (1.0 - w * w);
        }
    report->clipped_fraction = total > 0 ? clipped / total : 0.0;
  }
  return SpectralScalarField::from_physical(g, phys);
}

// xi |-> t^w field(sqrt(t) xi)
inline SpectralScalarField to_selfsimilar(const SpectralScalarField& f,
                                          double t, FieldWeight w,
                                          ResampleReport* report = nullptr) {
  if (!(t > 0)) throw ConfigError("to_selfsimilar: t must be positive");
  SpectralScalarField out = dilate(f, std::sqrt(t), report);
  out *= std::pow(t, weight_exponent(w));
  return out;
}

// x |-> t^-w field(x / sqrt(t))
inline SpectralScalarField to_natural(const SpectralScalarField& f, double t,
                                      FieldWeight w,
                                      ResampleReport* report = nullptr) {
  if (!(t > 0)) throw ConfigError("to_natural: t must be positive");
  SpectralScalarField out = dilate(f, 1.0 / std::sqrt(t), report);
  out *= std::pow(t, -weight_exponent(w));
  return out;
}

inline SpectralVectorField to_selfsimilar(const SpectralVectorField& f,
                                          double t, FieldWeight w,
                                          ResampleReport* report = nullptr) {
  SpectralVectorField out(to_selfsimilar(f[0], t, w, report),
                          to_selfsimilar(f[1], t, w),
                          to_selfsimilar(f[2], t, w));
  return out;
}

inline SpectralVectorField to_natural(const SpectralVectorField& f, double t,
                                      FieldWeight w,
                                      ResampleReport* report = nullptr) {
  return SpectralVectorField(to_natural(f[0], t, w, report),
                             to_natural(f[1], t, w), to_natural(f[2], t, w));
}

// Exact H^s norm of the self-similar image t^w f(sqrt(t) xi) computed from the
// natural coefficients (box bookkeeping; no resampling loss):
//   ||Theta(tau)||_{H^s} = t^{w - 3/4} sqrt(L^3 sum (1 + t|k|^2)^s |f_k|^2).
inline double pullback_hs_norm(const SpectralScalarField& f, double t,
                               SobolevIndex s, double w = 0.5) {
  const PeriodicGrid& g = f.grid();
  double acc = 0.0;
  std::size_t i = 0;
  for (int jz = 0; jz < g.n; ++jz) {
    const double kz = g.wavenumber(jz);
    for (int jy = 0; jy < g.n; ++jy) {
      const double ky = g.wavenumber(jy);
      for (int jx = 0; jx < g.n; ++jx, ++i) {
        const double kx = g.wavenumber(jx);
        const double k2 = kx * kx + ky * ky + kz * kz;
        acc += std::pow(1.0 + t * k2, s) * std::norm(f[i]);
      }
    }
  }
  const double L = g.box_side;
  return std::pow(t, w - 0.75) * std::sqrt(L * L * L * acc);
}

inline double pullback_hs_norm(const SpectralVectorField& f, double t,
                               SobolevIndex s, double w = 0.5) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double c = pullback_hs_norm(f[i], t, s, w);
    acc += c * c;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Parabolic scaling family. Rescaling the box bookkeeping (same coefficient
// indices on box L/lambda) makes u_lambda(x) = lambda^p u(lambda x) exact on
// the lattice for any lambda > 0.

struct ScalingAction {
  double lambda = 1.0;

  void validate() const {
    if (!(lambda > 0)) throw ConfigError("ScalingAction: lambda must be > 0");
  }

  SpectralScalarField scale_field(const SpectralScalarField& f,
                                  double power) const {
    PeriodicGrid g = f.grid();
    g.box_side /= lambda;
    SpectralScalarField out(g, f.coef());
    out *= std::pow(lambda, power);
    return out;
  }
  SpectralVectorField scale_field(const SpectralVectorField& f,
                                  double power) const {
    SpectralVectorField out(scale_field(f[0], power), scale_field(f[1], power),
                            scale_field(f[2], power));
    out.divergence_free_flag = f.divergence_free_flag;
    return out;
  }

  double scale_time(double t) const { return t / (lambda * lambda); }
};

// One snapshot of the five-field bundle (u, theta, p, f, h) at natural time t.
struct SolutionState {
  SpectralVectorField u;
  SpectralScalarField theta;
  SpectralScalarField pressure;
  SpectralVectorField force;
  SpectralScalarField heat;
  double t = 1.0;
};

inline SolutionState scale_solution(const SolutionState& s,
                                    const ScalingAction& act) {
  act.validate();
  return SolutionState{act.scale_field(s.u, 1.0),
                       act.scale_field(s.theta, 1.0),
                       act.scale_field(s.pressure, 2.0),
                       act.scale_field(s.force, 3.0),
                       act.scale_field(s.heat, 3.0),
                       act.scale_time(s.t)};
}

}  // namespace obss
