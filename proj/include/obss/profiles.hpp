// Background profile construction (compact divergence-free velocity bump,
// compact temperature core) and forcing synthesis by substitution into the
// self-similar system.
#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "obss/fit.hpp"
#include "obss/ops.hpp"
#include "obss/selfsim.hpp"

namespace obss {

// Standard C_c^infinity bump, equal to 1 at the center, supported in r < R.
inline double bump(double r, double R) {
  const double q = r / R;
  if (q >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q * q));
}

inline SpectralScalarField bump_field(const PeriodicGrid& g, double R) {
  std::vector<double> vals(g.size());
  std::size_t i = 0;
  for (int jz = 0; jz < g.n; ++jz) {
    const double z = g.coord(jz);
    for (int jy = 0; jy < g.n; ++jy) {
      const double y = g.coord(jy);
      for (int jx = 0; jx < g.n; ++jx, ++i) {
        const double x = g.coord(jx);
        vals[i] = bump(std::sqrt(x * x + y * y + z * z), R);
      }
    }
  }
  auto f = SpectralScalarField::from_physical(g, vals);
  dealias_inplace(f);
  return f;
}

enum class VelocityShape { axisymmetric_swirl, curl_bump };

inline VelocityShape velocity_shape_from_string(const std::string& s) {
  if (s == "axisymmetric_swirl") return VelocityShape::axisymmetric_swirl;
  if (s == "curl_bump") return VelocityShape::curl_bump;
  throw ConfigError("unknown velocity shape: " + s);
}

// Divergence-free compactly supported velocity, calibrated to ||U||_L2 = A.
// Built as the spectral curl of a compact potential, so the discrete
// divergence vanishes identically.
inline SpectralVectorField make_background_velocity(const PeriodicGrid& g,
                                                    double amplitude, double R,
                                                    VelocityShape shape) {
  if (!(R > 0) || R > g.box_side / 8.0)
    throw ConfigError("support_radius must satisfy 0 < R <= box_side/8");
  if (R < 3.0 * g.dx())
    throw ConfigError("support_radius under-resolved: need R >= 3 dx");
  const SpectralScalarField psi = bump_field(g, R);
  SpectralVectorField pot(g);
  switch (shape) {
    case VelocityShape::axisymmetric_swirl:
      pot[2] = psi;  // azimuthal swirl about the z axis
      break;
    case VelocityShape::curl_bump:
      pot[0] = psi;
      pot[1] = 0.7 * psi;
      pot[2] = 0.4 * psi;
      break;
  }
  SpectralVectorField u = curl(pot);
  u.divergence_free_flag = true;
  const double norm = u.l2();
  if (amplitude == 0.0) return SpectralVectorField::zero(g);
  if (norm < 1e-300) throw NumericalError("degenerate velocity potential");
  u *= amplitude / norm;
  return u;
}

struct ProfileParams {
  double amplitude = 1.0;
  double support_radius = 1.0;
  VelocityShape shape = VelocityShape::axisymmetric_swirl;
  double b = 1.0;                // Theta_bar(tau) = e^{b tau} * theta_core
  double theta_amplitude = 1.0;  // H^{N+1} norm of theta_core
  SobolevIndex N = 1.75;
};

// Steady compact velocity plus the growing temperature core; the xi.grad
// cutoff is wide enough to be exact on both supports.
struct BackgroundProfile {
  PeriodicGrid grid;
  SpectralVectorField U_bar;
  SpectralScalarField theta_core;
  ProfileParams params;
  RadialCutoff cutoff;

  SpectralScalarField theta_bar(double tau) const {
    SpectralScalarField t = theta_core;
    t *= std::exp(params.b * tau);
    return t;
  }
};

inline BackgroundProfile make_background_profile(const PeriodicGrid& g,
                                                 const ProfileParams& p) {
  g.validate();
  if (!(p.b > 0)) throw ConfigError("profile.b must be positive");
  BackgroundProfile bp{g,
                       make_background_velocity(g, p.amplitude,
                                                p.support_radius, p.shape),
                       SpectralScalarField(g), p,
                       RadialCutoff{1.5 * p.support_radius,
                                    3.0 * p.support_radius}};
  SpectralScalarField core = bump_field(g, p.support_radius);
  const double norm = hs_norm(core, p.N + 1.0);
  if (p.theta_amplitude != 0.0 && norm > 1e-300)
    core *= p.theta_amplitude / norm;
  else
    core = SpectralScalarField::zero(g);
  bp.theta_core = std::move(core);
  return bp;
}

// ---------------------------------------------------------------------------
// Forcing synthesis: plug the background pair into the self-similar system.
//
//   F(tau) = -1/2 (1 + xi.grad) Ubar - Lap Ubar + P(Ubar.grad Ubar)
//            - e^{b tau} P(theta_core grad G)
//   H(tau) = e^{b tau} [ (b - 1/2) theta_c - 1/2 xi.grad theta_c
//                        - Lap theta_c + Ubar.grad theta_c ]
//
// Both are evaluable at any tau from the three cached core fields.

struct ForcingPair {
  SpectralVectorField F_steady;   // velocity part, tau independent
  SpectralVectorField F_gravity;  // coefficient of e^{b tau}
  SpectralScalarField H_core;     // coefficient of e^{b tau}
  double b = 1.0;

  SpectralVectorField F(double tau) const {
    SpectralVectorField f = F_steady;
    f.axpy(-std::exp(b * tau), F_gravity);
    return f;
  }
  SpectralScalarField H(double tau) const {
    SpectralScalarField h = H_core;
    h *= std::exp(b * tau);
    return h;
  }

  // Natural-coordinate norms via the exact dilation bookkeeping:
  // ||f(t)||_L2 = t^{-3/4} ||F(log t)||_L2.
  double f_l2_natural(double t) const {
    return std::pow(t, -0.75) * F(std::log(t)).l2();
  }
  double h_l2_natural(double t) const {
    return std::pow(t, -0.75) * H(std::log(t)).l2();
  }

  SpectralVectorField f_natural(double t) const {
    return to_natural(F(std::log(t)), t, FieldWeight::forcing);
  }
  SpectralScalarField h_natural(double t) const {
    return to_natural(H(std::log(t)), t, FieldWeight::forcing);
  }
};

inline ForcingPair synthesize_forcing(const BackgroundProfile& bp) {
  const PeriodicGrid& g = bp.grid;
  const CutoffCoordinates xi(g, bp.cutoff);

  SpectralVectorField Fs = bp.U_bar;
  Fs *= -0.5;
  Fs.axpy(-0.5, radial_advect(xi, bp.U_bar));
  Fs -= laplacian(bp.U_bar);
  Fs += leray_project(advect(bp.U_bar, bp.U_bar));

  SpectralVectorField Fg = gravity_gradient(bp.theta_core);

  SpectralScalarField Hc = bp.theta_core;
  Hc *= (bp.params.b - 0.5);
  Hc.axpy(-0.5, radial_advect(xi, bp.theta_core));
  Hc -= laplacian(bp.theta_core);
  Hc += advect(bp.U_bar, bp.theta_core);

  return ForcingPair{std::move(Fs), std::move(Fg), std::move(Hc), bp.params.b};
}

// Least-squares slope of log(||f|| + ||h||) against log t over a log-spaced
// sample of (0, 1].
inline double forcing_decay_slope(const ForcingPair& fp, double t_lo,
                                  double t_hi, int samples = 12) {
  if (!(t_lo > 0) || !(t_hi <= 1.0) || !(t_lo < t_hi))
    throw ConfigError("forcing_decay_slope: need 0 < t_lo < t_hi <= 1");
  if (samples < 8)
    throw ConfigError("forcing_decay_slope: need >= 8 sample points");
  std::vector<double> ts = log_spaced(t_lo, t_hi, samples);
  std::vector<double> norms(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    norms[i] = fp.f_l2_natural(ts[i]) + fp.h_l2_natural(ts[i]);
    if (norms[i] < 1e-14)
      throw DegenerateInputError("forcing_decay_slope: norms below 1e-14");
  }
  return fit_loglog(ts, norms).slope;
}

}  // namespace obss
