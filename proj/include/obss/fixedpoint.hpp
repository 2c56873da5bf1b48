// Duhamel fixed-point construction of the perturbation pair (U_p, Theta_p):
// weighted trajectory spaces, the map Phi = (Phi_1, Phi_2), exponent
// feasibility, Picard iteration and the per-term rate probes.
#pragma once

#include <cmath>
#include <string>

#include "obss/spectra.hpp"

namespace obss {

// ---------------------------------------------------------------------------
// Exponent bookkeeping. Feasibility means the integrals behind Phi converge
// and Phi maps the ball to itself once tau0 is small enough:
//   a > delta, beta > delta, gamma > a + delta        (integral convergence)
//   2a > beta, gamma > beta, beta + b > gamma, a + b > gamma  (self-map)
//   beta > a                                           (linear mode survives)

struct ExponentParams {
  double a = 0.7;
  double delta = 0.1;
  double beta = 1.05;
  double gamma = 1.4;
  double b = 1.0;
  SobolevIndex N = 1.75;
  double tau0 = -3.0;
  double M = 0.5;
};

inline std::vector<std::string> check_exponents(const ExponentParams& p) {
  for (double v : {p.a, p.delta, p.beta, p.gamma, p.b})
    if (!(v > 0)) throw ConfigError("check_exponents: entries must be positive");
  std::vector<std::string> violated;
  auto require = [&](bool ok, const char* name) {
    if (!ok) violated.push_back(name);
  };
  require(p.a > p.delta, "a > delta");
  require(p.beta > p.delta, "beta > delta");
  require(p.gamma > p.a + p.delta, "gamma > a + delta");
  require(2.0 * p.a > p.beta, "2a > beta");
  require(p.gamma > p.beta, "gamma > beta");
  require(p.beta + p.b > p.gamma, "beta + b > gamma");
  require(p.a + p.b > p.gamma, "a + b > gamma");
  require(p.beta > p.a, "beta > a");
  require(p.N > 1.5 && p.N < 2.0, "3/2 < N < 2");
  require(p.M > 0.0 && p.M < 1.0, "0 < M < 1");
  return violated;
}

inline bool feasible(const ExponentParams& p) {
  return check_exponents(p).empty();
}

// Slowest backward-decay rate among the nine term integrands; sets how far
// below tau0 the truncation point must sit.
inline double slowest_term_rate(const ExponentParams& p) {
  double r = 2.0 * p.a;
  for (double v : {p.a + p.beta, 2.0 * p.beta, p.gamma, p.a + p.b,
                   p.a + p.gamma, p.beta + p.b, p.beta + p.gamma})
    r = std::min(r, v);
  return r;
}

// ---------------------------------------------------------------------------
// Time-sampled trajectories with the weighted sup norms.

struct TrajectoryX {
  std::vector<double> taus;
  std::vector<SpectralVectorField> nodes;

  static TrajectoryX zero(const PeriodicGrid& g,
                          const std::vector<double>& taus) {
    TrajectoryX t;
    t.taus = taus;
    t.nodes.assign(taus.size(), SpectralVectorField::zero(g));
    for (auto& n : t.nodes) n.divergence_free_flag = true;
    return t;
  }

  // sup_tau e^{-beta tau} ||U(tau)||_{H^N}
  double weighted_norm(double beta, SobolevIndex N) const {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      s = std::max(s, std::exp(-beta * taus[j]) * hs_norm(nodes[j], N));
    return s;
  }
};

struct TrajectoryY {
  std::vector<double> taus;
  std::vector<SpectralScalarField> nodes;

  static TrajectoryY zero(const PeriodicGrid& g,
                          const std::vector<double>& taus) {
    TrajectoryY t;
    t.taus = taus;
    t.nodes.assign(taus.size(), SpectralScalarField::zero(g));
    return t;
  }

  double weighted_norm(double gamma, SobolevIndex Np1) const {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      s = std::max(s, std::exp(-gamma * taus[j]) * hs_norm(nodes[j], Np1));
    return s;
  }
};

// ---------------------------------------------------------------------------
// Linear mode U_l(tau) = c * Re(e^{lambda tau} rho).

class LinearMode {
 public:
  LinearMode() = default;

  static LinearMode from_estimate(const EigenEstimate& est,
                                  double coefficient) {
    if (!est.converged && coefficient != 0.0)
      throw ConfigError("linear_mode: eigen estimate is not converged");
    LinearMode m;
    m.lambda_ = est.lambda;
    m.rho_re_ = est.rho_re;
    m.rho_im_ = est.rho_im;
    m.complex_ = est.complex_pair;
    m.c_ = coefficient;
    return m;
  }

  std::complex<double> lambda() const { return lambda_; }
  double coefficient() const { return c_; }
  const SpectralVectorField& rho_re() const { return rho_re_; }

  SpectralVectorField at(double tau) const {
    SpectralVectorField out = rho_re_;
    const double g = c_ * std::exp(lambda_.real() * tau);
    if (complex_) {
      const double w = lambda_.imag() * tau;
      out *= g * std::cos(w);
      out.axpy(-g * std::sin(w), rho_im_);
    } else {
      out *= g;
    }
    out.divergence_free_flag = true;
    return out;
  }

 private:
  std::complex<double> lambda_{0, 0};
  SpectralVectorField rho_re_, rho_im_;
  bool complex_ = false;
  double c_ = 0.0;
};

inline SpectralVectorField linear_mode(const EigenEstimate& est, double tau) {
  return LinearMode::from_estimate(est, 1.0).at(tau);
}

// ---------------------------------------------------------------------------
// Duhamel march.
//
// A(tau_{j+1}) = e^{dtau L} A(tau_j) + int_{tau_j}^{tau_{j+1}}
//                  e^{(tau_{j+1}-s) L} S(s) ds,
// with the panel integral computed after the substitution s = tau_{j+1}-u^2
// (midpoint in u), which removes the (tau - s)^{-1/2} endpoint singularity of
// the smoothing bounds. Sources are cached at the nodes and interpolated with
// a cubic Lagrange stencil; summing all integrand terms into one source per
// node keeps each iteration at O(n_nodes) propagator applications.

struct QuadratureParams {
  int panel_nodes = 3;

  void validate() const {
    if (panel_nodes < 1) throw ConfigError("panel_nodes must be >= 1");
  }
};

namespace detail {

// Cubic Lagrange weights for target x in node coordinates (uniform spacing 1,
// stencil at integer offsets base..base+3 relative to node 0).
struct CubicStencil {
  int base;
  std::array<double, 4> w;
};

inline CubicStencil cubic_stencil(double x, int n_nodes) {
  int base = static_cast<int>(std::floor(x)) - 1;
  base = std::max(0, std::min(base, n_nodes - 4));
  CubicStencil st{base, {}};
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      w *= (x - (base + j)) / double(i - j);
    }
    st.w[i] = w;
  }
  return st;
}

template <class Field>
Field interpolate_nodes(const std::vector<Field>& nodes,
                        const CubicStencil& s) {
  Field out = nodes[s.base];
  out *= s.w[0];
  for (int i = 1; i < 4; ++i) out.axpy(s.w[i], nodes[s.base + i]);
  return out;
}

}  // namespace detail

template <class Field, class Prop>
std::vector<Field> duhamel_march(const PeriodicGrid& g,
                                 const std::vector<double>& taus, double dtau,
                                 const std::vector<Field>& sources,
                                 const Prop& P, const QuadratureParams& q) {
  q.validate();
  if (sources.size() != taus.size() || taus.size() < 4)
    throw ConfigError("duhamel_march: need >= 4 matched nodes");
  std::vector<Field> out;
  out.reserve(taus.size());
  Field acc = Field(g);
  out.push_back(acc);
  const double sq = std::sqrt(dtau);
  const double du = sq / q.panel_nodes;
  for (std::size_t j = 0; j + 1 < taus.size(); ++j) {
    acc = P.apply(acc, dtau);
    for (int i = 0; i < q.panel_nodes; ++i) {
      const double u = (i + 0.5) * du;
      const double weight = 2.0 * u * du;
      // Source location tau_{j+1} - u^2 in node coordinates.
      const double x = (j + 1) - u * u / dtau;
      const auto st = detail::cubic_stencil(x, static_cast<int>(taus.size()));
      Field s = detail::interpolate_nodes(sources, st);
      Field transported = P.apply(s, u * u);
      acc.axpy(weight, transported);
    }
    out.push_back(acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-point context: everything Phi needs.

struct FixedPointContext {
  PeriodicGrid grid;
  std::vector<double> taus;  // uniform: tau_min + j*dtau up to tau0
  double dtau = 0.05;
  const VectorPropagator* Lss = nullptr;
  const ScalarPropagator* L = nullptr;
  const BackgroundProfile* bg = nullptr;
  LinearMode Ul;
  ExponentParams exps;
  QuadratureParams quad;
  PhysicalVector gradG;  // cached gravity kernel in physical space

  static std::vector<double> make_tau_grid(double tau_min, double tau0,
                                           double dtau) {
    if (!(tau_min < tau0)) throw ConfigError("need tau_min < tau0");
    const int n = static_cast<int>(std::round((tau0 - tau_min) / dtau));
    if (n < 4) throw ConfigError("tau grid too short");
    std::vector<double> taus(n + 1);
    for (int j = 0; j <= n; ++j) taus[j] = tau_min + j * dtau;
    return taus;
  }

  static FixedPointContext make(const PeriodicGrid& g,
                                const ExponentParams& exps, double tau_min,
                                double dtau, const VectorPropagator& Lss,
                                const ScalarPropagator& L,
                                const BackgroundProfile& bg,
                                const LinearMode& Ul,
                                QuadratureParams quad = {}) {
    const auto violated = check_exponents(exps);
    if (!violated.empty())
      throw InfeasibleError("infeasible exponents", violated);
    FixedPointContext ctx;
    ctx.grid = g;
    ctx.dtau = dtau;
    ctx.taus = make_tau_grid(tau_min, exps.tau0, dtau);
    ctx.Lss = &Lss;
    ctx.L = &L;
    ctx.bg = &bg;
    ctx.Ul = Ul;
    ctx.exps = exps;
    ctx.quad = quad;
    ctx.gradG = to_physical(gravity_kernel_gradient(g));
    return ctx;
  }
};

// The four advection terms of Phi_1 collapse to one product:
//   U_l.grad U_l + U_l.grad U_p + U_p.grad U_l + U_p.grad U_p = W.grad W,
// W = U_l + U_p; likewise the four terms of Phi_2 equal
// W.grad(Theta_bar + Theta_p).
inline TrajectoryX apply_phi1(const FixedPointContext& ctx,
                              const TrajectoryX& Up, const TrajectoryY& Tp) {
  std::vector<SpectralVectorField> S;
  S.reserve(ctx.taus.size());
  for (std::size_t j = 0; j < ctx.taus.size(); ++j) {
    SpectralVectorField W = ctx.Ul.at(ctx.taus[j]);
    W += Up.nodes[j];
    SpectralVectorField adv = leray_project(advect(W, W));
    adv *= -1.0;
    adv += gravity_gradient(Tp.nodes[j], ctx.gradG);
    dealias_inplace(adv);
    S.push_back(leray_project(adv));
  }
  TrajectoryX out;
  out.taus = ctx.taus;
  out.nodes = duhamel_march(ctx.grid, ctx.taus, ctx.dtau, S, *ctx.Lss, ctx.quad);
  for (auto& n : out.nodes) n.divergence_free_flag = true;
  return out;
}

inline TrajectoryY apply_phi2(const FixedPointContext& ctx,
                              const TrajectoryX& Up, const TrajectoryY& Tp) {
  std::vector<SpectralScalarField> S;
  S.reserve(ctx.taus.size());
  for (std::size_t j = 0; j < ctx.taus.size(); ++j) {
    SpectralVectorField W = ctx.Ul.at(ctx.taus[j]);
    W += Up.nodes[j];
    SpectralScalarField th = ctx.bg->theta_bar(ctx.taus[j]);
    th += Tp.nodes[j];
    SpectralScalarField adv = advect(W, th);
    adv *= -1.0;
    S.push_back(std::move(adv));
  }
  TrajectoryY out;
  out.taus = ctx.taus;
  out.nodes = duhamel_march(ctx.grid, ctx.taus, ctx.dtau, S, *ctx.L, ctx.quad);
  return out;
}

// ---------------------------------------------------------------------------
// Picard iteration on the ball B.

struct PicardIterationRow {
  int iter = 0;
  double norm_X = 0, norm_Y = 0;
  double delta_X = 0, delta_Y = 0;
  double contraction_factor = 0;  // 0 on the first iteration
};

struct PicardResult {
  TrajectoryX Up;
  TrajectoryY Tp;
  std::vector<PicardIterationRow> log;
  double contraction_factor = 0;  // max over settled iterations
  double fixed_point_residual = 1e300;
  bool converged = false;
  bool in_ball = false;
};

inline PicardResult picard_solve(const FixedPointContext& ctx, int max_iter,
                                 double tol) {
  const auto violated = check_exponents(ctx.exps);
  if (!violated.empty()) throw InfeasibleError("infeasible exponents", violated);
  const double beta = ctx.exps.beta, gamma = ctx.exps.gamma;
  const SobolevIndex N = ctx.exps.N;

  TrajectoryX Up = TrajectoryX::zero(ctx.grid, ctx.taus);
  TrajectoryY Tp = TrajectoryY::zero(ctx.grid, ctx.taus);
  PicardResult res;
  double prev_delta = 0.0;
  int rising = 0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    TrajectoryX Up1 = apply_phi1(ctx, Up, Tp);
    TrajectoryY Tp1 = apply_phi2(ctx, Up, Tp);

    double dX = 0, dY = 0;
    for (std::size_t j = 0; j < ctx.taus.size(); ++j) {
      const double w = std::exp(-beta * ctx.taus[j]);
      dX = std::max(dX, w * hs_norm(Up1.nodes[j] - Up.nodes[j], N));
      const double wy = std::exp(-gamma * ctx.taus[j]);
      dY = std::max(dY, wy * hs_norm(Tp1.nodes[j] - Tp.nodes[j], N + 1.0));
    }
    PicardIterationRow row;
    row.iter = iter;
    row.norm_X = Up1.weighted_norm(beta, N);
    row.norm_Y = Tp1.weighted_norm(gamma, N + 1.0);
    row.delta_X = dX;
    row.delta_Y = dY;
    const double delta = dX + dY;
    if (iter >= 2 && prev_delta > 0) {
      row.contraction_factor = delta / prev_delta;
      if (delta > 1e-14)  // ignore the roundoff floor
        res.contraction_factor =
            std::max(res.contraction_factor, row.contraction_factor);
      rising = row.contraction_factor >= 1.0 ? rising + 1 : 0;
    }
    res.log.push_back(row);
    Up = std::move(Up1);
    Tp = std::move(Tp1);

    if (rising >= 3)
      throw NumericalError(
          "picard_solve: contraction factor >= 1 for 3 consecutive "
          "iterations; reduce tau0 (smallness enters through the e^{c tau0} "
          "prefactors)");
    if (delta <= tol) {
      res.converged = true;
      break;
    }
    prev_delta = delta;
  }

  // Independent fixed-point residual ||Phi(U,Theta) - (U,Theta)||_{X+Y}.
  {
    TrajectoryX Ur = apply_phi1(ctx, Up, Tp);
    TrajectoryY Tr = apply_phi2(ctx, Up, Tp);
    double rX = 0, rY = 0;
    for (std::size_t j = 0; j < ctx.taus.size(); ++j) {
      rX = std::max(rX, std::exp(-beta * ctx.taus[j]) *
                            hs_norm(Ur.nodes[j] - Up.nodes[j], N));
      rY = std::max(rY, std::exp(-gamma * ctx.taus[j]) *
                            hs_norm(Tr.nodes[j] - Tp.nodes[j], N + 1.0));
    }
    res.fixed_point_residual = rX + rY;
  }
  res.in_ball = Up.weighted_norm(beta, N) <= ctx.exps.M &&
                Tp.weighted_norm(gamma, N + 1.0) <= ctx.exps.M;
  res.Up = std::move(Up);
  res.Tp = std::move(Tp);
  return res;
}

// ---------------------------------------------------------------------------
// Per-term rate probes against the displayed bounds.

enum class DuhamelTerm {
  UlGradUl,        // rate 2a,        H^N
  UlGradUp,        // rate a+beta,    H^N
  UpGradUl,        // rate a+beta,    H^N
  UpGradUp,        // rate 2beta,     H^N
  GravityThetaP,   // rate gamma,     H^N
  UlGradThetaBar,  // rate a+b,       H^{N+1}
  UlGradThetaP,    // rate a+gamma,   H^{N+1}
  UpGradThetaBar,  // rate beta+b,    H^{N+1}
  UpGradThetaP     // rate beta+gamma, H^{N+1}
};

inline const char* term_name(DuhamelTerm t) {
  switch (t) {
    case DuhamelTerm::UlGradUl: return "Ul.grad(Ul)";
    case DuhamelTerm::UlGradUp: return "Ul.grad(Up)";
    case DuhamelTerm::UpGradUl: return "Up.grad(Ul)";
    case DuhamelTerm::UpGradUp: return "Up.grad(Up)";
    case DuhamelTerm::GravityThetaP: return "P(ThetaP.gradG)";
    case DuhamelTerm::UlGradThetaBar: return "Ul.grad(ThetaBar)";
    case DuhamelTerm::UlGradThetaP: return "Ul.grad(ThetaP)";
    case DuhamelTerm::UpGradThetaBar: return "Up.grad(ThetaBar)";
    case DuhamelTerm::UpGradThetaP: return "Up.grad(ThetaP)";
  }
  return "?";
}

inline double expected_term_rate(DuhamelTerm t, const ExponentParams& e) {
  switch (t) {
    case DuhamelTerm::UlGradUl: return 2 * e.a;
    case DuhamelTerm::UlGradUp: return e.a + e.beta;
    case DuhamelTerm::UpGradUl: return e.a + e.beta;
    case DuhamelTerm::UpGradUp: return 2 * e.beta;
    case DuhamelTerm::GravityThetaP: return e.gamma;
    case DuhamelTerm::UlGradThetaBar: return e.a + e.b;
    case DuhamelTerm::UlGradThetaP: return e.a + e.gamma;
    case DuhamelTerm::UpGradThetaBar: return e.beta + e.b;
    case DuhamelTerm::UpGradThetaP: return e.beta + e.gamma;
  }
  return 0;
}

struct TermProbeResult {
  DuhamelTerm term;
  double fitted_rate = 0;
  double prefactor = 0;
  double expected_rate = 0;
};

// Unit test trajectories: U_p(tau) = e^{beta tau} Psi_U with ||Psi_U||_HN = 1,
// Theta_p(tau) = e^{gamma tau} Psi_T with ||Psi_T||_{H^{N+1}} = 1.
inline TermProbeResult probe_term_bounds(const FixedPointContext& ctx,
                                         DuhamelTerm term,
                                         double fit_window = 2.0) {
  const auto& e = ctx.exps;
  SpectralVectorField PsiU = make_background_velocity(
      ctx.grid, 1.0, ctx.bg->params.support_radius, VelocityShape::curl_bump);
  PsiU *= 1.0 / hs_norm(PsiU, e.N);
  SpectralScalarField PsiT = bump_field(ctx.grid, ctx.bg->params.support_radius);
  PsiT *= 1.0 / hs_norm(PsiT, e.N + 1.0);

  const bool vector_term = term == DuhamelTerm::UlGradUl ||
                           term == DuhamelTerm::UlGradUp ||
                           term == DuhamelTerm::UpGradUl ||
                           term == DuhamelTerm::UpGradUp ||
                           term == DuhamelTerm::GravityThetaP;

  std::vector<double> norms(ctx.taus.size());
  if (vector_term) {
    std::vector<SpectralVectorField> S;
    S.reserve(ctx.taus.size());
    for (double tau : ctx.taus) {
      SpectralVectorField s(ctx.grid);
      switch (term) {
        case DuhamelTerm::UlGradUl:
          s = leray_project(advect(ctx.Ul.at(tau), ctx.Ul.at(tau)));
          break;
        case DuhamelTerm::UlGradUp: {
          SpectralVectorField up = PsiU;
          up *= std::exp(e.beta * tau);
          s = leray_project(advect(ctx.Ul.at(tau), up));
          break;
        }
        case DuhamelTerm::UpGradUl: {
          SpectralVectorField up = PsiU;
          up *= std::exp(e.beta * tau);
          s = leray_project(advect(up, ctx.Ul.at(tau)));
          break;
        }
        case DuhamelTerm::UpGradUp: {
          SpectralVectorField up = PsiU;
          up *= std::exp(e.beta * tau);
          s = leray_project(advect(up, up));
          break;
        }
        case DuhamelTerm::GravityThetaP: {
          SpectralScalarField tp = PsiT;
          tp *= std::exp(e.gamma * tau);
          s = gravity_gradient(tp, ctx.gradG);
          break;
        }
        default: break;
      }
      S.push_back(std::move(s));
    }
    auto nodes = duhamel_march(ctx.grid, ctx.taus, ctx.dtau, S, *ctx.Lss,
                               ctx.quad);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      norms[j] = hs_norm(nodes[j], e.N);
  } else {
    std::vector<SpectralScalarField> S;
    S.reserve(ctx.taus.size());
    for (double tau : ctx.taus) {
      SpectralScalarField s(ctx.grid);
      switch (term) {
        case DuhamelTerm::UlGradThetaBar:
          s = advect(ctx.Ul.at(tau), ctx.bg->theta_bar(tau));
          break;
        case DuhamelTerm::UlGradThetaP: {
          SpectralScalarField tp = PsiT;
          tp *= std::exp(e.gamma * tau);
          s = advect(ctx.Ul.at(tau), tp);
          break;
        }
        case DuhamelTerm::UpGradThetaBar: {
          SpectralVectorField up = PsiU;
          up *= std::exp(e.beta * tau);
          s = advect(up, ctx.bg->theta_bar(tau));
          break;
        }
        case DuhamelTerm::UpGradThetaP: {
          SpectralVectorField up = PsiU;
          up *= std::exp(e.beta * tau);
          SpectralScalarField tp = PsiT;
          tp *= std::exp(e.gamma * tau);
          s = advect(up, tp);
          break;
        }
        default: break;
      }
      S.push_back(std::move(s));
    }
    auto nodes = duhamel_march(ctx.grid, ctx.taus, ctx.dtau, S, *ctx.L,
                               ctx.quad);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      norms[j] = hs_norm(nodes[j], e.N + 1.0);
  }

  // Fit the tail window, past the truncation transient.
  std::vector<double> ft, fn;
  const double lo = ctx.taus.back() - fit_window;
  for (std::size_t j = 0; j < ctx.taus.size(); ++j)
    if (ctx.taus[j] >= lo && norms[j] > 1e-300) {
      ft.push_back(ctx.taus[j]);
      fn.push_back(norms[j]);
    }
  const LineFit fit = fit_semilog(ft, fn);
  return TermProbeResult{term, fit.slope, std::exp(fit.intercept),
                         expected_term_rate(term, e)};
}

}  // namespace obss
