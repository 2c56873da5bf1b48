// Matrix-free realization of e^{tau L} and e^{tau L_ss}.
//
// Both semigroups are realized through their natural-coordinate equations
//   e^{tau L}:    d_t theta = Lap theta - ubar . grad theta
//   e^{tau L_ss}: d_t v     = Lap v - P(ubar . grad v + v . grad ubar)
// with ubar(x,t) = t^{-1/2} Ubar(x/sqrt(t)), solved on t in [1, e^tau] and
// pulled back by the self-similar map. Long horizons are compositions of
// short re-anchored chunks: each chunk runs on t in [1, e^h] with the drift
// frozen at the chunk's time midpoint (the dilation of Ubar is cached per
// horizon), then the state is pulled back onto the standard grid. This keeps
// the natural integration time at sum(e^h - 1) ~ tau instead of e^tau and the
// dilation factor per resample near one.
//
// Time stepping is integrating-factor Heun: diffusion exact in spectral
// space, advection explicit, dealiased; the CFL restriction comes from the
// advective part only.
#pragma once

#include <functional>
#include <map>
#include <memory>

#include "obss/fit.hpp"
#include "obss/profiles.hpp"
#include "obss/selfsim.hpp"

namespace obss {

struct StepperConfig {
  double dt = 1e-3;        // max natural-time substep
  double chunk_max = 0.1;  // max tau horizon per re-anchored chunk
  double cfl_safety = 0.4; // dt must be <= cfl_safety * dx / max|ubar|
  double t_start = 1.0;    // natural anchor time of each chunk
  double tau_max = 6.0;    // refuse longer single applications

  void validate() const {
    if (!(dt > 0)) throw ConfigError("stepper.dt must be positive");
    if (!(chunk_max > 0)) throw ConfigError("stepper.chunk_max must be positive");
    if (!(cfl_safety > 0) || cfl_safety > 1)
      throw ConfigError("stepper.cfl_safety must lie in (0,1]");
    if (t_start != 1.0)
      throw ConfigError("stepper.t_start: only the anchor t=1 is supported");
  }
};

namespace detail {

// Diffusion factors exp(-|k|^2 dt) for the grid, cached per (grid, dt).
inline std::shared_ptr<const std::vector<double>> diffusion_factors(
    const PeriodicGrid& g, double dt) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>,
                  std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{g.n, g.box_side, dt}];
  if (!slot) {
    auto v = std::make_shared<std::vector<double>>(g.size());
    std::size_t i = 0;
    for (int jz = 0; jz < g.n; ++jz) {
      const double kz = g.wavenumber(jz);
      for (int jy = 0; jy < g.n; ++jy) {
        const double ky = g.wavenumber(jy);
        for (int jx = 0; jx < g.n; ++jx, ++i) {
          const double kx = g.wavenumber(jx);
          (*v)[i] = std::exp(-(kx * kx + ky * ky + kz * kz) * dt);
        }
      }
    }
    slot = std::move(v);
  }
  return slot;
}

inline void scale_coeffs(SpectralScalarField& f, const std::vector<double>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) f[i] *= m[i];
}
inline void scale_coeffs(SpectralVectorField& f, const std::vector<double>& m) {
  for (int c = 0; c < 3; ++c) scale_coeffs(f[c], m);
}

}  // namespace detail

// Frozen drift data for one chunk horizon.
struct DriftBundle {
  PhysicalVector u;                        // ubar at the chunk midpoint
  std::array<PhysicalVector, 3> grad_u;    // grad_u[i].c[j] = d_j ubar_i
  double vmax = 0.0;
};

namespace detail {

inline DriftBundle make_drift_bundle(const SpectralVectorField& U_bar,
                                     double horizon, bool with_gradient) {
  const double t_mid = 0.5 * (1.0 + std::exp(horizon));
  const double s = 1.0 / std::sqrt(t_mid);
  DriftBundle b;
  SpectralVectorField u_mid(U_bar.grid());
  for (int i = 0; i < 3; ++i) {
    u_mid[i] = dilate(U_bar[i], s);
    u_mid[i] *= 1.0 / std::sqrt(t_mid);
  }
  b.u = to_physical(u_mid);
  b.vmax = max_abs(b.u);
  if (with_gradient) {
    for (int i = 0; i < 3; ++i) {
      SpectralVectorField gi(U_bar.grid());
      for (int j = 0; j < 3; ++j) {
        gi[j] = dilate(derivative(U_bar[i], j), s);
        gi[j] *= 1.0 / t_mid;
      }
      b.grad_u[i] = to_physical(gi);
    }
  }
  return b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// e^{tau L} on scalars.

class ScalarPropagator {
 public:
  virtual ~ScalarPropagator() = default;
  virtual SpectralScalarField apply(const SpectralScalarField& theta,
                                    double tau) const = 0;
  virtual const PeriodicGrid& grid() const = 0;
};

class LinearizedScalarPropagator : public ScalarPropagator {
 public:
  LinearizedScalarPropagator(SpectralVectorField U_bar, StepperConfig cfg)
      : U_bar_(std::move(U_bar)), cfg_(cfg) {
    cfg_.validate();
  }

  const PeriodicGrid& grid() const override { return U_bar_.grid(); }
  const StepperConfig& config() const { return cfg_; }

  SpectralScalarField apply(const SpectralScalarField& theta0,
                            double tau) const override {
    SpectralScalarField out;
    trajectory(theta0, {tau},
               [&](std::size_t, const SpectralScalarField& state,
                   double) { out = state; },
               /*want_standard_grid=*/true);
    return out;
  }

  // Marches through the increasing tau targets. The visitor receives the
  // *natural* chunk-end state together with its anchor time t_end
  // (pullback_hs_norm gives exact self-similar norms from it); when
  // want_standard_grid is set the visitor instead receives the resampled
  // standard-grid field with t_end = 1.
  template <class Visitor>
  void trajectory(const SpectralScalarField& theta0,
                  const std::vector<double>& taus, Visitor&& visit,
                  bool want_standard_grid = false) const {
    require_same_grid(theta0.grid(), grid(), "LinearizedScalarPropagator");
    SpectralScalarField state = theta0;
    dealias_inplace(state);
    double tau_prev = 0.0;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      const double gap = taus[ti] - tau_prev;
      if (gap < -1e-12) throw ConfigError("trajectory: taus must increase");
      if (taus[ti] > cfg_.tau_max + 1e-12)
        throw ConfigError("trajectory: tau exceeds stepper.tau_max");
      if (gap > 1e-12) {
        const int chunks = static_cast<int>(std::ceil(gap / cfg_.chunk_max - 1e-12));
        const double h = gap / chunks;
        const double t_end = std::exp(h);
        const DriftBundle& drift = drift_for(h);
        for (int c = 0; c < chunks; ++c) {
          run_chunk(state, drift, t_end);
          const bool last = (c == chunks - 1);
          if (last && !want_standard_grid) visit(ti, state, t_end);
          state = to_selfsimilar(state, t_end, FieldWeight::velocity);
          dealias_inplace(state);
          if (last && want_standard_grid) visit(ti, state, 1.0);
        }
      } else {
        visit(ti, state, 1.0);
      }
      tau_prev = taus[ti];
    }
  }

  // Max over steps of the discrete energy-identity defect
  //   | (||theta^{n+1}||^2 - ||theta^n||^2) / (2 dt) + W |  /  ||theta0||_H1^2
  // where W is the symmetrized exact diffusion work of the step (exact for
  // pure diffusion, O(dt^2) otherwise).
  double energy_identity_drift(const SpectralScalarField& theta0,
                               double T) const {
    SpectralScalarField state = theta0;
    dealias_inplace(state);
    const double denom = std::pow(hs_norm(state, 1.0), 2);
    if (denom < 1e-300)
      throw DegenerateInputError("energy_identity_drift: zero input");
    const DriftBundle& drift = drift_for(cfg_.chunk_max);
    const int steps = static_cast<int>(std::ceil(T / cfg_.dt - 1e-12));
    const double dt = T / steps;
    check_cfl(dt, drift.vmax);
    const auto E = detail::diffusion_factors(grid(), dt);
    const double L3 = std::pow(grid().box_side, 3);
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
      double n_before = 0.0, n_before_diff = 0.0;
      for (std::size_t i = 0; i < state.coef().size(); ++i) {
        const double m = std::norm(state[i]);
        n_before += m;
        n_before_diff += m * (*E)[i] * (*E)[i];
      }
      SpectralScalarField next = heun_step(state, drift, dt, *E);
      double n_after = 0.0, n_after_undiff = 0.0;
      for (std::size_t i = 0; i < next.coef().size(); ++i) {
        const double m = std::norm(next[i]);
        n_after += m;
        const double einv = 1.0 / (*E)[i];
        n_after_undiff += m * einv * einv;
      }
      const double dE = 0.5 * L3 * (n_after - n_before) / dt;
      const double work = 0.25 * L3 *
                          ((n_before - n_before_diff) +
                           (n_after_undiff - n_after)) / dt;
      worst = std::max(worst, std::abs(dE + work) / denom);
      state = std::move(next);
    }
    return worst;
  }

 private:
  const DriftBundle& drift_for(double h) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = drift_cache_[h];
    if (!slot)
      slot = std::make_unique<DriftBundle>(
          detail::make_drift_bundle(U_bar_, h, /*with_gradient=*/false));
    return *slot;
  }

  void check_cfl(double dt, double vmax) const {
    const double dx = grid().dx();
    if (vmax > 0 && dt > cfg_.cfl_safety * dx / vmax)
      throw CflError("advective CFL violated", cfg_.cfl_safety * dx / vmax);
  }

  SpectralScalarField heun_step(const SpectralScalarField& theta,
                                const DriftBundle& drift, double dt,
                                const std::vector<double>& E) const {
    SpectralScalarField k1 = advect(drift.u, theta);
    k1 *= -1.0;
    SpectralScalarField mid = theta;
    mid.axpy(dt, k1);
    detail::scale_coeffs(mid, E);
    SpectralScalarField k2 = advect(drift.u, mid);
    k2 *= -1.0;
    SpectralScalarField out = theta;
    out.axpy(0.5 * dt, k1);
    detail::scale_coeffs(out, E);  // E theta + dt/2 E k1
    out.axpy(0.5 * dt, k2);
    return out;
  }

  void run_chunk(SpectralScalarField& state, const DriftBundle& drift,
                 double t_end) const {
    const int steps = static_cast<int>(std::ceil((t_end - 1.0) / cfg_.dt - 1e-12));
    const double dt = (t_end - 1.0) / steps;
    check_cfl(dt, drift.vmax);
    const auto E = detail::diffusion_factors(grid(), dt);
    for (int s = 0; s < steps; ++s) state = heun_step(state, drift, dt, *E);
  }

  SpectralVectorField U_bar_;
  StepperConfig cfg_;
  mutable std::mutex mu_;
  mutable std::map<double, std::unique_ptr<DriftBundle>> drift_cache_;
};

// ---------------------------------------------------------------------------
// e^{tau L_ss} on divergence-free vectors.

class VectorPropagator {
 public:
  virtual ~VectorPropagator() = default;
  virtual SpectralVectorField apply(const SpectralVectorField& v,
                                    double tau) const = 0;
  virtual const PeriodicGrid& grid() const = 0;
};

class LinearizedVectorPropagator : public VectorPropagator {
 public:
  LinearizedVectorPropagator(SpectralVectorField U_bar, StepperConfig cfg)
      : U_bar_(std::move(U_bar)), cfg_(cfg) {
    cfg_.validate();
  }

  const PeriodicGrid& grid() const override { return U_bar_.grid(); }
  const StepperConfig& config() const { return cfg_; }

  SpectralVectorField apply(const SpectralVectorField& v0,
                            double tau) const override {
    SpectralVectorField out;
    trajectory(v0, {tau},
               [&](std::size_t, const SpectralVectorField& state,
                   double) { out = state; },
               /*want_standard_grid=*/true);
    return out;
  }

  template <class Visitor>
  void trajectory(const SpectralVectorField& v0,
                  const std::vector<double>& taus, Visitor&& visit,
                  bool want_standard_grid = false) const {
    require_same_grid(v0.grid(), grid(), "LinearizedVectorPropagator");
    SpectralVectorField state = leray_project(v0);
    dealias_inplace(state);
    double tau_prev = 0.0;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      const double gap = taus[ti] - tau_prev;
      if (gap < -1e-12) throw ConfigError("trajectory: taus must increase");
      if (taus[ti] > cfg_.tau_max + 1e-12)
        throw ConfigError("trajectory: tau exceeds stepper.tau_max");
      if (gap > 1e-12) {
        const int chunks = static_cast<int>(std::ceil(gap / cfg_.chunk_max - 1e-12));
        const double h = gap / chunks;
        const double t_end = std::exp(h);
        const DriftBundle& drift = drift_for(h);
        for (int c = 0; c < chunks; ++c) {
          run_chunk(state, drift, t_end);
          const bool last = (c == chunks - 1);
          if (last && !want_standard_grid) visit(ti, state, t_end);
          state = to_selfsimilar(state, t_end, FieldWeight::velocity);
          state = leray_project(state);
          dealias_inplace(state);
          if (last && want_standard_grid) visit(ti, state, 1.0);
        }
      } else {
        visit(ti, state, 1.0);
      }
      tau_prev = taus[ti];
    }
  }

 private:
  const DriftBundle& drift_for(double h) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = drift_cache_[h];
    if (!slot)
      slot = std::make_unique<DriftBundle>(
          detail::make_drift_bundle(U_bar_, h, /*with_gradient=*/true));
    return *slot;
  }

  // -P(ubar . grad v + v . grad ubar), dealiased.
  SpectralVectorField rhs(const SpectralVectorField& v,
                          const DriftBundle& drift) const {
    const PeriodicGrid& g = grid();
    PhysicalVector vp = to_physical(v);
    std::array<std::array<std::vector<double>, 3>, 3> gv;  // gv[i][j] = d_j v_i
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gv[i][j] = derivative(v[i], j).to_physical();
    SpectralVectorField out(g);
    std::vector<double> acc(g.size());
    for (int i = 0; i < 3; ++i) {
      for (std::size_t p = 0; p < acc.size(); ++p) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
          s += drift.u.c[j][p] * gv[i][j][p] +
               vp.c[j][p] * drift.grad_u[i].c[j][p];
        acc[p] = -s;
      }
      out[i] = SpectralScalarField::from_physical(g, acc);
    }
    dealias_inplace(out);
    return leray_project(out);
  }

  void run_chunk(SpectralVectorField& state, const DriftBundle& drift,
                 double t_end) const {
    const int steps = static_cast<int>(std::ceil((t_end - 1.0) / cfg_.dt - 1e-12));
    const double dt = (t_end - 1.0) / steps;
    const double dx = grid().dx();
    if (drift.vmax > 0 && dt > cfg_.cfl_safety * dx / drift.vmax)
      throw CflError("advective CFL violated", cfg_.cfl_safety * dx / drift.vmax);
    const auto E = detail::diffusion_factors(grid(), dt);
    for (int s = 0; s < steps; ++s) {
      SpectralVectorField k1 = rhs(state, drift);
      SpectralVectorField mid = state;
      mid.axpy(dt, k1);
      detail::scale_coeffs(mid, *E);
      SpectralVectorField k2 = rhs(mid, drift);
      SpectralVectorField out = state;
      out.axpy(0.5 * dt, k1);
      detail::scale_coeffs(out, *E);  // E v + dt/2 E k1
      out.axpy(0.5 * dt, k2);
      state = std::move(out);
      state.divergence_free_flag = true;
    }
  }

  SpectralVectorField U_bar_;
  StepperConfig cfg_;
  mutable std::mutex mu_;
  mutable std::map<double, std::unique_ptr<DriftBundle>> drift_cache_;
};

// ---------------------------------------------------------------------------
// Smoothing / growth probes.
//
// The smoothing statement is an operator bound, so each random input is
// concentrated on one wavenumber shell and the fit runs over the per-tau
// upper envelope across seeds; broadband inputs would measure an averaged
// (steeper) decay instead of the H^m -> H^k operator rate.

struct ProbeSample {
  std::string generator;
  double m = 0, k = 0;
  double tau = 0;
  double norm_ratio = 0;
  std::uint64_t seed = 0;
};

struct SemigroupProbeReport {
  SobolevIndex m = 0, k = 0;
  double small_tau_exponent = 0;   // log-log slope on the small-tau branch
  double small_tau_prefactor = 0;
  double large_tau_rate = 0;       // semilog slope on the large-tau branch
  std::vector<ProbeSample> samples;
  std::uint64_t base_seed = 0;
};

namespace detail {

inline std::vector<double> probe_shells(const PeriodicGrid& g) {
  std::vector<double> shells;
  const int cut = g.dealias_cutoff();
  double s = 1.0;
  while (s <= cut) {
    shells.push_back(s);
    s = std::max(s + 1.0, std::round(s * 1.6));
  }
  return shells;
}

template <class Report>
void fit_probe_branches(Report& rep, const std::vector<double>& taus,
                        const std::vector<double>& envelope,
                        double small_branch_max, double large_branch_min) {
  std::vector<double> st, sv, lt, lv;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] <= small_branch_max) {
      st.push_back(taus[i]);
      sv.push_back(envelope[i]);
    }
    if (taus[i] >= large_branch_min) {
      lt.push_back(taus[i]);
      lv.push_back(envelope[i]);
    }
  }
  if (st.size() >= 2) {
    const LineFit f = fit_loglog(st, sv);
    rep.small_tau_exponent = f.slope;
    rep.small_tau_prefactor = std::exp(f.intercept);
  }
  if (lt.size() >= 2) rep.large_tau_rate = fit_semilog(lt, lv).slope;
}

}  // namespace detail

inline SemigroupProbeReport probe_smoothing(
    const LinearizedScalarPropagator& P, SobolevIndex m, SobolevIndex k,
    int seeds, const std::vector<double>& tau_grid, std::uint64_t base_seed,
    double small_branch_max = 0.5, double large_branch_min = 1.5) {
  if (k < m || m < 0) throw ConfigError("probe_smoothing: need k >= m >= 0");
  if (seeds < 5)
    throw DegenerateInputError("probe_smoothing: need at least 5 seeds");
  for (double t : tau_grid)
    if (t < 0.01 || t > 4.0)
      throw ConfigError("probe_smoothing: tau_grid must lie in [0.01, 4]");
  SemigroupProbeReport rep;
  rep.m = m;
  rep.k = k;
  rep.base_seed = base_seed;
  const auto shells = detail::probe_shells(P.grid());
  std::vector<double> envelope(tau_grid.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    const double shell = shells[s % shells.size()];
    SpectralScalarField phi =
        random_shell_field(P.grid(), base_seed + s, shell);
    const double nm = hs_norm(phi, m);
    if (nm < 1e-300) continue;
    phi *= 1.0 / nm;
    P.trajectory(phi, tau_grid,
                 [&](std::size_t i, const SpectralScalarField& nat, double t) {
                   const double r = pullback_hs_norm(nat, t, k);
                   envelope[i] = std::max(envelope[i], r);
                   rep.samples.push_back(ProbeSample{"L", m, k, tau_grid[i], r,
                                                     base_seed + s});
                 });
  }
  detail::fit_probe_branches(rep, tau_grid, envelope, small_branch_max,
                             large_branch_min);
  return rep;
}

inline SemigroupProbeReport probe_smoothing(
    const LinearizedVectorPropagator& P, SobolevIndex m, SobolevIndex k,
    int seeds, const std::vector<double>& tau_grid, std::uint64_t base_seed,
    double small_branch_max = 0.5, double large_branch_min = 1.5) {
  if (k < m || m < 0) throw ConfigError("probe_smoothing: need k >= m >= 0");
  if (seeds < 5)
    throw DegenerateInputError("probe_smoothing: need at least 5 seeds");
  SemigroupProbeReport rep;
  rep.m = m;
  rep.k = k;
  rep.base_seed = base_seed;
  const auto shells = detail::probe_shells(P.grid());
  std::vector<double> envelope(tau_grid.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    const double shell = shells[s % shells.size()];
    SpectralVectorField phi = leray_project(SpectralVectorField(
        random_shell_field(P.grid(), (base_seed + s) * 3 + 0, shell),
        random_shell_field(P.grid(), (base_seed + s) * 3 + 1, shell),
        random_shell_field(P.grid(), (base_seed + s) * 3 + 2, shell)));
    const double nm = hs_norm(phi, m);
    if (nm < 1e-300) continue;
    phi *= 1.0 / nm;
    P.trajectory(phi, tau_grid,
                 [&](std::size_t i, const SpectralVectorField& nat, double t) {
                   const double r = pullback_hs_norm(nat, t, k);
                   envelope[i] = std::max(envelope[i], r);
                   rep.samples.push_back(ProbeSample{"Lss", m, k, tau_grid[i],
                                                     r, base_seed + s});
                 });
  }
  detail::fit_probe_branches(rep, tau_grid, envelope, small_branch_max,
                             large_branch_min);
  return rep;
}

// ---------------------------------------------------------------------------
// True generators with the radial cutoff on xi.grad, used by residual checks:
//   L_ss V = 1/2 (1 + xi.grad) V + Lap V - P(Ubar.grad V + V.grad Ubar)
//   L  th  = 1/2 (1 + xi.grad) th + Lap th - Ubar.grad th

inline SpectralVectorField apply_generator_Lss(const BackgroundProfile& bp,
                                               const CutoffCoordinates& xi,
                                               const SpectralVectorField& v) {
  SpectralVectorField out = v;
  out *= 0.5;
  out.axpy(0.5, radial_advect(xi, v));
  out += laplacian(v);
  out -= leray_project(advect(bp.U_bar, v) + advect(v, bp.U_bar));
  return out;
}

inline SpectralScalarField apply_generator_L(const BackgroundProfile& bp,
                                             const CutoffCoordinates& xi,
                                             const SpectralScalarField& th) {
  SpectralScalarField out = th;
  out *= 0.5;
  out.axpy(0.5, radial_advect(xi, th));
  out += laplacian(th);
  out -= advect(bp.U_bar, th);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear natural-coordinate stepper for the full system (manufactured
// solutions, scaling equivariance).

class NaturalBoussinesqStepper {
 public:
  using VectorForcing = std::function<SpectralVectorField(double)>;
  using ScalarForcing = std::function<SpectralScalarField(double)>;

  NaturalBoussinesqStepper(const PeriodicGrid& g, bool gravity_coupling = true)
      : grid_(g), gravity_(gravity_coupling) {
    if (gravity_)
      gradG_ = to_physical(gravity_kernel_gradient(g));
  }

  void set_forcing(VectorForcing f, ScalarForcing h) {
    f_ = std::move(f);
    h_ = std::move(h);
  }

  struct State {
    SpectralVectorField u;
    SpectralScalarField theta;
    double t = 0.0;
  };

  // Integrating-factor Heun: out = E (s + dt/2 k1) + dt/2 (E k1' ... ), i.e.
  // E s + dt/2 (E k1 + k2) with the predictor E (s + dt k1).
  State step(const State& s, double dt) const {
    const auto E = detail::diffusion_factors(grid_, dt);
    auto [ku1, kt1] = rhs(s.u, s.theta, s.t);
    State mid{s.u, s.theta, s.t + dt};
    mid.u.axpy(dt, ku1);
    mid.theta.axpy(dt, kt1);
    detail::scale_coeffs(mid.u, *E);
    detail::scale_coeffs(mid.theta, *E);
    auto [ku2, kt2] = rhs(mid.u, mid.theta, s.t + dt);
    State heun{s.u, s.theta, s.t + dt};
    heun.u.axpy(0.5 * dt, ku1);
    heun.theta.axpy(0.5 * dt, kt1);
    detail::scale_coeffs(heun.u, *E);
    detail::scale_coeffs(heun.theta, *E);
    heun.u.axpy(0.5 * dt, ku2);
    heun.theta.axpy(0.5 * dt, kt2);
    heun.u = leray_project(heun.u);
    return heun;
  }

  State evolve(State s, double t_end, double dt) const {
    const int steps = static_cast<int>(std::ceil((t_end - s.t) / dt - 1e-12));
    const double dts = (t_end - s.t) / steps;
    for (int i = 0; i < steps; ++i) s = step(s, dts);
    return s;
  }

 private:
  std::pair<SpectralVectorField, SpectralScalarField> rhs(
      const SpectralVectorField& u, const SpectralScalarField& theta,
      double t) const {
    PhysicalVector up = to_physical(u);
    SpectralVectorField nu = advect(up, u);
    nu *= -1.0;
    if (gravity_) {
      SpectralVectorField gg = gravity_gradient(theta, gradG_);
      nu += gg;
    }
    if (f_) nu += f_(t);
    nu = leray_project(nu);
    dealias_inplace(nu);
    SpectralScalarField nt = advect(up, theta);
    nt *= -1.0;
    if (h_) nt += h_(t);
    dealias_inplace(nt);
    return {std::move(nu), std::move(nt)};
  }

  PeriodicGrid grid_;
  bool gravity_;
  PhysicalVector gradG_;
  VectorForcing f_;
  ScalarForcing h_;
};

}  // namespace obss
