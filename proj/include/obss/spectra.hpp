// Matrix-free eigenvalue extraction for L_ss: Arnoldi iteration on the
// time-tau* propagator, with the dominant Ritz value mapped back through
// lambda = log(mu) / tau* on the principal branch (tau* <= 1 keeps moderate
// oscillation frequencies off the branch cut). Complex Ritz pairs are carried
// as their 2D real invariant subspace (rho_re, rho_im).
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>

#include "obss/synthetic.hpp"

namespace obss {

struct EigenEstimate {
  std::complex<double> lambda{0.0, 0.0};  // rate per unit tau
  double a() const { return lambda.real(); }
  SpectralVectorField rho_re;
  SpectralVectorField rho_im;  // zero unless complex_pair
  bool complex_pair = false;
  double residual = 1e300;     // ||P rho - mu rho||_L2 / ||rho||_L2 at tau_star
  double tau_star = 0.0;
  bool converged = false;
  int restarts_used = 0;
  std::vector<std::complex<double>> ritz_rates;  // log(mu)/tau* of all Ritz values
};

struct EigenSolveParams {
  double tau_star = 0.5;
  int krylov_dim = 16;
  double tol = 1e-8;            // iteration stops below this residual
  std::uint64_t seed = 1;
  int max_restarts = 3;
  double accept_residual = 0.05;  // converged flag threshold
  SobolevIndex N = 1.75;          // eigenfunction normalization norm

  void validate() const {
    if (!(tau_star >= 0.2 && tau_star <= 1.0))
      throw ConfigError("spectra.tau_star must lie in [0.2, 1]");
    if (krylov_dim < 8) throw ConfigError("spectra.krylov_dim must be >= 8");
    if (!(tol > 0)) throw ConfigError("spectra.tol must be positive");
  }
};

namespace detail {

struct RitzPair {
  std::complex<double> mu;
  Eigen::VectorXcd y;
};

// Dominant (largest |mu|) eigenpair of the square Hessenberg block.
inline RitzPair dominant_ritz(const Eigen::MatrixXd& H) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw NumericalError("Hessenberg eigen decomposition failed");
  int best = 0;
  for (int i = 1; i < H.rows(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best]))
      best = i;
  return RitzPair{es.eigenvalues()[best], es.eigenvectors().col(best)};
}

}  // namespace detail

// Residual of the candidate pair at an arbitrary horizon:
// ||e^{tau L} rho - e^{lambda tau} rho||_L2 / ||rho||_L2.
inline double eigen_residual(const EigenEstimate& est,
                             const VectorPropagator& P, double tau) {
  const std::complex<double> mu = std::exp(est.lambda * tau);
  SpectralVectorField pr = P.apply(est.rho_re, tau);
  pr.axpy(-mu.real(), est.rho_re);
  double num2, den2;
  if (est.complex_pair) {
    pr.axpy(mu.imag(), est.rho_im);
    SpectralVectorField pi = P.apply(est.rho_im, tau);
    pi.axpy(-mu.imag(), est.rho_re);
    pi.axpy(-mu.real(), est.rho_im);
    num2 = std::pow(pr.l2(), 2) + std::pow(pi.l2(), 2);
    den2 = std::pow(est.rho_re.l2(), 2) + std::pow(est.rho_im.l2(), 2);
  } else {
    num2 = std::pow(pr.l2(), 2);
    den2 = std::pow(est.rho_re.l2(), 2);
  }
  if (den2 < 1e-300) throw NumericalError("eigen_residual: zero eigenvector");
  return std::sqrt(num2 / den2);
}

inline EigenEstimate estimate_eigenpair(const VectorPropagator& P,
                                        const EigenSolveParams& prm) {
  prm.validate();
  const PeriodicGrid& g = P.grid();

  SpectralVectorField start = leray_project(random_vector_field(g, prm.seed));
  dealias_inplace(start);
  start[0][SpectralScalarField::index(g, 0, 0, 0)] = Complex(0, 0);
  start[1][SpectralScalarField::index(g, 0, 0, 0)] = Complex(0, 0);
  start[2][SpectralScalarField::index(g, 0, 0, 0)] = Complex(0, 0);
  if (start.l2() < 1e-300)
    throw NumericalError("estimate_eigenpair: zero start vector");

  EigenEstimate best;
  best.tau_star = prm.tau_star;

  for (int restart = 0; restart <= prm.max_restarts; ++restart) {
    const double nrm = start.l2();
    if (nrm < 1e-300)
      throw NumericalError("estimate_eigenpair: Krylov breakdown to zero");
    std::vector<SpectralVectorField> V;
    V.reserve(prm.krylov_dim + 1);
    {
      SpectralVectorField v0 = start;
      v0 *= 1.0 / nrm;
      V.push_back(std::move(v0));
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(prm.krylov_dim + 1,
                                              prm.krylov_dim);
    int m = prm.krylov_dim;
    for (int j = 0; j < prm.krylov_dim; ++j) {
      SpectralVectorField w = P.apply(V[j], prm.tau_star);
      for (int pass = 0; pass < 2; ++pass)  // MGS with one re-orthogonalization
        for (int i = 0; i <= j; ++i) {
          const double hij = l2_inner(w, V[i]);
          if (pass == 0)
            H(i, j) = hij;
          else
            H(i, j) += hij;
          w.axpy(-hij, V[i]);
        }
      const double beta = w.l2();
      H(j + 1, j) = beta;
      if (beta < 1e-12 * nrm) {  // happy breakdown: invariant subspace found
        m = j + 1;
        break;
      }
      w *= 1.0 / beta;
      V.push_back(std::move(w));
    }

    const auto ritz = detail::dominant_ritz(H.topLeftCorner(m, m));

    EigenEstimate est;
    est.tau_star = prm.tau_star;
    est.complex_pair = std::abs(ritz.mu.imag()) >
                       1e-10 * std::max(1.0, std::abs(ritz.mu.real()));
    est.lambda = std::log(ritz.mu) / prm.tau_star;
    est.rho_re = SpectralVectorField::zero(g);
    est.rho_im = SpectralVectorField::zero(g);
    for (int i = 0; i < m; ++i) {
      est.rho_re.axpy(ritz.y[i].real(), V[i]);
      if (est.complex_pair) est.rho_im.axpy(ritz.y[i].imag(), V[i]);
    }
    {
      const double hn =
          est.complex_pair
              ? std::sqrt(std::pow(hs_norm(est.rho_re, prm.N), 2) +
                          std::pow(hs_norm(est.rho_im, prm.N), 2))
              : hs_norm(est.rho_re, prm.N);
      if (hn < 1e-300)
        throw NumericalError("estimate_eigenpair: degenerate Ritz vector");
      est.rho_re *= 1.0 / hn;
      est.rho_im *= 1.0 / hn;
    }
    est.rho_re.divergence_free_flag = true;
    est.rho_im.divergence_free_flag = true;
    est.residual = eigen_residual(est, P, prm.tau_star);
    est.restarts_used = restart;
    {
      Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(m, m));
      for (int i = 0; i < m; ++i)
        if (std::abs(es.eigenvalues()[i]) > 1e-300)
          est.ritz_rates.push_back(std::log(es.eigenvalues()[i]) /
                                   prm.tau_star);
    }

    if (est.residual < best.residual) best = est;
    if (best.residual <= prm.tol) break;
    start = best.rho_re;  // restart from the current dominant direction
    if (best.complex_pair) start.axpy(0.3, best.rho_im);
  }

  best.converged = best.residual <= prm.accept_residual;
  return best;
}

// Convenience path from a background profile through the real stepper.
inline EigenEstimate estimate_eigenpair(const BackgroundProfile& bg,
                                        const StepperConfig& scfg,
                                        const EigenSolveParams& prm) {
  LinearizedVectorPropagator P(bg.U_bar, scfg);
  return estimate_eigenpair(P, prm);
}

// ---------------------------------------------------------------------------
// Amplitude sweep

struct SweepRecord {
  double amplitude = 0.0;
  std::optional<EigenEstimate> estimate;
  bool converged = false;
  bool usable = false;  // converged, a > 0, residual small: feeds the demo
  std::string error;
};

inline std::vector<SweepRecord> amplitude_sweep(
    const PeriodicGrid& g, VelocityShape shape, double support_radius,
    const std::vector<double>& amplitudes, StepperConfig scfg,
    EigenSolveParams prm) {
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > amplitudes[i - 1]))
      throw ConfigError("amplitude_sweep: amplitudes must increase");
  std::vector<SweepRecord> records;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    SweepRecord rec;
    rec.amplitude = amplitudes[i];
    try {
      SpectralVectorField U =
          make_background_velocity(g, amplitudes[i], support_radius, shape);
      // Keep the advective CFL satisfied as the amplitude grows.
      const double vmax = max_abs(to_physical(U));
      StepperConfig cfg = scfg;
      if (vmax > 0)
        cfg.dt = std::min(cfg.dt, 0.9 * cfg.cfl_safety * g.dx() / vmax);
      LinearizedVectorPropagator P(U, cfg);
      EigenSolveParams p = prm;
      p.seed = prm.seed + i;
      EigenEstimate est = estimate_eigenpair(P, p);
      rec.converged = est.converged;
      rec.usable = est.converged && est.a() > 0 &&
                   est.residual <= prm.accept_residual;
      rec.estimate = std::move(est);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace obss
