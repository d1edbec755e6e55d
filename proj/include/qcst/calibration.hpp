// Single-shot gate calibration from Husimi samples: beam splitter, rotation,
// displacement (CV and DV ancilla readouts), and the generator moments that
// set the Heisenberg limit of the beam-splitter angle.

#pragma once

#include "qcst/discrete.hpp"
#include "qcst/fock.hpp"
#include "qcst/gaussian.hpp"

#include <array>
#include <utility>

namespace qcst {

/// U(theta, phi); both angles live in [0, 2pi).
struct BeamSplitterParams {
  double theta = 0.0;
  double phi = 0.0;

  BeamSplitterParams() = default;
  BeamSplitterParams(double t, double p) : theta(wrap_angle(t)), phi(wrap_angle(p)) {}
};

/// Signed difference a - b mapped to (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::remainder(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

/// U(theta, phi)|alpha>|beta> = |alpha'>|beta'>.
inline std::pair<Complex, Complex> beam_splitter_output(Complex alpha, Complex beta, const BeamSplitterParams& bs) {
  const double c = std::cos(bs.theta / 2), s = std::sin(bs.theta / 2);
  return {alpha * c + kI * beta * s * std::polar(1.0, bs.phi), beta * c + kI * alpha * s * std::polar(1.0, -bs.phi)};
}

struct BeamSplitterEstimate {
  BeamSplitterParams params;
  double residual = 0.0;        // Im c, dropped by the projection
  bool phi_identifiable = true; // false when |s| is within 3 standard errors of 0
};

/// Closest (theta, phi) to the raw pair
/// c = (alpha' alpha^* + beta beta'^*)/E, s = i(alpha beta'^* - alpha' beta^*)/E,
/// E = |alpha|^2 + |beta|^2, via theta = 2 atan2(|s|, Re c), phi = arg s.
inline BeamSplitterEstimate calibrate_beam_splitter(Complex alpha, Complex beta, Complex alpha_hat, Complex beta_hat) {
  const double e = std::norm(alpha) + std::norm(beta);
  require(e > 0.0, "calibrate_beam_splitter: alpha and beta cannot both be zero");
  const Complex c = (alpha_hat * std::conj(alpha) + beta * std::conj(beta_hat)) / e;
  const Complex s = kI * (alpha * std::conj(beta_hat) - alpha_hat * std::conj(beta)) / e;
  BeamSplitterEstimate out;
  out.params = BeamSplitterParams(2.0 * std::atan2(std::abs(s), c.real()), std::arg(s));
  out.residual = c.imag();
  // Each HQS estimate carries unit complex variance, so s has standard error 1/sqrt(E).
  out.phi_identifiable = std::abs(s) >= 3.0 / std::sqrt(e);
  return out;
}

/// theta from R(theta)|alpha> = |e^{-i theta} alpha>.
inline double calibrate_rotation(Complex alpha, Complex alpha_hat) {
  require(alpha != Complex{}, "calibrate_rotation: alpha must be nonzero");
  return wrap_angle(-std::arg(alpha_hat / alpha));
}

/// One HQS readout of the coherent state |beta>: a draw from Q_beta.
inline Complex hqs_coherent_readout(Complex beta, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return beta + Complex{re, im};
}

struct HeisenbergMoments {
  double mean = 0.0;
  double variance = 0.0;
  double truncation_deficit = 0.0;  // per-mode coherent weight lost at the cutoff
  bool reliable = true;             // deficit < 1e-8
};

/// <H> and Var H for H = (e^{i phi} a^dag b + e^{-i phi} a b^dag)/2 on
/// |alpha>|alpha>, computed on a two-mode Fock space of dim x dim.
inline HeisenbergMoments heisenberg_moments(Complex alpha, double phi, std::size_t dim) {
  require(dim >= 2, "heisenberg_moments: dim must be >= 2");
  require(is_finite(alpha) && std::isfinite(phi), "heisenberg_moments: non-finite input");
  const FockState a = make_coherent(alpha, dim);
  HeisenbergMoments out;
  out.truncation_deficit = a.truncation_deficit();
  out.reliable = out.truncation_deficit < 1e-8;

  const auto d = static_cast<Eigen::Index>(dim);
  CVector psi(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) psi[i * d + j] = a.coeffs()[i] * a.coeffs()[j];
  // H|m, n> = (e^{i phi} sqrt((m+1) n) |m+1, n-1> + e^{-i phi} sqrt(m (n+1)) |m-1, n+1>)/2
  CVector h = CVector::Zero(d * d);
  const Complex up = 0.5 * std::polar(1.0, phi), down = 0.5 * std::polar(1.0, -phi);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = 0; n < d; ++n) {
      const Complex c = psi[m * d + n];
      if (m + 1 < d && n >= 1) h[(m + 1) * d + n - 1] += up * std::sqrt(double((m + 1) * n)) * c;
      if (m >= 1 && n + 1 < d) h[(m - 1) * d + n + 1] += down * std::sqrt(double(m * (n + 1))) * c;
    }
  out.mean = psi.dot(h).real();
  out.variance = std::max(0.0, h.squaredNorm() - out.mean * out.mean);
  return out;
}

/// CV-ancilla displacement readout: the two momenta are
/// p1 ~ N(-sqrt2 lambda Im alpha, 1/2), p2 ~ N(-sqrt2 lambda Re alpha, 1/2),
/// and alpha~ = -(p2 + i p1)/(sqrt2 lambda).
inline Complex displacement_cv_calibration(Complex alpha_true, double lambda, std::uint64_t seed) {
  require(lambda > 0.0 && std::isfinite(lambda), "displacement_cv_calibration: lambda must be > 0");
  require(is_finite(alpha_true), "displacement_cv_calibration: non-finite alpha");
  Rng rng(seed);
  const double k = std::sqrt(2.0) * lambda;
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double p1 = -k * alpha_true.imag() + n(rng);
  const double p2 = -k * alpha_true.real() + n(rng);
  return -(p2 + kI * p1) / k;
}

struct DvDisplacementEstimate {
  Complex alpha;
  bool wrapped = false;  // |2 lambda x| > pi for a quadrature: the readout aliases
};

namespace detail {

inline std::size_t draw_index(const std::vector<double>& pr, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(pr.begin(), pr.end());
  return dist(rng);
}

}  // namespace detail

/// DV-ancilla displacement readout. The controlled displacement kicks each
/// register by e^{2 i q_j x} (x = Im alpha, then Re alpha); an inverse QFT
/// turns that into a phase-estimation outcome j with
/// x^ = pi * wrapped_index(j) / (N lambda).
inline DvDisplacementEstimate displacement_dv_calibration(Complex alpha_true, const WindowRegister& w,
                                                          std::uint64_t seed) {
  validate_window(w);
  require(is_finite(alpha_true), "displacement_dv_calibration: non-finite alpha");
  Rng rng(seed);
  DvDisplacementEstimate out;
  std::array<double, 2> est{};
  const std::array<double, 2> xs{alpha_true.imag(), alpha_true.real()};
  for (std::size_t i = 0; i < 2; ++i) {
    const double phase = 2.0 * w.lambda * xs[i];
    if (std::abs(phase) > kPi) out.wrapped = true;
    const std::size_t j = detail::draw_index(window_phase_distribution(w, phase), rng);
    est[i] = kPi * static_cast<double>(w.wrapped_index(j)) / (static_cast<double>(w.n) * w.lambda);
  }
  out.alpha = Complex{est[1], est[0]};
  return out;
}

/// Monte Carlo summary of repeated single-shot calibrations.
struct CalibrationResult {
  std::vector<double> truth;                    // parameter record
  std::vector<std::vector<double>> estimates;   // one row per trial
  std::vector<double> rms_error;                // per parameter
  std::vector<std::string> flags;
  std::uint64_t seed = 0;
};

namespace detail {

/// Fills rms_error from per-trial errors err(trial, param).
inline void fill_rms(CalibrationResult& r, const std::vector<std::vector<double>>& err) {
  const std::size_t np = r.truth.size();
  r.rms_error.assign(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    std::vector<double> sq(err.size());
    for (std::size_t t = 0; t < err.size(); ++t) sq[t] = err[t][p] * err[t][p];
    r.rms_error[p] = err.empty() ? 0.0 : std::sqrt(pairwise_sum(sq) / static_cast<double>(err.size()));
  }
}

}  // namespace detail

/// Trials of beam-splitter calibration, one HQS readout per output mode each.
inline CalibrationResult beam_splitter_trials(Complex alpha, Complex beta, const BeamSplitterParams& truth,
                                              std::size_t trials, std::uint64_t seed) {
  CalibrationResult r;
  r.truth = {truth.theta, truth.phi};
  r.seed = seed;
  r.estimates.assign(trials, {});
  std::vector<std::vector<double>> err(trials);
  std::vector<char> unident(trials, 0);
  const auto [ao, bo] = beam_splitter_output(alpha, beta, truth);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(trial_seed(seed, t));
    const Complex ah = hqs_coherent_readout(ao, rng);
    const Complex bh = hqs_coherent_readout(bo, rng);
    const BeamSplitterEstimate e = calibrate_beam_splitter(alpha, beta, ah, bh);
    r.estimates[t] = {e.params.theta, e.params.phi};
    err[t] = {angle_difference(e.params.theta, truth.theta), angle_difference(e.params.phi, truth.phi)};
    unident[t] = e.phi_identifiable ? 0 : 1;
  });
  detail::fill_rms(r, err);
  const auto n_unident = std::count(unident.begin(), unident.end(), 1);
  if (n_unident > 0) r.flags.push_back("phi-unidentifiable:" + std::to_string(n_unident));
  return r;
}

inline CalibrationResult rotation_trials(Complex alpha, double theta, std::size_t trials, std::uint64_t seed) {
  require(alpha != Complex{}, "rotation_trials: alpha must be nonzero");
  CalibrationResult r;
  r.truth = {wrap_angle(theta)};
  r.seed = seed;
  r.estimates.assign(trials, {});
  std::vector<std::vector<double>> err(trials);
  const Complex out = alpha * std::polar(1.0, -theta);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(trial_seed(seed, t));
    const double th = calibrate_rotation(alpha, hqs_coherent_readout(out, rng));
    r.estimates[t] = {th};
    err[t] = {angle_difference(th, theta)};
  });
  detail::fill_rms(r, err);
  return r;
}

inline CalibrationResult displacement_cv_trials(Complex alpha, double lambda, std::size_t trials, std::uint64_t seed) {
  CalibrationResult r;
  r.truth = {alpha.real(), alpha.imag()};
  r.seed = seed;
  r.estimates.assign(trials, {});
  std::vector<std::vector<double>> err(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Complex a = displacement_cv_calibration(alpha, lambda, trial_seed(seed, t));
    r.estimates[t] = {a.real(), a.imag()};
    err[t] = {a.real() - alpha.real(), a.imag() - alpha.imag()};
  });
  detail::fill_rms(r, err);
  return r;
}

inline CalibrationResult displacement_dv_trials(Complex alpha, const WindowRegister& w, std::size_t trials,
                                                std::uint64_t seed) {
  CalibrationResult r;
  r.truth = {alpha.real(), alpha.imag()};
  r.seed = seed;
  r.estimates.assign(trials, {});
  std::vector<std::vector<double>> err(trials);
  bool wrapped = false;
  for (std::size_t t = 0; t < trials; ++t) {
    const DvDisplacementEstimate e = displacement_dv_calibration(alpha, w, trial_seed(seed, t));
    wrapped = wrapped || e.wrapped;
    r.estimates[t] = {e.alpha.real(), e.alpha.imag()};
    err[t] = {e.alpha.real() - alpha.real(), e.alpha.imag() - alpha.imag()};
  }
  detail::fill_rms(r, err);
  if (wrapped) r.flags.push_back("wrapped");
  return r;
}

}  // namespace qcst
