// Husimi Q-function evaluation and sampling for Fock-expanded pure states.

#pragma once

#include "qcst/fock.hpp"
#include "qcst/gaussian.hpp"
#include "qcst/samples.hpp"

#include <variant>

namespace qcst {

namespace detail {

/// s(alpha) = sum_k conj(psi_k) alpha^k / sqrt(k!) by Horner's rule.
inline Complex husimi_polynomial(const CVector& psi, Complex alpha) {
  const Eigen::Index d = psi.size();
  Complex s = std::conj(psi[d - 1]);
  for (Eigen::Index k = d - 2; k >= 0; --k) s = std::conj(psi[k]) + s * (alpha / std::sqrt(static_cast<double>(k + 1)));
  return s;
}

}  // namespace detail

/// log Q(alpha) for a pure state; -inf where Q vanishes exactly.
inline double log_husimi_q_pure(const FockState& psi, Complex alpha) {
  const Complex s = detail::husimi_polynomial(psi.coeffs(), alpha);
  return -std::norm(alpha) + std::log(std::norm(s)) - std::log(kPi);
}

/// Q(alpha) = e^{-|alpha|^2} |sum_k psi_k^* alpha^k / sqrt(k!)|^2 / pi.
inline double husimi_q_pure(const FockState& psi, Complex alpha) {
  const Complex s = detail::husimi_polynomial(psi.coeffs(), alpha);
  const double n2 = std::norm(s);
  if (n2 == 0.0) return 0.0;
  return std::exp(-std::norm(alpha) + std::log(n2)) / kPi;
}

/// <alpha|psi> for the truncated state.
inline Complex coherent_overlap(Complex alpha, const FockState& psi) {
  return std::exp(-0.5 * std::norm(alpha)) * std::conj(detail::husimi_polynomial(psi.coeffs(), alpha));
}

/// A Husimi Q-function backed by either a Fock expansion or a Gaussian model.
class QFunction {
 public:
  explicit QFunction(FockState psi) : payload_(std::move(psi)) {}
  explicit QFunction(GaussianModel g) : payload_(std::move(g)) {}

  bool is_gaussian() const { return std::holds_alternative<GaussianModel>(payload_); }

  double operator()(Complex alpha) const {
    if (const auto* psi = std::get_if<FockState>(&payload_)) return husimi_q_pure(*psi, alpha);
    return gaussian_q_eval(std::get<GaussianModel>(payload_), alpha);
  }

 private:
  std::variant<FockState, GaussianModel> payload_;
};

/// Midpoint-rule integral of f over the square [-r, r]^2.
template <typename F>
double integrate_square(F&& f, double r, double step) {
  require(step > 0.0 && r > 0.0, "integrate_square: need r > 0 and step > 0");
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * r / step - 1e-9));
  const double h = 2.0 * r / static_cast<double>(n);
  std::vector<double> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -r + (static_cast<double>(i) + 0.5) * h;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += f(Complex{x, -r + (static_cast<double>(j) + 0.5) * h});
    rows[i] = acc;
  }
  return pairwise_sum(rows) * h * h;
}

struct HusimiSamplingResult {
  PhaseSampleSet samples;
  double half_width = 0.0;       // R of the proposal square [-R, R]^2
  double acceptance_rate = 0.0;
  double leaked_mass = 0.0;      // 1 - integral of Q over the square (quadrature)
};

/// Half-width of the rejection square for a state with the given <n>.
inline double rejection_half_width(double mean_photons) { return std::sqrt(2.0 * mean_photons + 1.0) + 4.0; }

/// Draws M samples with density Q by rejection from the uniform square
/// [-R, R]^2, accepting with probability pi Q(alpha) <= 1.
inline HusimiSamplingResult sample_husimi(const FockState& psi, std::size_t m, std::uint64_t seed) {
  HusimiSamplingResult res;
  res.samples.seed = seed;
  res.samples.source = SampleSource::rejection;
  res.half_width = rejection_half_width(psi.mean_photon_number());
  const double r = res.half_width;
  res.leaked_mass = std::max(0.0, 1.0 - integrate_square([&](Complex a) { return husimi_q_pure(psi, a); }, r, 0.05));
  if (m == 0) return res;

  Rng rng(seed);
  std::uniform_real_distribution<double> coord(-r, r);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  res.samples.samples.reserve(m);
  std::size_t proposals = 0;
  while (res.samples.size() < m) {
    const Complex a{coord(rng), coord(rng)};
    ++proposals;
    if (unit(rng) < kPi * husimi_q_pure(psi, a)) res.samples.samples.push_back(a);
    if (proposals == 100000 && static_cast<double>(res.samples.size()) / proposals < 1e-4)
      throw NumericalError("sample_husimi: acceptance rate below 1e-4; shrink the state support or increase the cutoff "
                           "so that <n> reflects the state, giving a tighter square");
  }
  res.acceptance_rate = static_cast<double>(m) / static_cast<double>(proposals);
  return res;
}

}  // namespace qcst
