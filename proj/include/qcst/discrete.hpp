// DV-ancilla machinery: window registers, phase-estimation readout
// distributions, array-controlled displacements and the discrete transform
// amplitudes with their transfer error.

#pragma once

#include "qcst/fock.hpp"
#include "qcst/husimi.hpp"

#include <bit>

namespace qcst {

enum class WindowKind { unf, sin, custom };

inline std::string to_string(WindowKind k) {
  switch (k) {
    case WindowKind::unf: return "unf";
    case WindowKind::sin: return "sin";
    case WindowKind::custom: return "custom";
  }
  return "unknown";
}

inline WindowKind parse_window_kind(const std::string& s) {
  if (s == "unf") return WindowKind::unf;
  if (s == "sin") return WindowKind::sin;
  if (s == "custom") return WindowKind::custom;
  throw InvalidArgument("unknown window kind '" + s + "' (expected unf, sin or custom)");
}

/// N-level register prepared in sum_j c_j |j>, with position grid spacing lambda.
struct WindowRegister {
  std::size_t n = 0;
  double lambda = 0.0;
  CVector c;
  WindowKind kind = WindowKind::custom;

  /// q_j = (j - (N-1)/2) lambda.
  double position(std::size_t j) const { return (static_cast<double>(j) - 0.5 * (static_cast<double>(n) - 1.0)) * lambda; }

  /// ((j + N/2) mod N) - N/2: the index in circuit order mapped to [-N/2, N/2).
  long wrapped_index(std::size_t j) const {
    const long nn = static_cast<long>(n);
    return ((static_cast<long>(j) + nn / 2) % nn) - nn / 2;
  }

  /// p_j = pi/(N lambda) * wrapped_index(j).
  double momentum(std::size_t j) const { return kPi / (static_cast<double>(n) * lambda) * static_cast<double>(wrapped_index(j)); }
};

inline bool is_power_of_two(std::size_t n) { return n >= 1 && std::has_single_bit(n); }

inline void validate_window(const WindowRegister& w) {
  require(is_power_of_two(w.n) && w.n >= 2, "window: N must be a power of two >= 2");
  require(w.lambda > 0.0 && std::isfinite(w.lambda), "window: lambda must be > 0");
  require(static_cast<std::size_t>(w.c.size()) == w.n, "window: coefficient count must equal N");
  require(std::abs(w.c.squaredNorm() - 1.0) <= 1e-12, "window: coefficients must be normalized");
}

inline WindowRegister make_window(WindowKind kind, std::size_t n, double lambda, const CVector& custom = {}) {
  require(is_power_of_two(n) && n >= 2, "make_window: N must be a power of two >= 2");
  require(lambda > 0.0 && std::isfinite(lambda), "make_window: lambda must be > 0");
  WindowRegister w;
  w.n = n;
  w.lambda = lambda;
  w.kind = kind;
  const auto nn = static_cast<Eigen::Index>(n);
  switch (kind) {
    case WindowKind::unf:
      w.c = CVector::Constant(nn, 1.0 / std::sqrt(static_cast<double>(n)));
      break;
    case WindowKind::sin:
      w.c.resize(nn);
      for (Eigen::Index j = 0; j < nn; ++j)
        w.c[j] = std::sqrt(2.0 / double(n + 1)) * std::sin(double(j + 1) * kPi / double(n + 1));
      w.c /= w.c.norm();  // the closed form is normalized; this removes round-off
      break;
    case WindowKind::custom:
      require(custom.size() == nn, "make_window: custom window needs N coefficients");
      require(custom.norm() > 0.0, "make_window: custom window is zero");
      w.c = custom / custom.norm();
      break;
  }
  return w;
}

/// The vacuum wavefunction sampled on the register grid, c_j ~ exp(-q_j^2/2).
/// This is the window that lets the discrete transform reset the oscillator;
/// flat windows (unf, sin) do not approach the CV vacuum as N grows.
inline WindowRegister make_vacuum_window(std::size_t n, double lambda) {
  require(is_power_of_two(n) && n >= 2, "make_vacuum_window: N must be a power of two >= 2");
  require(lambda > 0.0 && std::isfinite(lambda), "make_vacuum_window: lambda must be > 0");
  CVector c(static_cast<Eigen::Index>(n));
  const double mid = 0.5 * (static_cast<double>(n) - 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double q = (static_cast<double>(j) - mid) * lambda;
    c[static_cast<Eigen::Index>(j)] = std::exp(-0.5 * q * q);
  }
  return make_window(WindowKind::custom, n, lambda, c);
}

namespace detail {

/// (1/N) |sum_j c_j e^{i j theta}|^2.
inline double window_kernel(const CVector& c, double theta) {
  Complex acc{};
  for (Eigen::Index j = 0; j < c.size(); ++j) acc += c[j] * std::polar(1.0, theta * static_cast<double>(j));
  return std::norm(acc) / static_cast<double>(c.size());
}

}  // namespace detail

/// (1/N) |sum_j c_j e^{-2 pi i j dp}|^2, a 1-periodic function of dp.
inline double window_spectrum(const WindowRegister& w, double dp) { return detail::window_kernel(w.c, -2.0 * kPi * dp); }

/// Readout of a phase kick e^{i phase j} on the register followed by the
/// inverse QFT: Pr(j) = (1/N)|sum_j' c_j' e^{i j'(phase - 2 pi j/N)}|^2.
inline std::vector<double> window_phase_distribution(const WindowRegister& w, double phase_per_index) {
  std::vector<double> pr(w.n);
  for (std::size_t j = 0; j < w.n; ++j)
    pr[j] = detail::window_kernel(w.c, phase_per_index - 2.0 * kPi * static_cast<double>(j) / static_cast<double>(w.n));
  return pr;
}

struct MomentumMeasurement {
  std::vector<double> probabilities;  // indexed by outcome j (circuit order)
  std::vector<double> estimates;      // p~_j = 2 pi wrapped_index(j) / (N lambda)
  double half_width = 0.0;            // quadrature range [-P, P]
  bool quadrature_truncated = false;  // |psi(+-P)|^2 > 1e-10
};

/// Outcome law of the ACD(N, -lambda) + inverse-QFT momentum readout:
/// Pr(j) = (1/N) int |sum_j' c_j' e^{-i j'(lambda p - 2 pi j/N)}|^2 |psi(p)|^2 dp.
inline MomentumMeasurement momentum_measure_distribution(const FockState& psi, const WindowRegister& w) {
  validate_window(w);
  MomentumMeasurement out;
  out.half_width = std::max(8.0, 4.0 * std::sqrt(2.0 * psi.mean_photon_number() + 1.0));
  const double step = 0.005;
  const std::vector<double> grid = uniform_grid(-out.half_width, out.half_width, step);
  const CVector amp = momentum_wavefunction(psi, grid);
  out.quadrature_truncated = std::norm(amp[0]) > 1e-10 || std::norm(amp[amp.size() - 1]) > 1e-10;

  const std::size_t n = w.n;
  out.probabilities.assign(n, 0.0);
  std::vector<std::vector<double>> per_j(n, std::vector<double>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double dens = std::norm(amp[static_cast<Eigen::Index>(g)]);
    const double h = (g == 0 || g + 1 == grid.size()) ? 0.5 * step : step;  // trapezoid
    for (std::size_t j = 0; j < n; ++j)
      per_j[j][g] = h * dens * detail::window_kernel(w.c, 2.0 * kPi * double(j) / double(n) - w.lambda * grid[g]);
  }
  for (std::size_t j = 0; j < n; ++j) out.probabilities[j] = pairwise_sum(per_j[j]);
  out.estimates.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    out.estimates[j] = 2.0 * kPi * static_cast<double>(w.wrapped_index(j)) / (static_cast<double>(n) * w.lambda);
  return out;
}

// ---------------------------------------------------------------------------
// Array-controlled displacements
// ---------------------------------------------------------------------------

/// Exponentials of one fixed truncated generator G = beta a^dag - beta^* a,
/// exp(t G) for any real t, from a single eigendecomposition. All returned
/// matrices commute exactly.
class DisplacementFamily {
 public:
  DisplacementFamily(Complex beta, std::size_t dim) {
    const OperatorMatrix a = annihilation(dim);
    const OperatorMatrix g = beta * a.adjoint() - std::conj(beta) * a;
    const OperatorMatrix h = (kI * g + (kI * g).adjoint()) / 2.0;  // G = -i h
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("DisplacementFamily: eigendecomposition failed");
    v_ = es.eigenvectors();
    eig_ = es.eigenvalues();
  }

  /// exp(t G) = D(t beta) on the truncated space.
  OperatorMatrix operator()(double t) const {
    CVector ph(eig_.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, -t * eig_[i]);
    return v_ * ph.asDiagonal() * v_.adjoint();
  }

 private:
  OperatorMatrix v_;
  RVector eig_;
};

/// Displacement multiplier of register level j: j - (N-1)/2, or the wrapped
/// index ((j + N/2) mod N) - N/2 for the starred ordering.
inline double acd_offset(std::size_t j, std::size_t n, bool starred) {
  if (starred) {
    const long nn = static_cast<long>(n);
    return static_cast<double>(((static_cast<long>(j) + nn / 2) % nn) - nn / 2);
  }
  return static_cast<double>(j) - 0.5 * (static_cast<double>(n) - 1.0);
}

/// sum_j |j><j| (x) D(step * offset(j)) on register (x) oscillator
/// (register index most significant).
inline OperatorMatrix acd_matrix(std::size_t n, Complex step, std::size_t osc_dim, bool starred = false) {
  require(is_power_of_two(n), "acd_matrix: N must be a power of two");
  require(osc_dim >= 2, "acd_matrix: oscillator dim must be >= 2");
  const auto d = static_cast<Eigen::Index>(osc_dim);
  OperatorMatrix u = OperatorMatrix::Zero(static_cast<Eigen::Index>(n) * d, static_cast<Eigen::Index>(n) * d);
  if (step == Complex{}) return OperatorMatrix::Identity(u.rows(), u.cols());
  const DisplacementFamily fam(step, osc_dim);
  for (std::size_t j = 0; j < n; ++j) {
    const auto o = static_cast<Eigen::Index>(j) * d;
    u.block(o, o, d, d) = fam(acd_offset(j, n, starred));
  }
  return u;
}

/// Builds ACD(N, step) from log2(N) qubit-conditioned displacements
/// D_c(beta) = exp(-sigma_z (beta a^dag - beta^* a)) with scales
/// 2^{k-1} step on the qubit of bit weight 2^k, and returns the largest
/// entrywise deviation from acd_matrix. sigma_z = +1 on |0>, so D_c(beta)
/// acts as D(-beta) on |0> and D(+beta) on |1>.
inline double acd_decompose_verify(std::size_t n, Complex step, std::size_t osc_dim) {
  require(is_power_of_two(n) && n >= 2, "acd_decompose_verify: N must be a power of two >= 2");
  const int qubits = std::countr_zero(n);
  const auto d = static_cast<Eigen::Index>(osc_dim);
  const auto dim = static_cast<Eigen::Index>(n) * d;
  const DisplacementFamily fam(step, osc_dim);
  OperatorMatrix prod = OperatorMatrix::Identity(dim, dim);
  for (int k = 0; k < qubits; ++k) {
    const double scale = std::ldexp(1.0, k - 1);
    const OperatorMatrix plus = fam(scale), minus = fam(-scale);
    OperatorMatrix cd = OperatorMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < n; ++j) {
      const auto o = static_cast<Eigen::Index>(j) * d;
      cd.block(o, o, d, d) = ((j >> k) & 1U) ? plus : minus;
    }
    prod = cd * prod;
  }
  return (prod - acd_matrix(n, step, osc_dim, false)).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Discrete transform
// ---------------------------------------------------------------------------

/// A(j, k) in circuit order (amps(j, k)); j, k index the two registers.
struct AmplitudeGrid {
  std::size_t n = 0;
  double lambda = 0.0;
  OperatorMatrix amps;

  double total_weight() const {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(amps.size()));
    for (Eigen::Index j = 0; j < amps.rows(); ++j)
      for (Eigen::Index k = 0; k < amps.cols(); ++k) w.push_back(std::norm(amps(j, k)));
    return pairwise_sum(w);
  }
};

inline constexpr std::size_t kMaxDiscreteCutoff = 64;

/// <0| D(c) |psi> = <-c|psi>.
inline Complex vacuum_displaced_overlap(Complex c, const FockState& psi) { return coherent_overlap(-c, psi); }

/// A(j,k) = (1/N) <0| sum_{j',k'} c_j' c_k' D(q_j' + i q_k') D(p_j + i p_k) |psi>,
/// evaluated with D(a)D(b) = e^{(a b^* - a^* b)/2} D(a + b) and the closed
/// form of <0|D(c)|n>; no oscillator truncation is involved.
inline AmplitudeGrid discrete_qcst_amplitudes(const FockState& psi, const WindowRegister& w) {
  validate_window(w);
  require(psi.dim() <= kMaxDiscreteCutoff, "discrete_qcst_amplitudes: Fock cutoff above 64 is not supported");
  const std::size_t n = w.n;
  AmplitudeGrid grid;
  grid.n = n;
  grid.lambda = w.lambda;
  grid.amps = OperatorMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<double> q(n), p(n);
  for (std::size_t j = 0; j < n; ++j) {
    q[j] = w.position(j);
    p[j] = w.momentum(j);
  }
  parallel_for(n, [&](std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex b{p[j], p[k]};
      Complex acc{};
      for (std::size_t jp = 0; jp < n; ++jp) {
        Complex row{};
        for (std::size_t kp = 0; kp < n; ++kp) {
          const Complex a{q[jp], q[kp]};
          const Complex phase = std::exp(0.5 * (a * std::conj(b) - std::conj(a) * b));
          row += w.c[static_cast<Eigen::Index>(kp)] * phase * vacuum_displaced_overlap(a + b, psi);
        }
        acc += w.c[static_cast<Eigen::Index>(jp)] * row;
      }
      grid.amps(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = acc / static_cast<double>(n);
    }
  });
  return grid;
}

/// Probability that the oscillator is not returned to vacuum: 1 - sum |A|^2.
/// Clamped to [0, 1]: deep in the exponential regime 1 - sum|A|^2 is round-off.
inline double discrete_qcst_error(const AmplitudeGrid& grid) { return std::clamp(1.0 - grid.total_weight(), 0.0, 1.0); }

inline double discrete_qcst_error(const FockState& psi, const WindowRegister& w) {
  return discrete_qcst_error(discrete_qcst_amplitudes(psi, w));
}

}  // namespace qcst
