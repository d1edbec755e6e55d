// Q-function tomography: maximum-likelihood reconstruction of a pure state
// from Husimi samples, the Padua-point pointwise baseline, and the L1
// distance between Q-functions.

#pragma once

#include "qcst/fock.hpp"
#include "qcst/husimi.hpp"
#include "qcst/samples.hpp"

#include <functional>
#include <optional>

namespace qcst {

struct MleConfig {
  std::size_t gamma = 32;       // Fock cutoff of the ansatz
  std::size_t max_iters = 500;
  double grad_tol = 1e-7;       // on the norm of the projected gradient
  std::size_t restarts = 8;     // random starts, plus one start from the sample mean
  std::uint64_t seed = 0;
};

struct ReconstructionReport {
  FockState psi_hat;
  double neg_log_likelihood = 0.0;
  std::optional<double> l1_error;
  std::optional<double> fidelity;
  std::size_t iterations = 0;        // of the winning run
  std::size_t floored_events = 0;    // likelihood terms clamped at Q = 1e-300, all runs
  bool degenerate = false;           // every sample at one point
  std::vector<std::string> warnings;
  std::vector<double> history;       // objective per iteration of the winning run
};

/// -(1/M) sum_j log Q(alpha_j; psi) and its gradient for a fixed sample set.
/// With v_jk = alpha_j^k / sqrt(k!) and s_j = sum_k psi_k^* v_jk,
/// Q_j = e^{-|alpha_j|^2} |s_j|^2 / pi and the gradient with respect to psi
/// (real inner product on C^Gamma) is -(2/M) sum_j v_j / s_j.
class MleObjective {
 public:
  static constexpr double kFloor = 1e-300;

  MleObjective(const PhaseSampleSet& samples, std::size_t gamma) {
    require(gamma >= 1, "MleObjective: gamma must be >= 1");
    require(!samples.empty(), "MleObjective: empty sample set");
    samples.validate();
    const auto m = static_cast<Eigen::Index>(samples.size());
    const auto g = static_cast<Eigen::Index>(gamma);
    v_.resize(m, g);
    base_.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex a = samples.samples[static_cast<std::size_t>(j)];
      Complex t{1.0, 0.0};
      for (Eigen::Index k = 0; k < g; ++k) {
        v_(j, k) = t;
        t *= a / std::sqrt(static_cast<double>(k + 1));
      }
      base_[j] = -std::norm(a) - std::log(kPi);
    }
  }

  std::size_t gamma() const { return static_cast<std::size_t>(v_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(v_.rows()); }

  /// Objective value; `floored` counts terms clamped at the likelihood floor.
  double value(const CVector& psi, std::size_t* floored = nullptr) const {
    const CVector s = v_ * psi.conjugate();
    return evaluate(s, floored);
  }

  double value_and_gradient(const CVector& psi, CVector& grad, std::size_t* floored = nullptr) const {
    const CVector s = v_ * psi.conjugate();
    CVector w(s.size());
    const double log_floor = std::log(kFloor);
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      const bool low = base_[j] + std::log(std::norm(s[j])) < log_floor;
      w[j] = low ? Complex{} : 1.0 / s[j];
    }
    grad = -(2.0 / static_cast<double>(s.size())) * (v_.transpose() * w);
    return evaluate(s, floored);
  }

 private:
  double evaluate(const CVector& s, std::size_t* floored) const {
    const double log_floor = std::log(kFloor);
    std::vector<double> terms(static_cast<std::size_t>(s.size()));
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      double lq = base_[j] + std::log(std::norm(s[j]));
      if (!(lq >= log_floor)) {
        lq = log_floor;
        if (floored) ++*floored;
      }
      terms[static_cast<std::size_t>(j)] = lq;
    }
    return -pairwise_sum(terms) / static_cast<double>(s.size());
  }

  OperatorMatrix v_;
  RVector base_;
};

/// Multiplies psi by a phase so that its largest-modulus entry is real and >= 0.
inline CVector fix_gauge(const CVector& psi) {
  Eigen::Index best = 0;
  psi.cwiseAbs().maxCoeff(&best);
  const double ph = std::arg(psi[best]);
  return psi * std::polar(1.0, -ph);
}

namespace detail {

struct MleRun {
  CVector psi;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t floored = 0;
  std::vector<double> history;
};

/// Projected gradient descent on the unit sphere with Armijo backtracking.
/// Every accepted step lowers the objective, so the history is non-increasing.
inline MleRun mle_descend(const MleObjective& obj, CVector psi, const MleConfig& cfg) {
  MleRun run;
  psi.normalize();
  CVector grad;
  double f = obj.value_and_gradient(psi, grad, &run.floored);
  run.history.push_back(f);
  double step = 1.0;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const CVector rg = grad - psi * psi.dot(grad).real();  // tangent component
    const double gn2 = rg.squaredNorm();
    if (std::sqrt(gn2) < cfg.grad_tol) break;
    bool accepted = false;
    step = std::min(step * 2.0, 1e3);
    for (int bt = 0; bt < 60; ++bt) {
      const CVector cand = (psi - step * rg).normalized();
      const double fc = obj.value(cand);
      if (fc <= f - 1e-4 * step * gn2) {
        psi = cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    f = obj.value_and_gradient(psi, grad, &run.floored);
    run.history.push_back(f);
    run.iterations = it + 1;
  }
  run.psi = psi;
  run.value = f;
  return run;
}

}  // namespace detail

/// Pure-state maximum-likelihood fit of the Husimi samples: `restarts`
/// random starts plus a coherent start at the sample mean; the lowest
/// objective wins and is returned gauge-fixed.
inline ReconstructionReport mle_fit(const PhaseSampleSet& samples, const MleConfig& cfg) {
  require(!samples.empty(), "mle_fit: empty sample set");
  require(cfg.gamma >= 1, "mle_fit: gamma must be >= 1");
  const MleObjective obj(samples, cfg.gamma);
  ReconstructionReport rep;
  if (samples.size() < cfg.gamma)
    rep.warnings.push_back("fewer samples (" + std::to_string(samples.size()) + ") than the Fock cutoff (" +
                           std::to_string(cfg.gamma) + ")");
  rep.degenerate = std::all_of(samples.samples.begin(), samples.samples.end(),
                               [&](Complex z) { return z == samples.samples.front(); });
  if (rep.degenerate) rep.warnings.push_back("degenerate sample set: all samples coincide");

  Complex mean{};
  for (Complex z : samples.samples) mean += z;
  mean /= static_cast<double>(samples.size());

  const std::size_t runs = cfg.restarts + 1;
  std::vector<detail::MleRun> results(runs);
  parallel_for(runs, [&](std::size_t r) {
    CVector start;
    if (r == 0) {
      start = make_coherent(mean, cfg.gamma).coeffs();
    } else {
      Rng rng(trial_seed(cfg.seed, r));
      std::normal_distribution<double> n(0.0, 1.0);
      start.resize(static_cast<Eigen::Index>(cfg.gamma));
      for (Eigen::Index k = 0; k < start.size(); ++k) {
        const double re = n(rng);
        const double im = n(rng);
        start[k] = Complex{re, im};
      }
    }
    results[r] = detail::mle_descend(obj, start, cfg);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs; ++r)
    if (results[r].value < results[best].value) best = r;
  for (const auto& r : results) rep.floored_events += r.floored;
  rep.psi_hat = FockState::from_coefficients(fix_gauge(results[best].psi));
  rep.neg_log_likelihood = results[best].value;
  rep.iterations = results[best].iterations;
  rep.history = std::move(results[best].history);
  return rep;
}

// ---------------------------------------------------------------------------
// Padua baseline
// ---------------------------------------------------------------------------

struct PaduaGrid {
  std::size_t degree = 0;
  double half_width = 1.0;     // R of [-R, R]^2
  std::vector<Complex> points; // scaled
  std::vector<double> weights; // cubature weights on [-1, 1]^2
};

/// Padua points of degree n: (cos((j-1)pi/n), cos((k-1)pi/(n+1))) with
/// 1 <= j <= n+1, 1 <= k <= n+2, j + k even, scaled to [-R, R]^2.
inline PaduaGrid padua_points(std::size_t n, double r) {
  require(n >= 1, "padua_points: degree must be >= 1");
  require(r > 0.0 && std::isfinite(r), "padua_points: R must be > 0");
  PaduaGrid g;
  g.degree = n;
  g.half_width = r;
  const double base = 1.0 / (static_cast<double>(n) * static_cast<double>(n + 1));
  for (std::size_t j = 1; j <= n + 1; ++j)
    for (std::size_t k = 1; k <= n + 2; ++k) {
      if ((j + k) % 2 != 0) continue;
      const double x = std::cos(static_cast<double>(j - 1) * kPi / static_cast<double>(n));
      const double y = std::cos(static_cast<double>(k - 1) * kPi / static_cast<double>(n + 1));
      g.points.emplace_back(r * x, r * y);
      const int edges = (j == 1 || j == n + 1 ? 1 : 0) + (k == 1 || k == n + 2 ? 1 : 0);
      g.weights.push_back(base * (edges == 2 ? 0.5 : edges == 1 ? 1.0 : 2.0));
    }
  return g;
}

namespace detail {

/// Normalized Chebyshev values: T^_0 = 1, T^_j = sqrt2 T_j, for j = 0..n.
inline std::vector<double> chebyshev_normalized(double x, std::size_t n) {
  std::vector<double> t(n + 1);
  t[0] = 1.0;
  if (n >= 1) t[1] = x;
  for (std::size_t j = 2; j <= n; ++j) t[j] = 2.0 * x * t[j - 1] - t[j - 2];
  for (std::size_t j = 1; j <= n; ++j) t[j] *= std::sqrt(2.0);
  return t;
}

}  // namespace detail

/// The degree-n Padua interpolant, held as coefficients c_ij (i + j <= n) of
/// T^_i(x) T^_j(y).
class PaduaInterpolant {
 public:
  PaduaInterpolant(const PaduaGrid& grid, const std::vector<double>& values) : n_(grid.degree), r_(grid.half_width) {
    require(values.size() == grid.points.size(), "padua_interpolate: value count does not match the grid");
    coef_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_ + 1), static_cast<Eigen::Index>(n_ + 1));
    for (std::size_t p = 0; p < values.size(); ++p) {
      const auto tx = detail::chebyshev_normalized(grid.points[p].real() / r_, n_);
      const auto ty = detail::chebyshev_normalized(grid.points[p].imag() / r_, n_);
      const double wf = grid.weights[p] * values[p];
      for (std::size_t i = 0; i <= n_; ++i)
        for (std::size_t j = 0; i + j <= n_; ++j)
          coef_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += wf * tx[i] * ty[j];
    }
    // The cubature is not exact for T^_n(x)^2, whose discrete norm is 2: halve that term.
    coef_(static_cast<Eigen::Index>(n_), 0) *= 0.5;
  }

  double operator()(Complex alpha) const {
    const auto tx = detail::chebyshev_normalized(alpha.real() / r_, n_);
    const auto ty = detail::chebyshev_normalized(alpha.imag() / r_, n_);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n_; ++i)
      for (std::size_t j = 0; i + j <= n_; ++j)
        acc += coef_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * tx[i] * ty[j];
    return acc;
  }

 private:
  std::size_t n_;
  double r_;
  Eigen::MatrixXd coef_;
};

inline PaduaInterpolant padua_interpolate(const PaduaGrid& grid, const std::vector<double>& values) {
  return PaduaInterpolant(grid, values);
}

/// Shot-limited Q estimates: Binomial(shots, |<alpha|psi>|^2)/shots/pi per point.
inline std::vector<double> pointwise_estimate(const FockState& psi, const PaduaGrid& grid, std::size_t shots,
                                              std::uint64_t seed) {
  require(shots >= 1, "pointwise_estimate: shots must be >= 1");
  Rng rng(seed);
  std::vector<double> out(grid.points.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double prob = std::clamp(kPi * husimi_q_pure(psi, grid.points[p]), 0.0, 1.0);
    std::binomial_distribution<std::size_t> b(shots, prob);
    out[p] = static_cast<double>(b(rng)) / static_cast<double>(shots) / kPi;
  }
  return out;
}

/// Midpoint-rule integral of |Q - max(Q~, 0)| over [-R, R]^2.
template <typename F, typename G>
double q_l1_distance(F&& q_true, G&& q_hat, double r, double step) {
  return integrate_square([&](Complex a) { return std::abs(q_true(a) - std::max(q_hat(a), 0.0)); }, r, step);
}

/// Fills l1_error and fidelity of a report against a known truth.
inline void score_reconstruction(ReconstructionReport& rep, const FockState& truth, double r = 5.0,
                                 double step = 0.05) {
  const FockState& hat = rep.psi_hat;
  rep.l1_error = q_l1_distance([&](Complex a) { return husimi_q_pure(truth, a); },
                               [&](Complex a) { return husimi_q_pure(hat, a); }, r, step);
  rep.fidelity = std::clamp(fidelity(hat, truth), 0.0, 1.0);
}

}  // namespace qcst
