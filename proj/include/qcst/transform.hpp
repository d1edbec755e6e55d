// The coherent state transform: its closed-form momentum amplitude and a
// brute-force three-mode simulation of the six-gate circuit that realizes it
// (plus the squeezed-state generalization).

#pragma once

#include "qcst/fock.hpp"
#include "qcst/husimi.hpp"

namespace qcst {

/// Joint momentum density amplitude (1/(2 sqrt(pi))) <alpha|psi> with
/// alpha = (p1 + i p2)/2. Its squared modulus integrates to one over (p1, p2).
inline Complex qcst_analytic_amplitude(const FockState& psi, double p1, double p2) {
  return coherent_overlap(Complex{p1, p2} / 2.0, psi) / (2.0 * std::sqrt(kPi));
}

/// Same density amplitude with <alpha, r| = <alpha| S(r)^dag in place of <alpha|.
/// `squeezed_psi` must be S(r)^dag |psi> = S(-r)|psi>; see squeezed_dual().
inline Complex qgt_analytic_amplitude(const FockState& squeezed_psi, double p1, double p2) {
  return qcst_analytic_amplitude(squeezed_psi, p1, p2);
}

/// S(-r)|psi> on a cutoff wide enough for the analytic QGT amplitude.
inline FockState squeezed_dual(const FockState& psi, double r, std::size_t extra_levels = 96) {
  const FockState wide = psi.resized(psi.dim() + extra_levels);
  return FockState::from_coefficients(squeeze_apply(Complex{-r, 0.0}, wide.coeffs()));
}

/// One gate exp(i g A_ancilla B_target) of the transform circuit.
struct SumGateSpec {
  double g;
  std::size_t ancilla;  // 0 or 1; the target is always mode 2
  Quadrature ancilla_quad;
  Quadrature target_quad;
};

/// Gate list of the squeezed transform; r = 0 gives the coherent transform.
/// Gates 4 and 6 both couple p_ancilla0 with p_target: together with gate 5
/// they must generate the reset displacement exp(i(p1 p3 - p2 q3)/sqrt2).
inline std::vector<SumGateSpec> transform_gates(double r = 0.0) {
  const double s2 = std::sqrt(2.0);
  const double er = std::exp(r), emr = std::exp(-r);
  return {
      {er / s2, 0, Quadrature::q, Quadrature::q},
      {s2 * emr, 1, Quadrature::q, Quadrature::p},
      {er / s2, 0, Quadrature::q, Quadrature::q},
      {emr / (2 * s2), 0, Quadrature::p, Quadrature::p},
      {-er / s2, 1, Quadrature::p, Quadrature::q},
      {emr / (2 * s2), 0, Quadrature::p, Quadrature::p},
  };
}

struct QcstVerificationReport {
  std::vector<double> grid;          // p values; the check runs on grid x grid
  double max_amp_error = 0.0;        // after fixing one global phase
  double ancilla_reset_fidelity = 0.0;
  double squeeze_r = 0.0;
  std::size_t per_mode_dim = 0;
  bool reliable = true;              // false when the reset fidelity is below 0.9
};

/// Runs |0>|0>|psi> through `gates` on a three-mode cutoff and returns the
/// final state (modes 0, 1 are the ancillas, mode 2 carries psi).
inline MultiModeState run_transform_circuit(const FockState& psi, std::size_t d, const std::vector<SumGateSpec>& gates) {
  MultiModeState st = MultiModeState::product({FockState::vacuum(d), FockState::vacuum(d), psi.resized(d)});
  for (const auto& gs : gates) {
    const OperatorMatrix u = two_mode_sum_gate(gs.g, gs.ancilla_quad, gs.target_quad, d, d);
    st = apply_to_modes(u, st, {gs.ancilla, std::size_t{2}});
  }
  return st;
}

namespace detail {

inline QcstVerificationReport compare_transform(const MultiModeState& final_state, const FockState& reset_state,
                                                const FockState& overlap_state, std::span<const double> p_grid,
                                                std::size_t d, double r) {
  QcstVerificationReport rep;
  rep.grid.assign(p_grid.begin(), p_grid.end());
  rep.per_mode_dim = d;
  rep.squeeze_r = r;
  const Projection proj = project_mode(final_state, 2, reset_state);
  rep.ancilla_reset_fidelity = std::clamp(proj.weight, 0.0, 1.0);
  rep.reliable = rep.ancilla_reset_fidelity >= 0.9;

  const OperatorMatrix sim = joint_momentum_amplitude(proj.rest, p_grid);
  OperatorMatrix exact(sim.rows(), sim.cols());
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i)
    for (Eigen::Index j = 0; j < sim.cols(); ++j) {
      exact(i, j) = qcst_analytic_amplitude(overlap_state, p_grid[static_cast<std::size_t>(i)], p_grid[static_cast<std::size_t>(j)]);
      if (std::abs(exact(i, j)) > best) {
        best = std::abs(exact(i, j));
        bi = i;
        bj = j;
      }
    }
  const Complex gauge = std::abs(sim(bi, bj)) > 0.0 ? std::polar(1.0, std::arg(exact(bi, bj)) - std::arg(sim(bi, bj)))
                                                     : Complex{1.0};
  rep.max_amp_error = (sim * gauge - exact).cwiseAbs().maxCoeff();
  return rep;
}

inline void check_support(const FockState& psi, std::size_t d) {
  for (std::size_t n = d; n < psi.dim(); ++n)
    require(std::abs(psi[n]) < 1e-12, "circuit verification: psi has support above the per-mode cutoff");
}

}  // namespace detail

inline QcstVerificationReport qcst_circuit_verify(const FockState& psi, std::size_t per_mode_dim,
                                                  std::span<const double> p_grid) {
  require(per_mode_dim >= 8, "qcst_circuit_verify: per_mode_dim must be >= 8");
  require(!p_grid.empty(), "qcst_circuit_verify: empty momentum grid");
  detail::check_support(psi, per_mode_dim);
  const MultiModeState out = run_transform_circuit(psi, per_mode_dim, transform_gates(0.0));
  return detail::compare_transform(out, FockState::vacuum(per_mode_dim), psi.resized(per_mode_dim + 64), p_grid,
                                   per_mode_dim, 0.0);
}

inline QcstVerificationReport qgt_circuit_verify(const FockState& psi, double r, std::size_t per_mode_dim,
                                                 std::span<const double> p_grid) {
  require(std::abs(r) <= 0.7, "qgt_circuit_verify: |r| must be <= 0.7");
  require(per_mode_dim >= 16, "qgt_circuit_verify: per_mode_dim must be >= 16");
  require(!p_grid.empty(), "qgt_circuit_verify: empty momentum grid");
  detail::check_support(psi, per_mode_dim);
  const MultiModeState out = run_transform_circuit(psi, per_mode_dim, transform_gates(r));
  const FockState reset =
      FockState::from_coefficients(squeeze_apply(Complex{r, 0.0}, FockState::vacuum(per_mode_dim).coeffs()));
  return detail::compare_transform(out, reset, squeezed_dual(psi, r), p_grid, per_mode_dim, r);
}

}  // namespace qcst
