// Independent oracles and generators shared by the test binaries. Nothing
// here calls the closed forms it is used to check.

#pragma once

#include "qcst/qcst.hpp"

#include <functional>

namespace qcst::testing {

/// Random normalized state with support on the first `support` levels of `dim`.
inline FockState random_state(Rng& rng, std::size_t dim, std::size_t support) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector c = CVector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < support; ++k) {
    const double re = n(rng);
    const double im = n(rng);
    c[static_cast<Eigen::Index>(k)] = Complex{re, im};
  }
  return FockState::from_coefficients(c);
}

inline Complex random_complex_in_disk(Rng& rng, double radius) { return radius * random_unit_disk(rng); }

inline FockState fig3_state(std::size_t dim = 5) {
  CVector c = CVector::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(dim, 5)));
  c[0] = 0.5;
  c[4] = 0.5;
  c[2] = Complex{0.0, 1.0 / std::sqrt(2.0)};
  return FockState::from_coefficients(c);
}

/// Dense product-of-displacements oracle for the discrete transform:
/// A(j,k) = (1/N) sum_{j',k'} c_j' c_k' <0| D(a_j'k') D(b_jk) |psi> with every
/// displacement an explicit matrix exponential on `osc_dim` levels.
inline OperatorMatrix discrete_fock_oracle(const FockState& psi, const WindowRegister& w, std::size_t osc_dim) {
  const std::size_t n = w.n;
  const auto d = static_cast<Eigen::Index>(osc_dim);
  const CVector p0 = psi.resized(osc_dim).coeffs();
  CVector vac = CVector::Zero(d);
  vac[0] = 1.0;
  // bra_jk = <0| sum c c D(a), ket_jk = D(b_jk)|psi>
  CVector bra = CVector::Zero(d);
  for (std::size_t jp = 0; jp < n; ++jp)
    for (std::size_t kp = 0; kp < n; ++kp) {
      const OperatorMatrix da = displacement_matrix({w.position(jp), w.position(kp)}, osc_dim);
      bra += w.c[static_cast<Eigen::Index>(jp)] * w.c[static_cast<Eigen::Index>(kp)] * (da.adjoint() * vac);
    }
  OperatorMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const CVector ket = displacement_matrix({w.momentum(j), w.momentum(k)}, osc_dim) * p0;
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = bra.dot(ket) / static_cast<double>(n);
    }
  return out;
}

/// Full register + register + oscillator simulation of the DV-ancilla
/// transform: ACD(i lambda/2), ACD(-lambda), ACD(i lambda/2), a QFT on each
/// register, then the starred ACDs with steps +pi/(2 N lambda) and
/// +i pi/(N lambda). Returns the register amplitudes after projecting the
/// oscillator onto vacuum, as an N x N matrix.
inline OperatorMatrix discrete_circuit_oracle(const FockState& psi, const WindowRegister& w, std::size_t osc_dim) {
  const std::size_t n = w.n;
  const double lam = w.lambda;
  const FockState reg = FockState::from_coefficients(w.c);
  MultiModeState st = MultiModeState::product({reg, reg, psi.resized(osc_dim)});
  const OperatorMatrix a1 = acd_matrix(n, Complex{0.0, lam / 2}, osc_dim);
  const OperatorMatrix b1 = acd_matrix(n, Complex{-lam, 0.0}, osc_dim);
  st = apply_to_modes(a1, st, {0, 2});
  st = apply_to_modes(b1, st, {1, 2});
  st = apply_to_modes(a1, st, {0, 2});
  OperatorMatrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          std::polar(1.0 / std::sqrt(double(n)), 2.0 * kPi * double(a * b) / double(n));
  st = apply_to_modes(f, st, {0});
  st = apply_to_modes(f, st, {1});
  const OperatorMatrix a2 = acd_matrix(n, Complex{kPi / (2.0 * double(n) * lam), 0.0}, osc_dim, true);
  const OperatorMatrix b2 = acd_matrix(n, Complex{0.0, kPi / (double(n) * lam)}, osc_dim, true);
  st = apply_to_modes(a2, st, {0, 2});
  st = apply_to_modes(b2, st, {1, 2});
  st = apply_to_modes(a2, st, {0, 2});
  const Projection pr = project_mode(st, 2, FockState::vacuum(osc_dim));
  OperatorMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = pr.rest.coeffs()[static_cast<Eigen::Index>(j * n + k)];
  return out;
}

/// Momentum wavefunction by direct numerical Fourier transform of the
/// position wavefunction: psi(p) = (2 pi)^{-1/2} int e^{-i p q} psi(q) dq.
inline Complex momentum_by_fourier(const FockState& psi, double p, double half_width = 12.0, double step = 0.005) {
  const std::vector<double> q = uniform_grid(-half_width, half_width, step);
  const CVector pos = position_wavefunction(psi, q);
  Complex acc{};
  for (std::size_t i = 0; i < q.size(); ++i) acc += std::polar(1.0, -p * q[i]) * pos[static_cast<Eigen::Index>(i)];
  return acc * step / std::sqrt(2.0 * kPi);
}

/// Central-difference gradient of f on C^n, with the same real inner
/// product convention as the analytic gradient (d/d re + i d/d im).
inline CVector numeric_gradient(const std::function<double(const CVector&)>& f, const CVector& x, double h = 1e-6) {
  CVector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    CVector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const double dre = (f(xp) - f(xm)) / (2 * h);
    xp = x;
    xm = x;
    xp[k] += Complex{0.0, h};
    xm[k] -= Complex{0.0, h};
    const double dim = (f(xp) - f(xm)) / (2 * h);
    g[k] = Complex{dre, dim};
  }
  return g;
}

/// Two-mode (H, H^2) moments from dense matrices a (x) 1 and 1 (x) b.
inline std::pair<double, double> heisenberg_dense(Complex alpha, double phi, std::size_t dim) {
  const OperatorMatrix a = annihilation(dim);
  const OperatorMatrix id = OperatorMatrix::Identity(a.rows(), a.cols());
  const OperatorMatrix A = Eigen::kroneckerProduct(a, id).eval();
  const OperatorMatrix B = Eigen::kroneckerProduct(id, a).eval();
  const OperatorMatrix h = 0.5 * (std::polar(1.0, phi) * A.adjoint() * B + std::polar(1.0, -phi) * A * B.adjoint());
  const CVector c = make_coherent(alpha, dim).coeffs();
  const CVector psi = Eigen::kroneckerProduct(c, c).eval();
  const double m1 = psi.dot(h * psi).real();
  const double m2 = psi.dot(h * (h * psi)).real();
  return {m1, m2};
}

}  // namespace qcst::testing
