// Truncated Fock-space linear algebra. Everything analytic elsewhere in the
// library is cross-checked against the dense objects built here.
//
// Conventions: a = (q + i p)/sqrt(2), D(alpha) = exp(alpha a^dag - alpha^* a),
// S(xi) = exp((xi^* a^2 - xi a^dag^2)/2). Multi-mode tensors are row-major
// with mode 0 the most significant index.

#pragma once

#include "qcst/common.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>

namespace qcst {

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Normalized pure state on a truncated number basis.
class FockState {
 public:
  /// Normalizes `coeffs`; rejects empty or all-zero input.
  static FockState from_coefficients(CVector coeffs) {
    require(coeffs.size() >= 1, "FockState: dim must be >= 1");
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      require(is_finite(coeffs[i]), "FockState: non-finite coefficient");
    const double norm = coeffs.norm();
    require(norm > 0.0, "FockState: zero vector cannot be normalized");
    FockState s;
    s.coeffs_ = coeffs / norm;
    return s;
  }

  static FockState from_coefficients(std::initializer_list<Complex> c) {
    CVector v(static_cast<Eigen::Index>(c.size()));
    Eigen::Index i = 0;
    for (Complex z : c) v[i++] = z;
    return from_coefficients(std::move(v));
  }

  /// |n>_F in dimension `dim`.
  static FockState number(std::size_t n, std::size_t dim) {
    require(n < dim, "FockState::number: level outside truncation");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(n)] = 1.0;
    return from_coefficients(std::move(v));
  }

  static FockState vacuum(std::size_t dim) { return number(0, dim); }

  std::size_t dim() const { return static_cast<std::size_t>(coeffs_.size()); }
  const CVector& coeffs() const { return coeffs_; }
  Complex operator[](std::size_t n) const { return coeffs_[static_cast<Eigen::Index>(n)]; }

  /// Probability mass the untruncated state had beyond the cutoff, when known.
  double truncation_deficit() const { return deficit_; }

  double mean_photon_number() const {
    double m = 0.0;
    for (Eigen::Index n = 0; n < coeffs_.size(); ++n) m += static_cast<double>(n) * std::norm(coeffs_[n]);
    return m;
  }

  /// Copy zero-padded (or cut and renormalized) to `dim` levels.
  FockState resized(std::size_t dim) const {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    const auto k = static_cast<Eigen::Index>(std::min(dim, this->dim()));
    v.head(k) = coeffs_.head(k);
    return from_coefficients(std::move(v));
  }

  FockState with_global_phase(double phi) const {
    FockState s = *this;
    s.coeffs_ *= std::polar(1.0, phi);
    return s;
  }

 private:
  friend FockState make_coherent(Complex, std::size_t);
  CVector coeffs_;
  double deficit_ = 0.0;
};

inline Complex inner(const FockState& a, const FockState& b) {
  require(a.dim() == b.dim(), "inner: dimension mismatch");
  return a.coeffs().dot(b.coeffs());  // Eigen's dot conjugates the left argument
}

inline double fidelity(const FockState& a, const FockState& b) {
  const std::size_t d = std::max(a.dim(), b.dim());
  return std::norm(inner(a.resized(d), b.resized(d)));
}

/// Truncated coherent state, c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized.
inline FockState make_coherent(Complex alpha, std::size_t dim) {
  require(dim >= 1, "make_coherent: dim must be >= 1");
  require(is_finite(alpha), "make_coherent: alpha must be finite");
  CVector v(static_cast<Eigen::Index>(dim));
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < dim; ++n) {
    v[static_cast<Eigen::Index>(n)] = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  const double kept = v.squaredNorm();
  FockState s = FockState::from_coefficients(std::move(v));
  s.deficit_ = std::max(0.0, 1.0 - kept);
  return s;
}

/// True when |alpha|^2 stays inside the dim/4 comfort zone of the cutoff.
inline bool coherent_within_envelope(Complex alpha, std::size_t dim) {
  return std::norm(alpha) <= static_cast<double>(dim) / 4.0;
}

/// Pure state on several truncated modes.
class MultiModeState {
 public:
  /// Normalizing constructor.
  static MultiModeState normalized(std::vector<std::size_t> dims, CVector coeffs) {
    MultiModeState s = unnormalized(std::move(dims), std::move(coeffs));
    const double norm = s.coeffs_.norm();
    require(norm > 0.0, "MultiModeState: zero vector cannot be normalized");
    s.coeffs_ /= norm;
    return s;
  }

  /// Keeps the coefficients as given (projections return these).
  static MultiModeState unnormalized(std::vector<std::size_t> dims, CVector coeffs) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
      require(d >= 1, "MultiModeState: mode dimension must be >= 1");
      total *= d;
    }
    require(static_cast<std::size_t>(coeffs.size()) == total,
            "MultiModeState: coefficient count does not match product of mode dims");
    MultiModeState s;
    s.dims_ = std::move(dims);
    s.coeffs_ = std::move(coeffs);
    return s;
  }

  /// Tensor product of single-mode states, in the given mode order.
  static MultiModeState product(std::span<const FockState> modes) {
    std::vector<std::size_t> dims;
    CVector v = CVector::Ones(1);
    for (const auto& m : modes) {
      dims.push_back(m.dim());
      CVector next(v.size() * m.coeffs().size());
      for (Eigen::Index i = 0; i < v.size(); ++i)
        next.segment(i * m.coeffs().size(), m.coeffs().size()) = v[i] * m.coeffs();
      v = std::move(next);
    }
    return normalized(std::move(dims), std::move(v));
  }

  static MultiModeState product(std::initializer_list<FockState> modes) {
    std::vector<FockState> v(modes);
    return product(std::span<const FockState>(v));
  }

  const std::vector<std::size_t>& mode_dims() const { return dims_; }
  std::size_t num_modes() const { return dims_.size(); }
  const CVector& coeffs() const { return coeffs_; }
  double norm() const { return coeffs_.norm(); }

  /// Stride of `mode` in the flattened coefficient vector.
  std::size_t stride(std::size_t mode) const {
    std::size_t s = 1;
    for (std::size_t m = mode + 1; m < dims_.size(); ++m) s *= dims_[m];
    return s;
  }

 private:
  std::vector<std::size_t> dims_;
  CVector coeffs_;
};

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

struct CanonicalOps {
  OperatorMatrix a, q, p, n;
};

inline OperatorMatrix annihilation(std::size_t dim) {
  OperatorMatrix a = OperatorMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 1; n < dim; ++n)
    a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
  return a;
}

inline CanonicalOps canonical_matrices(std::size_t dim) {
  require(dim >= 2, "canonical_matrices: dim must be >= 2");
  CanonicalOps ops;
  ops.a = annihilation(dim);
  const OperatorMatrix ad = ops.a.adjoint();
  ops.q = (ops.a + ad) / std::sqrt(2.0);
  ops.p = (ops.a - ad) / (kI * std::sqrt(2.0));
  ops.n = ad * ops.a;
  return ops;
}

/// Number of top levels excluded from tolerance checks on a d-level cutoff.
inline std::size_t edge_levels(std::size_t dim) { return (dim + 7) / 8; }

/// Leading block that is trusted after truncation.
inline std::size_t safe_block(std::size_t dim) { return dim - edge_levels(dim); }

/// General dense exponential (scaling and squaring with a Pade approximant).
inline OperatorMatrix matrix_exponential(const OperatorMatrix& m) { return m.exp(); }

/// exp(i t H) for Hermitian H via eigendecomposition.
inline OperatorMatrix exp_i_hermitian(const OperatorMatrix& h, double t = 1.0) {
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("exp_i_hermitian: eigendecomposition failed");
  CVector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, t * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(G) for anti-Hermitian G, routed through the Hermitian solver.
inline OperatorMatrix exp_anti_hermitian(const OperatorMatrix& g) {
  const OperatorMatrix h = (kI * g + (kI * g).adjoint()) / 2.0;  // exact Hermitian part of iG
  return exp_i_hermitian(h, -1.0);
}

inline OperatorMatrix displacement_matrix(Complex alpha, std::size_t dim) {
  require(dim >= 2, "displacement_matrix: dim must be >= 2");
  require(is_finite(alpha), "displacement_matrix: alpha must be finite");
  if (alpha == Complex{}) return OperatorMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const OperatorMatrix a = annihilation(dim);
  return exp_anti_hermitian(alpha * a.adjoint() - std::conj(alpha) * a);
}

inline OperatorMatrix squeeze_matrix(Complex xi, std::size_t dim) {
  require(dim >= 4, "squeeze_matrix: dim must be >= 4");
  require(is_finite(xi), "squeeze_matrix: xi must be finite");
  if (xi == Complex{}) return OperatorMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const OperatorMatrix a = annihilation(dim);
  const OperatorMatrix a2 = a * a;
  OperatorMatrix s = exp_anti_hermitian(0.5 * (std::conj(xi) * a2 - xi * a2.adjoint()));
  // S(xi) only couples levels of equal parity; drop round-off on the others.
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = (i + 1) % 2; j < s.cols(); j += 2) s(i, j) = 0.0;
  return s;
}

enum class Quadrature { q, p };

inline Quadrature parse_quadrature(const std::string& tag) {
  if (tag == "q") return Quadrature::q;
  if (tag == "p") return Quadrature::p;
  throw InvalidArgument("unknown quadrature tag '" + tag + "' (expected q or p)");
}

inline OperatorMatrix quadrature_matrix(Quadrature which, std::size_t dim) {
  const CanonicalOps ops = canonical_matrices(dim);
  return which == Quadrature::q ? ops.q : ops.p;
}

/// exp(i g A (x) B) on the product space of two modes (first mode most significant).
inline OperatorMatrix two_mode_sum_gate(double g, Quadrature quad_a, Quadrature quad_b, std::size_t dim_a,
                                        std::size_t dim_b) {
  require(dim_a >= 2 && dim_b >= 2, "two_mode_sum_gate: dims must be >= 2");
  require(std::isfinite(g), "two_mode_sum_gate: coupling must be finite");
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (g == 0.0) return OperatorMatrix::Identity(da * db, da * db);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> ea(quadrature_matrix(quad_a, dim_a));
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> eb(quadrature_matrix(quad_b, dim_b));
  const OperatorMatrix v = Eigen::kroneckerProduct(ea.eigenvectors(), eb.eigenvectors()).eval();
  CVector phases(da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      phases[i * db + j] = std::polar(1.0, g * ea.eigenvalues()[i] * eb.eigenvalues()[j]);
  return v * phases.asDiagonal() * v.adjoint();
}

/// Largest |U^dag U - I| entry on the leading `block` x `block` corner.
inline double unitarity_defect(const OperatorMatrix& u, Eigen::Index block) {
  const OperatorMatrix g = u.adjoint() * u - OperatorMatrix::Identity(u.rows(), u.cols());
  return g.topLeftCorner(block, block).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Matrix-free actions, for cutoffs where dense exponentials are wasteful
// ---------------------------------------------------------------------------

namespace detail {

/// exp(G) v by scaled Taylor steps; `apply_g` computes G x, `g_norm` bounds ||G||.
template <typename ApplyG>
CVector exp_action(ApplyG&& apply_g, double g_norm, CVector v) {
  const int steps = std::max(1, static_cast<int>(std::ceil(g_norm)));
  const double scale = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    CVector term = v;
    CVector acc = v;
    for (int k = 1; k < 60; ++k) {
      term = apply_g(term) * (scale / k);
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    v = std::move(acc);
  }
  return v;
}

}  // namespace detail

/// S(xi) v on the truncated space of v's length, without forming S.
inline CVector squeeze_apply(Complex xi, const CVector& v) {
  require(is_finite(xi), "squeeze_apply: xi must be finite");
  const Eigen::Index d = v.size();
  auto apply_g = [&](const CVector& x) {
    CVector y = CVector::Zero(d);
    for (Eigen::Index n = 0; n < d; ++n) {
      if (n + 2 < d) y[n] += 0.5 * std::conj(xi) * std::sqrt(double((n + 1) * (n + 2))) * x[n + 2];
      if (n >= 2) y[n] -= 0.5 * xi * std::sqrt(double(n * (n - 1))) * x[n - 2];
    }
    return y;
  };
  return detail::exp_action(apply_g, std::abs(xi) * static_cast<double>(d), v);
}

/// D(alpha) v on the truncated space of v's length, without forming D.
inline CVector displace_apply(Complex alpha, const CVector& v) {
  require(is_finite(alpha), "displace_apply: alpha must be finite");
  const Eigen::Index d = v.size();
  auto apply_g = [&](const CVector& x) {
    CVector y = CVector::Zero(d);
    for (Eigen::Index n = 0; n < d; ++n) {
      if (n >= 1) y[n] += alpha * std::sqrt(double(n)) * x[n - 1];
      if (n + 1 < d) y[n] -= std::conj(alpha) * std::sqrt(double(n + 1)) * x[n + 1];
    }
    return y;
  };
  return detail::exp_action(apply_g, 2.0 * std::abs(alpha) * std::sqrt(static_cast<double>(d)), v);
}

// ---------------------------------------------------------------------------
// Multi-mode plumbing
// ---------------------------------------------------------------------------

/// Applies U to the listed modes; U's layout follows the order of `modes`.
inline MultiModeState apply_to_modes(const OperatorMatrix& u, const MultiModeState& state,
                                     std::span<const std::size_t> modes) {
  const auto& dims = state.mode_dims();
  require(!modes.empty(), "apply_to_modes: no target modes");
  std::size_t target = 1;
  std::vector<std::size_t> strides;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    require(modes[i] < dims.size(), "apply_to_modes: mode index out of range");
    for (std::size_t j = 0; j < i; ++j) require(modes[i] != modes[j], "apply_to_modes: repeated mode");
    target *= dims[modes[i]];
    strides.push_back(state.stride(modes[i]));
  }
  require(static_cast<std::size_t>(u.rows()) == target && static_cast<std::size_t>(u.cols()) == target,
          "apply_to_modes: operator dimension does not match targeted modes");

  // Offset of every targeted sub-index in the flattened tensor.
  std::vector<std::size_t> offsets(target, 0);
  for (std::size_t t = 0; t < target; ++t) {
    std::size_t rem = t;
    for (std::size_t i = modes.size(); i-- > 0;) {
      const std::size_t digit = rem % dims[modes[i]];
      rem /= dims[modes[i]];
      offsets[t] += digit * strides[i];
    }
  }

  const CVector& in = state.coeffs();
  CVector out = in;
  CVector gathered(static_cast<Eigen::Index>(target));
  const auto total = static_cast<std::size_t>(in.size());
  for (std::size_t base = 0; base < total; ++base) {
    bool is_base = true;
    for (std::size_t i = 0; i < modes.size() && is_base; ++i)
      is_base = (base / strides[i]) % dims[modes[i]] == 0;
    if (!is_base) continue;
    for (std::size_t t = 0; t < target; ++t) gathered[static_cast<Eigen::Index>(t)] = in[static_cast<Eigen::Index>(base + offsets[t])];
    const CVector res = u * gathered;
    for (std::size_t t = 0; t < target; ++t) out[static_cast<Eigen::Index>(base + offsets[t])] = res[static_cast<Eigen::Index>(t)];
  }
  return MultiModeState::unnormalized(dims, std::move(out));
}

inline MultiModeState apply_to_modes(const OperatorMatrix& u, const MultiModeState& state,
                                     std::initializer_list<std::size_t> modes) {
  std::vector<std::size_t> m(modes);
  return apply_to_modes(u, state, std::span<const std::size_t>(m));
}

struct Projection {
  /// Unnormalized state of the remaining modes. Projecting the last mode
  /// leaves a zero-mode state holding the single amplitude <bra|psi>.
  MultiModeState rest;
  /// Squared norm of `rest`: the probability of the projected outcome.
  double weight;
};

inline Projection project_mode(const MultiModeState& state, std::size_t mode, const FockState& bra) {
  const auto& dims = state.mode_dims();
  require(mode < dims.size(), "project_mode: mode index out of range");
  require(bra.dim() == dims[mode], "project_mode: bra dimension does not match mode");
  std::vector<std::size_t> rest_dims;
  for (std::size_t m = 0; m < dims.size(); ++m)
    if (m != mode) rest_dims.push_back(dims[m]);
  const std::size_t inner_stride = state.stride(mode);
  const std::size_t d = dims[mode];
  const std::size_t outer = static_cast<std::size_t>(state.coeffs().size()) / (d * inner_stride);
  CVector out = CVector::Zero(static_cast<Eigen::Index>(outer * inner_stride));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < d; ++i) {
      const Complex b = std::conj(bra[i]);
      if (b == Complex{}) continue;
      for (std::size_t r = 0; r < inner_stride; ++r)
        out[static_cast<Eigen::Index>(o * inner_stride + r)] +=
            b * state.coeffs()[static_cast<Eigen::Index>((o * d + i) * inner_stride + r)];
    }
  const double w = out.squaredNorm();
  return {MultiModeState::unnormalized(std::move(rest_dims), std::move(out)), w};
}

// ---------------------------------------------------------------------------
// Wavefunctions
// ---------------------------------------------------------------------------

/// Hermite functions h_0..h_{dim-1} at x (real, position-space eigenfunctions of n).
inline std::vector<double> hermite_functions(double x, std::size_t dim) {
  std::vector<double> h(dim);
  if (dim == 0) return h;
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (dim > 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (std::size_t n = 1; n + 1 < dim; ++n)
    h[n + 1] = std::sqrt(2.0 / double(n + 1)) * x * h[n] - std::sqrt(double(n) / double(n + 1)) * h[n - 1];
  return h;
}

/// Matrix with rows over `grid` and columns over Fock levels: <x|n> or <p|n>.
/// The momentum representation uses <p|n> = (-i)^n h_n(p), i.e. psi(p) is the
/// Fourier transform of psi(q) with kernel e^{-ipq}/sqrt(2 pi).
inline OperatorMatrix basis_functions(std::span<const double> grid, std::size_t dim, Quadrature which) {
  OperatorMatrix m(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto h = hermite_functions(grid[g], dim);
    Complex phase = 1.0;
    for (std::size_t n = 0; n < dim; ++n) {
      m(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(n)) = phase * h[n];
      if (which == Quadrature::p) phase *= -kI;
    }
  }
  return m;
}

inline CVector position_wavefunction(const FockState& state, std::span<const double> q_grid) {
  require(!q_grid.empty(), "position_wavefunction: empty grid");
  return basis_functions(q_grid, state.dim(), Quadrature::q) * state.coeffs();
}

inline CVector momentum_wavefunction(const FockState& state, std::span<const double> p_grid) {
  require(!p_grid.empty(), "momentum_wavefunction: empty grid");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    require(std::isfinite(p_grid[i]), "momentum_wavefunction: non-finite grid point");
    require(i == 0 || p_grid[i] >= p_grid[i - 1], "momentum_wavefunction: grid must be sorted");
  }
  return basis_functions(p_grid, state.dim(), Quadrature::p) * state.coeffs();
}

/// Joint momentum amplitude psi(p1, p2) of a two-mode tensor on grid x grid,
/// returned as a matrix indexed [i1, i2].
inline OperatorMatrix joint_momentum_amplitude(const MultiModeState& two_mode, std::span<const double> grid) {
  require(two_mode.num_modes() == 2, "joint_momentum_amplitude: need exactly two modes");
  const auto d0 = static_cast<Eigen::Index>(two_mode.mode_dims()[0]);
  const auto d1 = static_cast<Eigen::Index>(two_mode.mode_dims()[1]);
  const OperatorMatrix c = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      two_mode.coeffs().data(), d0, d1);
  const OperatorMatrix f0 = basis_functions(grid, static_cast<std::size_t>(d0), Quadrature::p);
  const OperatorMatrix f1 = basis_functions(grid, static_cast<std::size_t>(d1), Quadrature::p);
  return f0 * c * f1.transpose();
}

/// Uniform grid lo, lo+step, ..., up to hi inclusive (within half a step).
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, "uniform_grid: need step > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  return g;
}

}  // namespace qcst
