// Gaussian fast path: closed-form Husimi Q-functions of pure Gaussian states,
// direct sampling, moment estimation and the squeezing-parameter fit.

#pragma once

#include "qcst/common.hpp"
#include "qcst/samples.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <sstream>

namespace qcst {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Vec2 to_vec2(Complex z) { return {z.real(), z.imag()}; }

/// Mean and covariance of (Re alpha, Im alpha) under a Gaussian Q-function.
struct GaussianModel {
  Vec2 mu = Vec2::Zero();
  Mat2 sigma = Mat2::Identity() / 2.0;

  GaussianModel() = default;
  GaussianModel(Vec2 m, Mat2 s) : mu(std::move(m)), sigma(std::move(s)) {
    require(std::isfinite(mu[0]) && std::isfinite(mu[1]) && sigma.allFinite(), "GaussianModel: non-finite entry");
    require(std::abs(sigma(0, 1) - sigma(1, 0)) <= 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()),
            "GaussianModel: covariance must be symmetric");
  }

  Vec2 eigenvalues() const { return Eigen::SelfAdjointEigenSolver<Mat2>(sigma).eigenvalues(); }

  /// A pure Gaussian state has Husimi covariance bounded below by the vacuum's 1/4.
  bool is_physical() const { return eigenvalues().minCoeff() >= 0.25 - 1e-9; }
};

/// xi = r e^{i theta} applied to the coherent state |alpha0>, alpha0 >= 0.
struct SqueezeParams {
  Complex xi{};
  double alpha0 = 0.0;

  double r() const { return std::abs(xi); }
  double theta() const { return xi == Complex{} ? 0.0 : wrap_angle(std::arg(xi)); }
};

inline Mat2 half_angle_rotation(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

inline double gaussian_q_eval(const GaussianModel& model, Complex alpha) {
  const Vec2 ev = model.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "gaussian_q_eval: covariance is not positive definite (eigenvalues " << ev[0] << ", " << ev[1] << ")";
    throw InvalidArgument(os.str());
  }
  const Vec2 d = to_vec2(alpha) - model.mu;
  const double quad = d.dot(model.sigma.inverse() * d);
  return std::exp(-0.5 * quad) / (2.0 * kPi * std::sqrt(model.sigma.determinant()));
}

/// Husimi model of S(xi)|alpha0>.
inline GaussianModel squeezed_coherent_model(const SqueezeParams& p) {
  require(is_finite(p.xi) && std::isfinite(p.alpha0), "squeezed_coherent_model: non-finite parameters");
  require(p.alpha0 >= 0.0, "squeezed_coherent_model: alpha0 must be >= 0");
  const double r = p.r(), th = p.theta();
  const Mat2 rot = half_angle_rotation(th);
  const Vec2 m{p.alpha0 * std::exp(-r) * std::cos(th / 2), -p.alpha0 * std::exp(r) * std::sin(th / 2)};
  Mat2 diag = Mat2::Zero();
  diag(0, 0) = (1.0 + std::exp(-2 * r)) / 4.0;
  diag(1, 1) = (1.0 + std::exp(2 * r)) / 4.0;
  Mat2 s = rot * diag * rot.transpose();
  s(0, 1) = s(1, 0) = 0.5 * (s(0, 1) + s(1, 0));
  return {rot * m, s};
}

inline PhaseSampleSet sample_gaussian(const GaussianModel& model, std::size_t m, std::uint64_t seed) {
  Eigen::LLT<Mat2> llt(model.sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("sample_gaussian: Cholesky factorization failed (covariance not PD)");
  const Mat2 l = llt.matrixL();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PhaseSampleSet out;
  out.seed = seed;
  out.source = SampleSource::analytic_gaussian;
  out.samples.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double z0 = normal(rng);
    const double z1 = normal(rng);
    const Vec2 x = model.mu + l * Vec2{z0, z1};
    out.samples.emplace_back(x[0], x[1]);
  }
  return out;
}

/// Sample mean and unbiased (1/(M-1)) covariance. The covariance is passed
/// through as estimated, even if it is not physical.
inline GaussianModel estimate_moments(const PhaseSampleSet& samples) {
  const std::size_t m = samples.size();
  require(m >= 2, "estimate_moments: need at least two samples");
  Vec2 mean = Vec2::Zero();
  for (Complex z : samples.samples) mean += to_vec2(z);
  mean /= static_cast<double>(m);
  Mat2 cov = Mat2::Zero();
  for (Complex z : samples.samples) {
    const Vec2 d = to_vec2(z) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(m - 1);
  cov(0, 1) = cov(1, 0);
  return {mean, cov};
}

struct SqueezeFit {
  Complex xi;
  double loss;
};

/// ||mu(xi) - mu_t|| + ||Sigma(xi) - Sigma_t||_F for the S(xi)|alpha0> family.
inline double squeeze_loss(Complex xi, const Vec2& mu_t, const Mat2& sigma_t, double alpha0) {
  const GaussianModel g = squeezed_coherent_model({xi, alpha0});
  return (g.mu - mu_t).norm() + (g.sigma - sigma_t).norm();
}

namespace detail {

struct SqueezeLossData {
  const Vec2* mu;
  const Mat2* sigma;
  double alpha0;
};

inline Complex clamp_to_unit_disk(double x, double y) {
  Complex z{x, y};
  const double a = std::abs(z);
  return a > 1.0 ? z / a : z;
}

inline double squeeze_loss_gsl(const gsl_vector* v, void* params) {
  const auto* d = static_cast<const SqueezeLossData*>(params);
  const Complex xi = clamp_to_unit_disk(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
  return squeeze_loss(xi, *d->mu, *d->sigma, d->alpha0);
}

}  // namespace detail

/// Minimizes squeeze_loss over |xi| <= 1: a 64 x 64 polar grid, then a
/// Nelder-Mead polish in Cartesian coordinates. Grid ties go to the smaller
/// theta; the returned theta lies in [0, 2pi).
inline SqueezeFit fit_squeezing(const Vec2& mu_t, const Mat2& sigma_t, double alpha0) {
  require(mu_t.allFinite() && sigma_t.allFinite() && std::isfinite(alpha0), "fit_squeezing: non-finite input");
  require(alpha0 > 0.0, "fit_squeezing: alpha0 must be > 0");

  constexpr int kGrid = 64;
  Complex best{};
  double best_loss = squeeze_loss(best, mu_t, sigma_t, alpha0);
  for (int it = 0; it < kGrid; ++it) {
    const double th = 2.0 * kPi * it / kGrid;
    for (int ir = 1; ir < kGrid; ++ir) {
      const Complex xi = std::polar(static_cast<double>(ir) / (kGrid - 1), th);
      const double l = squeeze_loss(xi, mu_t, sigma_t, alpha0);
      if (l < best_loss) {
        best_loss = l;
        best = xi;
      }
    }
  }

  detail::SqueezeLossData data{&mu_t, &sigma_t, alpha0};
  gsl_multimin_function fn{&detail::squeeze_loss_gsl, 2, &data};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, best.real());
  gsl_vector_set(x, 1, best.imag());
  gsl_vector_set_all(step, 0.5 / kGrid);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int iter = 0; iter < 2000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12) == GSL_SUCCESS) break;
  }
  Complex refined = detail::clamp_to_unit_disk(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1));
  double refined_loss = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);

  if (refined_loss < best_loss) {
    best = refined;
    best_loss = refined_loss;
  }
  return {best, best_loss};
}

/// Uniform draw from the closed unit disk.
inline Complex random_unit_disk(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(u(rng));
  return std::polar(r, 2.0 * kPi * u(rng));
}

}  // namespace qcst
