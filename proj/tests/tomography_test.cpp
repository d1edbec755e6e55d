#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcst;
using qcst::testing::fig3_state;

namespace {

PhaseSampleSet samples_of(const FockState& psi, std::size_t m, std::uint64_t seed) {
  return sample_husimi(psi, m, seed).samples;
}

}  // namespace

TEST(Mle, RecoversVacuum) {
  MleConfig cfg;
  cfg.gamma = 8;
  cfg.seed = 3;
  const ReconstructionReport r = mle_fit(samples_of(FockState::vacuum(4), 4096, 1), cfg);
  EXPECT_GE(std::norm(r.psi_hat[0]), 0.99);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_FALSE(r.degenerate);
}

TEST(Mle, Fig3ProtocolL1Bound) {
  // Calibrated on seeds 0..5: l1 ~ 0.08 to 0.12 at M = 1024, Gamma = 32.
  MleConfig cfg;
  cfg.seed = 7;
  ReconstructionReport r = mle_fit(samples_of(fig3_state(), 1024, 2), cfg);
  score_reconstruction(r, fig3_state());
  ASSERT_TRUE(r.l1_error && r.fidelity);
  EXPECT_LE(*r.l1_error, 0.15);
  EXPECT_GE(*r.l1_error, 0.0);
  EXPECT_LE(*r.fidelity, 1.0);
  EXPECT_GE(*r.fidelity, 0.9);
}

TEST(Mle, ErrorsAndWarnings) {
  EXPECT_THROW(mle_fit(PhaseSampleSet{}, MleConfig{}), InvalidArgument);
  PhaseSampleSet same;
  same.samples.assign(20, Complex{0.5, 0.5});
  MleConfig cfg;
  cfg.gamma = 4;
  cfg.restarts = 1;
  cfg.max_iters = 20;
  const ReconstructionReport r = mle_fit(same, cfg);
  EXPECT_TRUE(r.degenerate);
  cfg.gamma = 32;
  EXPECT_FALSE(mle_fit(samples_of(FockState::vacuum(2), 10, 1), cfg).warnings.empty());
}

TEST(Mle, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    const MleObjective obj(samples_of(qcst::testing::random_state(rng, 4, 4), 50, rng()), 8);
    const CVector psi = qcst::testing::random_state(rng, 8, 8).coeffs();
    CVector g;
    obj.value_and_gradient(psi, g);
    const CVector num = qcst::testing::numeric_gradient([&](const CVector& x) { return obj.value(x); }, psi);
    EXPECT_LE((g - num).norm() / num.norm(), 1e-5);
  }
}

TEST(Mle, ObjectiveNonIncreasing) {
  MleConfig cfg;
  cfg.gamma = 16;
  cfg.restarts = 2;
  cfg.seed = 5;
  const ReconstructionReport r = mle_fit(samples_of(fig3_state(), 512, 6), cfg);
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] + 1e-14) << i;
  EXPECT_NEAR(r.history.back(), r.neg_log_likelihood, 1e-12);
}

TEST(Mle, GaugeInvariance) {
  const MleObjective obj(samples_of(fig3_state(), 200, 8), 8);
  Rng rng(9);
  const CVector psi = qcst::testing::random_state(rng, 8, 8).coeffs();
  const Complex ph = std::polar(1.0, 1.234);
  EXPECT_NEAR(obj.value(psi), obj.value(ph * psi), 1e-10);
  const FockState truth = fig3_state(8);
  const FockState rotated = FockState::from_coefficients(truth.coeffs() * ph);
  ReconstructionReport a, b;
  a.psi_hat = b.psi_hat = FockState::from_coefficients(psi);
  score_reconstruction(a, truth);
  score_reconstruction(b, rotated);
  EXPECT_NEAR(*a.fidelity, *b.fidelity, 1e-10);
  EXPECT_NEAR(*a.l1_error, *b.l1_error, 1e-10);
  const CVector fixed = fix_gauge(ph * psi);
  Eigen::Index k = 0;
  fixed.cwiseAbs().maxCoeff(&k);
  EXPECT_NEAR(fixed[k].imag(), 0.0, 1e-15);
  EXPECT_GE(fixed[k].real(), 0.0);
}

TEST(Padua, CountsAndContainment) {
  EXPECT_EQ(padua_points(1, 1.0).points.size(), 3u);
  const PaduaGrid g = padua_points(32, 5.0);
  EXPECT_EQ(g.points.size(), 561u);
  double wsum = 0.0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    EXPECT_LE(std::abs(g.points[i].real()), 5.0 + 1e-12);
    EXPECT_LE(std::abs(g.points[i].imag()), 5.0 + 1e-12);
    wsum += g.weights[i];
  }
  EXPECT_NEAR(wsum, 1.0, 1e-13);
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_EQ(padua_points(n, 2.0).points.size(), (n + 1) * (n + 2) / 2);
  EXPECT_THROW(padua_points(0, 1.0), InvalidArgument);
  EXPECT_THROW(padua_points(4, 0.0), InvalidArgument);
}

TEST(Padua, ConstantAndPolynomialExactness) {
  const PaduaGrid g = padua_points(8, 2.0);
  const PaduaInterpolant c = padua_interpolate(g, std::vector<double>(g.points.size(), 0.7));
  Rng rng(10);
  std::uniform_real_distribution<double> u(-2.0, 2.0), coef(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) EXPECT_NEAR(c({u(rng), u(rng)}), 0.7, 1e-10);

  // Random polynomial of total degree <= 3 in monomials.
  double a[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) a[i][j] = coef(rng);
  const auto poly = [&](Complex z) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; i + j < 4; ++j) s += a[i][j] * std::pow(z.real(), i) * std::pow(z.imag(), j);
    return s;
  };
  std::vector<double> vals;
  for (Complex p : g.points) vals.push_back(poly(p));
  const PaduaInterpolant f = padua_interpolate(g, vals);
  for (int t = 0; t < 100; ++t) {
    const Complex z{u(rng), u(rng)};
    EXPECT_NEAR(f(z), poly(z), 1e-8);
  }
  EXPECT_THROW(padua_interpolate(g, {1.0}), InvalidArgument);
}

TEST(Padua, FullDegreeSpaceIsReproduced) {
  // Every T_i(x) T_j(y) with i + j <= n, including the x^n edge term.
  const std::size_t n = 6;
  const PaduaGrid g = padua_points(n, 1.0);
  Rng rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; i + j <= n; ++j) {
      const auto f = [&](Complex z) { return std::cos(double(i) * std::acos(z.real())) * std::cos(double(j) * std::acos(z.imag())); };
      std::vector<double> vals;
      for (Complex p : g.points) vals.push_back(f(p));
      const PaduaInterpolant interp = padua_interpolate(g, vals);
      for (int t = 0; t < 10; ++t) {
        const Complex z{u(rng), u(rng)};
        EXPECT_NEAR(interp(z), f(z), 1e-10) << i << "," << j;
      }
    }
}

TEST(Padua, NoiselessFig3Interpolation) {
  const PaduaGrid g = padua_points(32, 5.0);
  std::vector<double> vals;
  for (Complex p : g.points) vals.push_back(husimi_q_pure(fig3_state(), p));
  const PaduaInterpolant f = padua_interpolate(g, vals);
  EXPECT_LE(q_l1_distance([](Complex a) { return husimi_q_pure(fig3_state(), a); }, f, 5.0, 0.05), 0.05);
}

TEST(Pointwise, BinomialStatistics) {
  const PaduaGrid g{0, 1.0, {Complex{0.0, 0.0}}, {1.0}};
  const std::vector<double> v = pointwise_estimate(FockState::vacuum(2), g, 1024, 12);
  // p = 1 at the origin for vacuum, so the estimate is exact.
  EXPECT_NEAR(v[0], 1.0 / kPi, 1e-15);
  const PaduaGrid h{0, 1.0, {Complex{0.8, 0.0}}, {1.0}};
  const double p = std::exp(-0.64);
  const double tol = 4.0 * std::sqrt(p * (1 - p) / 1024) / kPi;
  for (std::uint64_t s = 0; s < 20; ++s)
    EXPECT_NEAR(pointwise_estimate(FockState::vacuum(2), h, 1024, s)[0], p / kPi, tol);
  EXPECT_THROW(pointwise_estimate(FockState::vacuum(2), h, 0, 1), InvalidArgument);
}

TEST(QL1, SpecCases) {
  const auto vac = [](Complex a) { return husimi_q_pure(FockState::vacuum(2), a); };
  EXPECT_EQ(q_l1_distance(vac, vac, 5.0, 0.05), 0.0);
  const FockState c3 = make_coherent(3.0, 40);
  const auto coh = [&](Complex a) { return husimi_q_pure(c3, a); };
  EXPECT_NEAR(q_l1_distance(vac, coh, 7.0, 0.05), q_l1_distance(vac, coh, 7.0, 0.025), 1e-3);
  const FockState far = make_coherent(6.0, 80);
  EXPECT_NEAR(q_l1_distance(vac, [&](Complex a) { return husimi_q_pure(far, a); }, 10.0, 0.05), 2.0, 1e-3);
  // Negative estimates are clamped to zero inside the integral.
  EXPECT_NEAR(q_l1_distance(vac, [](Complex) { return -1.0; }, 5.0, 0.05), 1.0, 1e-6);
}
