#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcst;
using qcst::testing::fig3_state;

namespace {

/// Direct sum of Q = (1/pi) e^{-|a|^2} |sum_k conj(psi_k) a^k / sqrt(k!)|^2 without Horner.
double q_direct(const FockState& psi, Complex a) {
  Complex s{};
  double fact = 1.0;
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    s += std::conj(psi[k]) * std::pow(a, static_cast<double>(k)) / std::sqrt(fact);
  }
  return std::exp(-std::norm(a)) * std::norm(s) / kPi;
}

/// Marginal CDF of Re(alpha) under Q, tabulated by quadrature on [-L, L].
struct MarginalCdf {
  std::vector<double> x, cdf;

  MarginalCdf(const FockState& psi, bool real_part, double l = 7.0, double h = 0.01) {
    x = uniform_grid(-l, l, h);
    std::vector<double> dens(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double acc = 0.0;
      for (double y = -l; y <= l; y += h) acc += husimi_q_pure(psi, real_part ? Complex{x[i], y} : Complex{y, x[i]});
      dens[i] = acc * h;
    }
    cdf.assign(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (dens[i] + dens[i - 1]);
    for (double& c : cdf) c /= cdf.back();
  }

  double operator()(double v) const {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
  }
};

double ks_statistic(std::vector<double> v, const MarginalCdf& f) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = f(v[i]);
    d = std::max({d, std::abs(c - static_cast<double>(i) / n), std::abs(c - static_cast<double>(i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST(HusimiQ, ClosedFormCases) {
  EXPECT_NEAR(husimi_q_pure(FockState::vacuum(4), 0.0), 1.0 / kPi, 1e-15);
  const FockState one = FockState::number(1, 4);
  for (Complex a : {Complex{0.3, 0.2}, Complex{-1.1, 0.7}, Complex{2.0, -2.0}})
    EXPECT_NEAR(husimi_q_pure(one, a), std::exp(-std::norm(a)) * std::norm(a) / kPi, 1e-14);
  EXPECT_EQ(husimi_q_pure(one, 0.0), 0.0);
}

TEST(HusimiQ, HornerMatchesDirectSum) {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const FockState s = qcst::testing::random_state(rng, 20, 20);
    for (int k = 0; k < 10; ++k) {
      const Complex a = qcst::testing::random_complex_in_disk(rng, 3.0);
      EXPECT_NEAR(husimi_q_pure(s, a), q_direct(s, a), 1e-13);
      EXPECT_NEAR(std::exp(log_husimi_q_pure(s, a)), husimi_q_pure(s, a), 1e-13);
    }
  }
}

TEST(HusimiQ, NormalizationOfTestStates) {
  EXPECT_NEAR(integrate_square([](Complex a) { return husimi_q_pure(fig3_state(), a); }, 5.0, 0.05), 1.0, 1e-4);
  Rng rng(2);
  for (const FockState& s : {make_coherent({1.0, -0.5}, 24), qcst::testing::random_state(rng, 8, 8)})
    EXPECT_NEAR(integrate_square([&](Complex a) { return husimi_q_pure(s, a); }, 8.0, 0.05), 1.0, 1e-3);
}

TEST(HusimiQ, BoundedByInversePi) {
  Rng rng(3);
  const std::vector<FockState> states = {FockState::vacuum(4), fig3_state(), make_coherent({0.5, 1.0}, 24),
                                         qcst::testing::random_state(rng, 16, 16)};
  for (const FockState& s : states) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) worst = std::max(worst, husimi_q_pure(s, qcst::testing::random_complex_in_disk(rng, 5.0)));
    EXPECT_LE(worst, 1.0 / kPi + 1e-12);
  }
}

TEST(QFunctionVariant, DispatchesToBothKinds) {
  const QFunction f(FockState::vacuum(4));
  const QFunction g(GaussianModel{});
  EXPECT_FALSE(f.is_gaussian());
  EXPECT_TRUE(g.is_gaussian());
  for (Complex a : {Complex{0.0, 0.0}, Complex{0.4, -1.0}}) EXPECT_NEAR(f(a), g(a), 1e-15);
}

TEST(Sampling, CoherentMinimumUncertainty) {
  const Complex beta{2.0, 1.0};
  const HusimiSamplingResult r = sample_husimi(make_coherent(beta, 32), 100000, 4);
  double vr = 0, vi = 0;
  Complex mean{};
  for (Complex z : r.samples.samples) mean += z - beta;
  mean /= 1e5;
  for (Complex z : r.samples.samples) {
    vr += std::pow((z - beta - mean).real(), 2);
    vi += std::pow((z - beta - mean).imag(), 2);
  }
  EXPECT_NEAR(vr / (1e5 - 1), 0.5, 0.015);
  EXPECT_NEAR(vi / (1e5 - 1), 0.5, 0.015);
  EXPECT_EQ(r.samples.source, SampleSource::rejection);
  EXPECT_LT(r.leaked_mass, 1e-6);
}

TEST(Sampling, VacuumSecondMomentEmptyAndDeterminism) {
  const HusimiSamplingResult r = sample_husimi(FockState::vacuum(4), 100000, 5);
  double m2 = 0;
  for (Complex z : r.samples.samples) m2 += std::norm(z);
  EXPECT_NEAR(m2 / 1e5, 1.0, 0.03);
  EXPECT_TRUE(sample_husimi(FockState::vacuum(4), 0, 5).samples.empty());
  EXPECT_EQ(sample_husimi(fig3_state(), 500, 9).samples.samples, sample_husimi(fig3_state(), 500, 9).samples.samples);
}

TEST(Sampling, LeakedMassSmallForTestStates) {
  for (const FockState& s : {fig3_state(), make_coherent(1.5, 32), FockState::number(4, 8)})
    EXPECT_LT(sample_husimi(s, 0, 1).leaked_mass, 1e-6);
}

TEST(Sampling, MarginalsPassKolmogorovSmirnov) {
  const FockState psi = fig3_state();
  const HusimiSamplingResult r = sample_husimi(psi, 10000, 6);
  std::vector<double> re, im;
  for (Complex z : r.samples.samples) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  // Critical value at the 1e-3 level: sqrt(-ln(5e-4)/2) / sqrt(M) ~ 1.95/sqrt(M).
  const double crit = 1.95 / std::sqrt(1e4);
  EXPECT_LT(ks_statistic(re, MarginalCdf(psi, true)), crit);
  EXPECT_LT(ks_statistic(im, MarginalCdf(psi, false)), crit);
}

TEST(AnalyticAmplitude, VacuumNormalizationAndQRelation) {
  EXPECT_NEAR(std::abs(qcst_analytic_amplitude(FockState::vacuum(4), 0.0, 0.0) - 1.0 / (2.0 * std::sqrt(kPi))), 0.0, 1e-15);
  const FockState c = make_coherent(1.0, 32);
  double acc = 0.0;
  const double h = 0.05;
  for (double p1 = -10 + h / 2; p1 < 10; p1 += h)
    for (double p2 = -10 + h / 2; p2 < 10; p2 += h) acc += std::norm(qcst_analytic_amplitude(c, p1, p2));
  EXPECT_NEAR(acc * h * h, 1.0, 1e-4);
  Rng rng(7);
  const FockState s = qcst::testing::random_state(rng, 12, 12);
  for (int t = 0; t < 20; ++t) {
    const Complex a = qcst::testing::random_complex_in_disk(rng, 3.0);
    EXPECT_NEAR(std::norm(qcst_analytic_amplitude(s, 2 * a.real(), 2 * a.imag())) / 0.25, husimi_q_pure(s, a), 1e-10);
  }
}

TEST(CircuitVerify, TheoremOnCanonicalStates) {
  const std::vector<double> grid = uniform_grid(-3.0, 3.0, 0.5);
  for (const FockState& s : {FockState::vacuum(16), FockState::number(1, 16), make_coherent(0.5, 16)}) {
    const QcstVerificationReport r = qcst_circuit_verify(s, 16, grid);
    EXPECT_GE(r.ancilla_reset_fidelity, 0.99);
    EXPECT_LE(r.max_amp_error, 5e-3);
    EXPECT_TRUE(r.reliable);
  }
}

TEST(CircuitVerify, RejectsBadArguments) {
  const std::vector<double> grid{0.0};
  EXPECT_THROW(qcst_circuit_verify(FockState::vacuum(8), 6, grid), InvalidArgument);
  EXPECT_THROW(qcst_circuit_verify(FockState::vacuum(8), 8, std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(qcst_circuit_verify(FockState::number(10, 12), 8, grid), InvalidArgument);
  EXPECT_THROW(qgt_circuit_verify(FockState::vacuum(16), 0.8, 16, grid), InvalidArgument);
}

TEST(CircuitVerify, SmallCutoffIsFlaggedNotThrown) {
  const QcstVerificationReport r = qcst_circuit_verify(make_coherent(1.5, 8), 8, uniform_grid(-2, 2, 1.0));
  EXPECT_FALSE(r.reliable);
  EXPECT_GE(r.ancilla_reset_fidelity, 0.0);
  EXPECT_LE(r.ancilla_reset_fidelity, 1.0);
}

TEST(CircuitVerify, SqueezedReducesToCoherentAtZero) {
  const std::vector<double> grid = uniform_grid(-2.0, 2.0, 1.0);
  const QcstVerificationReport a = qcst_circuit_verify(FockState::number(1, 16), 16, grid);
  const QcstVerificationReport b = qgt_circuit_verify(FockState::number(1, 16), 0.0, 16, grid);
  EXPECT_NEAR(a.ancilla_reset_fidelity, b.ancilla_reset_fidelity, 1e-10);
  EXPECT_NEAR(a.max_amp_error, b.max_amp_error, 1e-8);
}

TEST(CircuitVerify, SqueezedTransform) {
  const std::vector<double> grid = uniform_grid(-3.0, 3.0, 0.5);
  const QcstVerificationReport v = qgt_circuit_verify(FockState::vacuum(24), 0.4, 24, grid);
  EXPECT_GE(v.ancilla_reset_fidelity, 0.98);
  const QcstVerificationReport two = qgt_circuit_verify(FockState::number(2, 24), 0.3, 24, grid);
  EXPECT_LE(two.max_amp_error, 1e-2);
}
