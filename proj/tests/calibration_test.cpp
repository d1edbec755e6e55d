#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcst;

namespace {

/// Pr(j) = (1/N) |sum_j' c_j' e^{i(2 q_j' x - 2 pi j j'/N)}|^2 summed term by term.
std::vector<double> phase_kick_oracle(const WindowRegister& w, double x) {
  std::vector<double> pr(w.n);
  for (std::size_t j = 0; j < w.n; ++j) {
    Complex s{};
    for (std::size_t jp = 0; jp < w.n; ++jp)
      s += w.c[static_cast<Eigen::Index>(jp)] *
           std::polar(1.0, 2.0 * w.position(jp) * x - 2.0 * kPi * double(j * jp) / double(w.n));
    pr[j] = std::norm(s) / double(w.n);
  }
  return pr;
}

}  // namespace

TEST(BeamSplitter, TrivialOutputs) {
  const Complex a{1.0, 0.5}, b{-0.3, 2.0};
  const auto [a0, b0] = beam_splitter_output(a, b, {0.0, 0.4});
  EXPECT_NEAR(std::abs(a0 - a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b0 - b), 0.0, 1e-15);
  const auto [a1, b1] = beam_splitter_output(a, b, {kPi, 0.0});
  EXPECT_NEAR(std::abs(a1 - kI * b), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b1 - kI * a), 0.0, 1e-15);
}

TEST(BeamSplitter, EnergyConservedAndRoundTrip) {
  Rng rng(11);
  std::uniform_real_distribution<double> th(0.01, kPi - 0.01), ph(0.0, 2.0 * kPi);
  for (int t = 0; t < 200; ++t) {
    const Complex a = qcst::testing::random_complex_in_disk(rng, 5.0);
    const Complex b = qcst::testing::random_complex_in_disk(rng, 5.0);
    const BeamSplitterParams p(th(rng), ph(rng));
    const auto [ao, bo] = beam_splitter_output(a, b, p);
    EXPECT_NEAR(std::norm(ao) + std::norm(bo), std::norm(a) + std::norm(b), 1e-12);
    if (std::norm(a) + std::norm(b) < 1e-3) continue;
    const BeamSplitterEstimate e = calibrate_beam_splitter(a, b, ao, bo);
    EXPECT_NEAR(angle_difference(e.params.theta, p.theta), 0.0, 1e-9);
    EXPECT_NEAR(angle_difference(e.params.phi, p.phi), 0.0, 1e-9);
    EXPECT_NEAR(e.residual, 0.0, 1e-9);
  }
}

TEST(BeamSplitter, NoiselessSpecCaseAndIdentifiability) {
  const auto [ao, bo] = beam_splitter_output(2.0, 2.0, {0.7, 1.1});
  const BeamSplitterEstimate e = calibrate_beam_splitter(2.0, 2.0, ao, bo);
  EXPECT_NEAR(e.params.theta, 0.7, 1e-10);
  EXPECT_NEAR(e.params.phi, 1.1, 1e-10);
  // |s| = sin(0.35) is below 3/sqrt(E) at E = 8 but well above it at E = 512.
  EXPECT_FALSE(e.phi_identifiable);
  const auto [ao16, bo16] = beam_splitter_output(16.0, 16.0, {0.7, 1.1});
  EXPECT_TRUE(calibrate_beam_splitter(16.0, 16.0, ao16, bo16).phi_identifiable);
  const BeamSplitterEstimate z = calibrate_beam_splitter(2.0, 2.0, 2.0, 2.0);
  EXPECT_NEAR(z.params.theta, 0.0, 1e-15);
  EXPECT_FALSE(z.phi_identifiable);
  EXPECT_THROW(calibrate_beam_splitter(0.0, 0.0, 1.0, 1.0), InvalidArgument);
}

TEST(BeamSplitter, ThetaErrorHalvesPerDoubling) {
  std::vector<double> rms;
  for (double a : {2.0, 4.0, 8.0, 16.0}) rms.push_back(beam_splitter_trials(a, a, {0.7, 1.1}, 500, 21).rms_error[0]);
  for (std::size_t i = 1; i < rms.size(); ++i) EXPECT_NEAR(rms[i] / rms[i - 1], 0.5, 0.15) << i;
}

TEST(Rotation, ExactInversionAndErrors) {
  EXPECT_EQ(calibrate_rotation({1.0, 2.0}, {1.0, 2.0}), 0.0);
  const Complex a{1.3, -0.4};
  EXPECT_NEAR(calibrate_rotation(a, a * std::polar(1.0, -0.9)), 0.9, 1e-12);
  EXPECT_THROW(calibrate_rotation(0.0, 1.0), InvalidArgument);
}

TEST(Rotation, ErrorScalesInverselyWithAmplitude) {
  std::vector<double> rms;
  for (double a : {2.0, 4.0, 8.0, 16.0}) rms.push_back(rotation_trials(a, 0.9, 500, 22).rms_error[0]);
  for (std::size_t i = 1; i < rms.size(); ++i) EXPECT_NEAR(rms[i] / rms[i - 1], 0.5, 0.15) << i;
}

TEST(Heisenberg, SpecCases) {
  const HeisenbergMoments z = heisenberg_moments(0.0, 0.3, 8);
  EXPECT_NEAR(z.mean, 0.0, 1e-15);
  EXPECT_NEAR(z.variance, 0.0, 1e-15);
  const HeisenbergMoments one = heisenberg_moments(1.0, 0.0, 24);
  EXPECT_NEAR(one.mean, 1.0, 1e-4);
  EXPECT_NEAR(one.variance, 0.5, 1e-4);
  const HeisenbergMoments b = heisenberg_moments(1.5, kPi / 3, 32);
  EXPECT_NEAR(b.mean, 2.25 * 0.5, 1e-4);
  EXPECT_NEAR(b.variance, 2.25 / 2, 1e-4);
  EXPECT_FALSE(heisenberg_moments(3.0, 0.0, 8).reliable);
}

TEST(Heisenberg, SparseActionMatchesDenseKronecker) {
  Rng rng(12);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  for (int t = 0; t < 20; ++t) {
    const Complex a = qcst::testing::random_complex_in_disk(rng, 2.0);
    const double phi = ph(rng);
    const HeisenbergMoments s = heisenberg_moments(a, phi, 24);
    const auto [m1, m2] = qcst::testing::heisenberg_dense(a, phi, 24);
    EXPECT_NEAR(s.mean, m1, 1e-10);
    EXPECT_NEAR(s.variance, m2 - m1 * m1, 1e-9);
    // Closed form, up to the coherent truncation at 24 levels.
    EXPECT_NEAR(s.mean, std::norm(a) * std::cos(phi), 1e-4);
    EXPECT_NEAR(s.variance, std::norm(a) / 2, 1e-4);
  }
}

TEST(DisplacementCv, LargeLambdaSingleShot) {
  const Complex a{1.0, 2.0};
  int good = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) good += std::abs(displacement_cv_calibration(a, 1e3, s) - a) <= 0.01;
  EXPECT_GE(good, 990);
  EXPECT_THROW(displacement_cv_calibration(a, 0.0, 1), InvalidArgument);
  EXPECT_THROW(displacement_cv_calibration(a, -1.0, 1), InvalidArgument);
}

TEST(DisplacementCv, Unbiased) {
  const Complex a{1.0, 2.0};
  const std::size_t m = 100000;
  const CalibrationResult r = displacement_cv_trials(a, 2.0, m, 23);
  double mr = 0, mi = 0;
  for (const auto& e : r.estimates) {
    mr += e[0];
    mi += e[1];
  }
  const double tol = 4.0 * r.rms_error[0] / std::sqrt(double(m));
  EXPECT_NEAR(mr / double(m), 1.0, tol);
  EXPECT_NEAR(mi / double(m), 2.0, tol);
}

TEST(DisplacementCv, RmsScalesAsInverseLambda) {
  std::vector<double> lam{1, 2, 4, 8}, rms;
  for (double l : lam) rms.push_back(displacement_cv_trials({1.0, 2.0}, l, 10000, 24).rms_error[0]);
  for (std::size_t i = 1; i < rms.size(); ++i) EXPECT_NEAR(rms[i] / rms[i - 1], 0.5, 0.05);
  EXPECT_NEAR(loglog_slope(lam, rms), -1.0, 0.1);
  // Per-quadrature std follows the sampled variance 1/2 per momentum: 1/(2 lambda).
  EXPECT_NEAR(rms[0], 0.5, 0.02);
}

TEST(DisplacementDv, PhaseKickDistributionMatchesOracle) {
  Rng rng(25);
  std::uniform_real_distribution<double> x(-1.5, 1.5);
  for (WindowKind k : {WindowKind::unf, WindowKind::sin}) {
    const WindowRegister w = make_window(k, 16, 0.5);
    for (int t = 0; t < 10; ++t) {
      const double xv = x(rng);
      const std::vector<double> pr = window_phase_distribution(w, 2.0 * w.lambda * xv);
      const std::vector<double> ref = phase_kick_oracle(w, xv);
      double sum = 0.0;
      for (std::size_t j = 0; j < pr.size(); ++j) {
        EXPECT_NEAR(pr[j], ref[j], 1e-12);
        sum += pr[j];
      }
      EXPECT_NEAR(sum, 1.0, 1e-10);
    }
  }
}

TEST(DisplacementDv, ZeroDisplacementConcentrates) {
  const WindowRegister w = make_window(WindowKind::sin, 64, 0.5);
  const std::vector<double> pr = phase_kick_oracle(w, 0.0);
  // Both quadratures independent: P(|alpha~| <= r) from the exact product law.
  const double r = 2.0 * kPi / (64 * 0.5);
  double p = 0.0;
  for (std::size_t a = 0; a < 64; ++a)
    for (std::size_t b = 0; b < 64; ++b) {
      const double xa = kPi * double(w.wrapped_index(a)) / 32.0, xb = kPi * double(w.wrapped_index(b)) / 32.0;
      if (std::hypot(xa, xb) <= r + 1e-12) p += pr[a] * pr[b];
    }
  EXPECT_GE(p, 0.9);
  int hits = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) hits += std::abs(displacement_dv_calibration(0.0, w, s).alpha) <= r + 1e-12;
  EXPECT_GE(hits, 1700);
}

TEST(DisplacementDv, DoublingNHalvesError) {
  const Complex a{0.37, 0.21};
  std::vector<double> rms;
  for (std::size_t n : {16u, 32u, 64u}) {
    const CalibrationResult r = displacement_dv_trials(a, make_window(WindowKind::sin, n, 0.5), 10000, 26);
    EXPECT_TRUE(r.flags.empty());
    rms.push_back(std::hypot(r.rms_error[0], r.rms_error[1]));
  }
  for (std::size_t i = 1; i < rms.size(); ++i) EXPECT_NEAR(rms[i] / rms[i - 1], 0.5, 0.15) << i;
}

TEST(DisplacementDv, WrappingIsFlagged) {
  const WindowRegister w = make_window(WindowKind::sin, 16, 0.5);
  EXPECT_TRUE(displacement_dv_calibration({4.0, 0.0}, w, 1).wrapped);
  EXPECT_FALSE(displacement_dv_calibration({0.5, -0.5}, w, 1).wrapped);
}
