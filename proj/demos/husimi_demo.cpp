// Samples the Husimi Q-function of a superposition, reconstructs the state
// by maximum likelihood and prints how close the reconstruction is.

#include "qcst/qcst.hpp"

#include <cstdio>

int main() {
  using namespace qcst;
  const FockState psi = FockState::from_coefficients({0.5, 0.0, Complex{0.0, 1.0 / std::sqrt(2.0)}, 0.0, 0.5});
  const HusimiSamplingResult hs = sample_husimi(psi, 2048, 1);
  std::printf("drew %zu samples, acceptance %.3f\n", hs.samples.size(), hs.acceptance_rate);

  MleConfig cfg;
  cfg.gamma = 12;
  cfg.seed = 1;
  ReconstructionReport rep = mle_fit(hs.samples, cfg);
  score_reconstruction(rep, psi);
  std::printf("fidelity %.4f, L1 distance of Q %.4f\n", *rep.fidelity, *rep.l1_error);
  for (std::size_t k = 0; k < 6; ++k)
    std::printf("  psi[%zu] = %+.3f %+.3fi\n", k, rep.psi_hat[k].real(), rep.psi_hat[k].imag());
}
