// qcst-lab: run and validate experiment configs, sample Husimi Q-functions,
// and reconstruct states from sample files.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include "qcst/lab/experiments.hpp"
#include "qcst/qcst.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

int cmd_validate(const std::string& path) {
  const qcst::lab::ConfigValidation v = qcst::lab::validate_config(qcst::read_text(path));
  if (!v.ok()) {
    for (const auto& e : v.errors) std::cerr << path << ": " << e.str() << "\n";
    return kConfigExit;
  }
  std::cout << path << ": ok (" << v.config->id << ")\n";
  return 0;
}

int cmd_run(const std::string& path) {
  const qcst::lab::ExperimentConfig cfg = qcst::lab::parse_config(qcst::read_text(path));
  const qcst::lab::ExperimentResult r = qcst::lab::run_experiment(cfg);
  for (const auto& [name, t] : r.tables) std::cout << cfg.output << "/" << name << ".csv (" << t.rows.size() << " rows)\n";
  std::cout << cfg.output << "/metadata.json\n";
  return 0;
}

int cmd_sample(const std::string& state_path, std::size_t m, std::uint64_t seed, const std::string& out) {
  const qcst::FockState psi = qcst::state_from_json(qcst::Json::parse(qcst::read_text(state_path)));
  const qcst::HusimiSamplingResult r = qcst::sample_husimi(psi, m, seed);
  qcst::write_samples(out, r.samples);
  std::cout << out << ": " << m << " samples, acceptance " << r.acceptance_rate << ", leaked mass " << r.leaked_mass
            << "\n";
  return 0;
}

int cmd_tomo(const std::string& samples_path, std::size_t gamma, const std::string& out, std::size_t restarts,
             const std::string& truth_path) {
  const qcst::PhaseSampleSet s = qcst::read_samples(samples_path);
  qcst::MleConfig cfg;
  cfg.gamma = gamma;
  cfg.restarts = restarts;
  cfg.seed = s.seed;
  qcst::ReconstructionReport rep = qcst::mle_fit(s, cfg);
  if (!truth_path.empty())
    qcst::score_reconstruction(rep, qcst::state_from_json(qcst::Json::parse(qcst::read_text(truth_path))));
  qcst::write_text(out, qcst::to_json(rep).dump(2) + "\n");
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << out << ": -logL/M = " << rep.neg_log_likelihood << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent state transform experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "YAML config")->required();
  auto* validate = app.add_subcommand("validate", "check a config and report every problem");
  validate->add_option("config", config_path, "YAML config")->required();

  std::string state_path, out_path, samples_path, truth_path;
  std::size_t m = 0, gamma = 32, restarts = 8;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "draw Husimi samples of a state");
  sample->add_option("--state", state_path, "state JSON {\"dim\": d, \"coeffs\": [[re, im], ...]}")->required();
  sample->add_option("--m", m, "number of samples")->required();
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--out", out_path, "output CSV (seed goes to <out>.json)")->required();

  auto* tomo = app.add_subcommand("tomo", "maximum-likelihood reconstruction from a sample CSV");
  tomo->add_option("--samples", samples_path, "sample CSV with header re,im")->required();
  tomo->add_option("--gamma", gamma, "Fock cutoff")->check(CLI::Range(1, 64));
  tomo->add_option("--restarts", restarts, "random restarts");
  tomo->add_option("--truth", truth_path, "optional true state JSON for scoring");
  tomo->add_option("--out", out_path, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*validate) return cmd_validate(config_path);
    if (*sample) return cmd_sample(state_path, m, seed, out_path);
    if (*tomo) return cmd_tomo(samples_path, gamma, out_path, restarts, truth_path);
  } catch (const qcst::lab::ConfigError& e) {
    for (const auto& i : e.issues()) std::cerr << config_path << ": " << i.str() << "\n";
    return kConfigExit;
  } catch (const qcst::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const qcst::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kConfigExit;
  }
  return 0;
}
