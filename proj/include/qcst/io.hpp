// File formats: state JSON, sample CSV with its seed sidecar, and the JSON
// and CSV renderings of every report the CLI emits.

#pragma once

#include "qcst/calibration.hpp"
#include "qcst/discrete.hpp"
#include "qcst/samples.hpp"
#include "qcst/tomography.hpp"
#include "qcst/transform.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qcst {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + p.string() + "'");
  out << text;
}

// --- states -----------------------------------------------------------------

inline Json state_to_json(const FockState& s) {
  Json c = Json::array();
  for (Eigen::Index k = 0; k < s.coeffs().size(); ++k) c.push_back({s.coeffs()[k].real(), s.coeffs()[k].imag()});
  return {{"dim", s.dim()}, {"coeffs", c}};
}

/// Parses {"dim": d, "coeffs": [[re, im], ...]}; fewer than d coefficients
/// are zero-padded. The result is normalized.
inline FockState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("coeffs"))
    throw InvalidArgument("state JSON needs \"dim\" and \"coeffs\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
    throw InvalidArgument("state JSON: \"dim\" must be a positive integer");
  const auto d = j["dim"].get<std::size_t>();
  const Json& c = j["coeffs"];
  if (!c.is_array() || c.size() > d) throw InvalidArgument("state JSON: \"coeffs\" must be an array of at most dim pairs");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Json& e = c[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw InvalidArgument("state JSON: coefficient " + std::to_string(k) + " must be [re, im]");
    v[static_cast<Eigen::Index>(k)] = Complex{e[0].get<double>(), e[1].get<double>()};
  }
  if (v.norm() == 0.0) throw InvalidArgument("state JSON: all coefficients are zero");
  return FockState::from_coefficients(v);
}

// --- samples ----------------------------------------------------------------

inline std::string samples_to_csv(const PhaseSampleSet& s) {
  std::string out = "re,im\n";
  for (Complex z : s.samples) out += fmt(z.real()) + "," + fmt(z.imag()) + "\n";
  return out;
}

inline Json samples_sidecar(const PhaseSampleSet& s) {
  return {{"seed", s.seed}, {"source", to_string(s.source)}, {"count", s.size()}};
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p += ".json";
  return p;
}

inline void write_samples(const std::filesystem::path& csv, const PhaseSampleSet& s) {
  write_text(csv, samples_to_csv(s));
  write_text(sidecar_path(csv), samples_sidecar(s).dump(2) + "\n");
}

inline PhaseSampleSet samples_from_csv(const std::string& text) {
  PhaseSampleSet out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "re,im") throw InvalidArgument("samples CSV: line 1: expected header 're,im'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used = 0;
      const double re = std::stod(line.substr(0, comma), &used);
      const std::string rest = line.substr(comma + 1);
      std::size_t used2 = 0;
      const double im = std::stod(rest, &used2);
      if (used2 != rest.size()) throw std::invalid_argument("trailing text");
      out.samples.emplace_back(re, im);
    } catch (const std::exception&) {
      throw InvalidArgument("samples CSV: line " + std::to_string(lineno) + ": expected two numbers 're,im'");
    }
  }
  if (!header) throw InvalidArgument("samples CSV: missing header 're,im'");
  out.validate();
  out.source = SampleSource::external_file;
  return out;
}

/// Reads the CSV and, when present, the seed and source from its sidecar.
inline PhaseSampleSet read_samples(const std::filesystem::path& csv) {
  PhaseSampleSet s = samples_from_csv(read_text(csv));
  const auto side = sidecar_path(csv);
  if (std::filesystem::exists(side)) {
    const Json j = Json::parse(read_text(side));
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("source")) s.source = parse_sample_source(j["source"].get<std::string>());
  }
  return s;
}

// --- reports ----------------------------------------------------------------

inline Json to_json(const QcstVerificationReport& r) {
  return {{"grid", r.grid},
          {"max_amp_error", r.max_amp_error},
          {"ancilla_reset_fidelity", r.ancilla_reset_fidelity},
          {"squeeze_r", r.squeeze_r},
          {"per_mode_dim", r.per_mode_dim},
          {"reliable", r.reliable}};
}

inline Json to_json(const ReconstructionReport& r) {
  Json j = {{"psi_hat", state_to_json(r.psi_hat)},
            {"neg_log_likelihood", r.neg_log_likelihood},
            {"iterations", r.iterations},
            {"floored_events", r.floored_events},
            {"degenerate", r.degenerate},
            {"warnings", r.warnings}};
  j["l1_error"] = r.l1_error ? Json(*r.l1_error) : Json(nullptr);
  j["fidelity"] = r.fidelity ? Json(*r.fidelity) : Json(nullptr);
  return j;
}

inline Json to_json(const CalibrationResult& r) {
  return {{"truth", r.truth}, {"estimates", r.estimates}, {"rms", r.rms_error}, {"flags", r.flags}, {"seed", r.seed}};
}

/// `j,k,p_j,p_k,re,im,abs2` in circuit order.
inline std::string amplitude_grid_csv(const AmplitudeGrid& g, const WindowRegister& w) {
  std::string out = "j,k,p_j,p_k,re,im,abs2\n";
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t k = 0; k < g.n; ++k) {
      const Complex a = g.amps(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      out += std::to_string(j) + "," + std::to_string(k) + "," + fmt(w.momentum(j)) + "," + fmt(w.momentum(k)) + "," +
             fmt(a.real()) + "," + fmt(a.imag()) + "," + fmt(std::norm(a)) + "\n";
    }
  return out;
}

/// Column-named numeric table rendered as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    require(row.size() == columns.size(), "Table: row width does not match the header");
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + fmt(r[i]);
      out += "\n";
    }
    return out;
  }
};

}  // namespace qcst
