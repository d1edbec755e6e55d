// Experiment configuration: YAML files validated against per-experiment
// schemas, with every problem reported at its line and column.
//
//   experiment: fig5-windows
//   seed: 7
//   output: out/fig5
//   params:
//     n: 8
//     lambda: 0.5

#pragma once

#include "qcst/common.hpp"
#include "qcst/fock.hpp"
#include "qcst/io.hpp"

#include <yaml-cpp/yaml.h>

#include <map>
#include <optional>
#include <set>
#include <utility>

namespace qcst::lab {

struct ConfigIssue {
  int line = 0;    // 1-based; 0 when the problem has no location
  int column = 0;
  std::string message;

  std::string str() const {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }
};

/// Invalid configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues) : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ConfigIssue>& is) {
    std::string s;
    for (const auto& i : is) s += (s.empty() ? "" : "\n") + i.str();
    return s;
  }
  std::vector<ConfigIssue> issues_;
};

enum class ParamType { integer, real, integer_list, real_list, text, text_list };

struct ParamSpec {
  std::string name;
  ParamType type;
  Json default_value{};
  std::optional<double> min{};  // inclusive, applies to each numeric element
  std::optional<double> max{};
  bool min_exclusive = false;
  std::vector<std::string> choices{};  // for text parameters
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"fig2-squeeze",   "fig34-tomography", "fig5-windows",
                                               "fig67-discrete", "bs-calibration",   "rot-calibration",
                                               "disp-calibration", "qcst-verify",    "qgt-verify"};
  return ids;
}

/// Parameter schema of each experiment.
inline const std::vector<ParamSpec>& experiment_schema(const std::string& id) {
  using T = ParamType;
  static const std::map<std::string, std::vector<ParamSpec>> schemas = {
      {"fig2-squeeze",
       {{"ms", T::integer_list, Json{256, 1024, 4096}, 2.0, std::nullopt},
        {"alphas", T::real_list, Json{2.0, 4.0, 8.0}, 0.0, std::nullopt, true},
        {"reps", T::integer, 200, 1.0, std::nullopt}}},
      {"fig34-tomography",
       {{"states", T::text_list, Json{"fig3"}},
        {"ms", T::integer_list, Json{256, 512, 1024, 2048, 4096, 8192}, 1.0, std::nullopt},
        {"trials", T::integer, 50, 1.0, std::nullopt},
        {"gamma", T::integer, 32, 1.0, 64.0},
        {"restarts", T::integer, 8, 0.0, std::nullopt},
        {"max_iters", T::integer, 500, 1.0, std::nullopt},
        {"half_width", T::real, 5.0, 0.0, std::nullopt, true},
        {"step", T::real, 0.05, 0.0, 1.0, true},
        {"compare_m", T::integer, 1024, 1.0, std::nullopt},
        {"padua_degree", T::integer, 32, 1.0, 64.0},
        {"shots", T::integer, 1024, 1.0, std::nullopt}}},
      {"fig5-windows",
       {{"n", T::integer, 8, 2.0, 4096.0},
        {"lambda", T::real, 0.5, 0.0, std::nullopt, true},
        {"dp_points", T::integer, 201, 2.0, std::nullopt}}},
      {"fig67-discrete",
       {{"state", T::text, "fig3"},
        {"n", T::integer, 64, 2.0, 64.0},
        {"lambda", T::real, 0.5, 0.0, std::nullopt, true},
        {"window", T::text, "vacuum", std::nullopt, std::nullopt, false, {"vacuum", "unf", "sin"}},
        {"sweep_ns", T::integer_list, Json{16, 64}, 2.0, 64.0},
        {"n_lambdas", T::real_list, Json{2, 4, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48, 56, 64}, 0.0,
         std::nullopt, true}}},
      {"bs-calibration",
       {{"alphas", T::real_list, Json{2.0, 4.0, 8.0, 16.0}, 0.0, std::nullopt, true},
        {"theta", T::real, 0.7},
        {"phi", T::real, 1.1},
        {"trials", T::integer, 500, 2.0, std::nullopt}}},
      {"rot-calibration",
       {{"alphas", T::real_list, Json{2.0, 4.0, 8.0, 16.0}, 0.0, std::nullopt, true},
        {"theta", T::real, 0.9},
        {"trials", T::integer, 500, 2.0, std::nullopt}}},
      {"disp-calibration",
       {{"alpha", T::real_list, Json{1.0, 2.0}},
        {"lambdas", T::real_list, Json{1.0, 2.0, 4.0, 8.0}, 0.0, std::nullopt, true},
        {"trials", T::integer, 10000, 2.0, std::nullopt},
        {"dv_ns", T::integer_list, Json{16, 32, 64}, 2.0, 4096.0},
        {"dv_lambda", T::real, 0.5, 0.0, std::nullopt, true}}},
      {"qcst-verify",
       {{"states", T::text_list, Json{"vacuum", "fock:1", "coherent:0.5"}},
        {"dim", T::integer, 16, 8.0, 24.0},
        {"grid_min", T::real, -3.0},
        {"grid_max", T::real, 3.0},
        {"grid_step", T::real, 0.5, 0.0, std::nullopt, true}}},
      {"qgt-verify",
       {{"states", T::text_list, Json{"vacuum", "fock:2"}},
        {"r", T::real, 0.4, -0.7, 0.7},
        {"dim", T::integer, 24, 16.0, 28.0},
        {"grid_min", T::real, -3.0},
        {"grid_max", T::real, 3.0},
        {"grid_step", T::real, 0.5, 0.0, std::nullopt, true}}},
  };
  const auto it = schemas.find(id);
  require(it != schemas.end(), "no schema for experiment '" + id + "'");
  return it->second;
}

/// Named test states: vacuum, fock:<n>, coherent:<re>[:<im>], fig3
/// ((|0> + |4>)/2 + i|2>/sqrt2) and fock13 ((|1> + |3>)/sqrt2).
inline FockState parse_state_spec(const std::string& spec, std::size_t dim = 32) {
  const auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw InvalidArgument("bad number '" + s + "' in state '" + spec + "'");
    return v;
  };
  if (spec == "vacuum") return FockState::vacuum(dim);
  if (spec == "fig3") {
    CVector c = CVector::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(dim, 5)));
    c[0] = 0.5;
    c[4] = 0.5;
    c[2] = Complex{0.0, 1.0 / std::sqrt(2.0)};
    return FockState::from_coefficients(c);
  }
  if (spec == "fock13") {
    CVector c = CVector::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(dim, 4)));
    c[1] = c[3] = 1.0 / std::sqrt(2.0);
    return FockState::from_coefficients(c);
  }
  if (spec.rfind("fock:", 0) == 0) {
    const double n = num(spec.substr(5));
    if (n < 0 || n != std::floor(n) || n >= static_cast<double>(dim))
      throw InvalidArgument("state '" + spec + "': level must be an integer in [0, " + std::to_string(dim) + ")");
    return FockState::number(static_cast<std::size_t>(n), dim);
  }
  if (spec.rfind("coherent:", 0) == 0) {
    const std::string rest = spec.substr(9);
    const auto colon = rest.find(':');
    const double re = num(rest.substr(0, colon));
    const double im = colon == std::string::npos ? 0.0 : num(rest.substr(colon + 1));
    return make_coherent({re, im}, dim);
  }
  throw InvalidArgument("unknown state '" + spec + "' (expected vacuum, fock:<n>, coherent:<re>[:<im>], fig3, fock13)");
}

struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 0;
  std::string output;
  Json params = Json::object();  // schema-complete: defaults filled in

  long long integer(const std::string& k) const { return params.at(k).get<long long>(); }
  double real(const std::string& k) const { return params.at(k).get<double>(); }
  std::string text(const std::string& k) const { return params.at(k).get<std::string>(); }
  std::vector<double> reals(const std::string& k) const { return params.at(k).get<std::vector<double>>(); }
  std::vector<long long> integers(const std::string& k) const { return params.at(k).get<std::vector<long long>>(); }
  std::vector<std::string> texts(const std::string& k) const { return params.at(k).get<std::vector<std::string>>(); }

  Json to_json() const { return {{"experiment", id}, {"seed", seed}, {"output", output}, {"params", params}}; }
};

struct ConfigValidation {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> errors;
  bool ok() const { return config.has_value(); }
};

namespace detail {

inline ConfigIssue issue_at(const YAML::Node& n, std::string msg) {
  const YAML::Mark m = n.Mark();
  return {m.line + 1, m.column + 1, std::move(msg)};
}

inline std::optional<double> scalar_number(const YAML::Node& n, bool integral) {
  if (!n.IsScalar()) return std::nullopt;
  try {
    if (integral) {
      const auto v = n.as<long long>();
      return static_cast<double>(v);
    }
    const double v = n.as<double>();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const YAML::Exception&) {
    return std::nullopt;
  }
}

inline std::string range_text(const ParamSpec& s) {
  std::string r;
  if (s.min) r += (s.min_exclusive ? "> " : ">= ") + fmt(*s.min);
  if (s.max) r += (r.empty() ? "" : " and ") + std::string("<= ") + fmt(*s.max);
  return r;
}

inline bool in_range(const ParamSpec& s, double v) {
  if (s.min && (s.min_exclusive ? !(v > *s.min) : !(v >= *s.min))) return false;
  if (s.max && !(v <= *s.max)) return false;
  return true;
}

/// Checks one parameter node; appends issues and returns the JSON value on success.
inline std::optional<Json> check_param(const ParamSpec& s, const YAML::Node& n, std::vector<ConfigIssue>& errs) {
  const bool integral = s.type == ParamType::integer || s.type == ParamType::integer_list;
  const auto bad = [&](const YAML::Node& at, const std::string& what) {
    errs.push_back(issue_at(at, "params." + s.name + ": " + what));
    return std::optional<Json>{};
  };
  switch (s.type) {
    case ParamType::integer:
    case ParamType::real: {
      const auto v = scalar_number(n, integral);
      if (!v) return bad(n, integral ? "expected an integer" : "expected a number");
      if (!in_range(s, *v)) return bad(n, "value " + fmt(*v) + " out of range (must be " + range_text(s) + ")");
      return integral ? Json(static_cast<long long>(*v)) : Json(*v);
    }
    case ParamType::integer_list:
    case ParamType::real_list: {
      if (!n.IsSequence() || n.size() == 0) return bad(n, "expected a non-empty list");
      Json out = Json::array();
      bool okay = true;
      for (const auto& e : n) {
        const auto v = scalar_number(e, integral);
        if (!v) {
          bad(e, integral ? "list entries must be integers" : "list entries must be numbers");
          okay = false;
        } else if (!in_range(s, *v)) {
          bad(e, "entry " + fmt(*v) + " out of range (must be " + range_text(s) + ")");
          okay = false;
        } else {
          out.push_back(integral ? Json(static_cast<long long>(*v)) : Json(*v));
        }
      }
      if (!okay) return std::nullopt;
      return out;
    }
    case ParamType::text: {
      if (!n.IsScalar()) return bad(n, "expected a string");
      const auto v = n.as<std::string>();
      if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
        std::string opts;
        for (const auto& c : s.choices) opts += (opts.empty() ? "" : ", ") + c;
        return bad(n, "'" + v + "' is not one of: " + opts);
      }
      return Json(v);
    }
    case ParamType::text_list: {
      if (!n.IsSequence() || n.size() == 0) return bad(n, "expected a non-empty list of strings");
      Json out = Json::array();
      for (const auto& e : n) {
        if (!e.IsScalar()) return bad(e, "list entries must be strings");
        out.push_back(e.as<std::string>());
      }
      return out;
    }
  }
  return std::nullopt;
}

/// Semantic checks that span parameters or need the state parser.
inline void check_semantics(const std::string& id, const YAML::Node& params, const Json& p,
                            std::vector<ConfigIssue>& errs) {
  const auto at = [&](const std::string& k) { return params && params[k] ? params[k] : params; };
  const auto check_states = [&](const std::string& key) {
    if (!p.contains(key)) return;
    const Json& v = p[key];
    const std::vector<std::string> names = v.is_array() ? v.get<std::vector<std::string>>()
                                                        : std::vector<std::string>{v.get<std::string>()};
    for (const auto& s : names) {
      try {
        parse_state_spec(s);
      } catch (const InvalidArgument& e) {
        errs.push_back(issue_at(at(key), "params." + key + ": " + e.what()));
      }
    }
  };
  check_states("states");
  check_states("state");
  if (p.contains("grid_min") && p.contains("grid_max") && !(p["grid_min"].get<double>() < p["grid_max"].get<double>()))
    errs.push_back(issue_at(at("grid_max"), "params.grid_max must exceed params.grid_min"));
  const auto pow2 = [&](const std::string& key) {
    if (!p.contains(key)) return;
    const Json& v = p[key];
    const std::vector<long long> ns = v.is_array() ? v.get<std::vector<long long>>()
                                                   : std::vector<long long>{v.get<long long>()};
    for (long long n : ns)
      if (!is_power_of_two(static_cast<std::size_t>(n)))
        errs.push_back(issue_at(at(key), "params." + key + ": " + std::to_string(n) + " is not a power of two"));
  };
  if (id == "fig5-windows" || id == "fig67-discrete") pow2("n");
  if (id == "fig67-discrete") pow2("sweep_ns");
  if (id == "disp-calibration") {
    pow2("dv_ns");
    if (p.contains("alpha") && p["alpha"].size() != 2)
      errs.push_back(issue_at(at("alpha"), "params.alpha must be [re, im]"));
  }
}

}  // namespace detail

/// Parses and validates a configuration; every problem is collected.
inline ConfigValidation validate_config(const std::string& text) {
  ConfigValidation out;
  auto& errs = out.errors;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    errs.push_back({e.mark.line + 1, e.mark.column + 1, "YAML syntax error: " + e.msg});
    return out;
  }
  if (!root.IsMap()) {
    errs.push_back({root ? root.Mark().line + 1 : 1, 1, "config must be a mapping with an 'experiment' key"});
    return out;
  }

  ExperimentConfig cfg;
  static const std::set<std::string> top_keys = {"experiment", "seed", "output", "params"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!top_keys.count(key))
      errs.push_back(detail::issue_at(kv.first, "unknown key '" + key + "' (expected experiment, seed, output, params)"));
  }

  std::string all_ids;
  for (const auto& i : experiment_ids()) all_ids += (all_ids.empty() ? "" : ", ") + i;
  const YAML::Node exp = root["experiment"];
  bool id_ok = false;
  if (!exp) {
    errs.push_back({1, 1, "missing 'experiment' (one of: " + all_ids + ")"});
  } else if (!exp.IsScalar()) {
    errs.push_back(detail::issue_at(exp, "'experiment' must be a string"));
  } else {
    cfg.id = exp.as<std::string>();
    const auto& ids = experiment_ids();
    id_ok = std::find(ids.begin(), ids.end(), cfg.id) != ids.end();
    if (!id_ok) errs.push_back(detail::issue_at(exp, "unknown experiment '" + cfg.id + "' (valid: " + all_ids + ")"));
  }

  if (const YAML::Node s = root["seed"]) {
    std::optional<std::uint64_t> v;
    if (s.IsScalar()) {
      try {
        const auto str = s.as<std::string>();
        if (!str.empty() && str[0] != '-') v = s.as<std::uint64_t>();
      } catch (const YAML::Exception&) {
      }
    }
    if (v)
      cfg.seed = *v;
    else
      errs.push_back(detail::issue_at(s, "'seed' must be a non-negative integer"));
  }
  if (const YAML::Node o = root["output"]) {
    if (o.IsScalar() && !o.as<std::string>().empty())
      cfg.output = o.as<std::string>();
    else
      errs.push_back(detail::issue_at(o, "'output' must be a non-empty path"));
  } else if (id_ok) {
    cfg.output = "out/" + cfg.id;
  }

  const YAML::Node params = root["params"];
  if (params && !params.IsMap() && !params.IsNull())
    errs.push_back(detail::issue_at(params, "'params' must be a mapping"));

  if (id_ok) {
    const auto& schema = experiment_schema(cfg.id);
    if (params && params.IsMap()) {
      for (const auto& kv : params) {
        const auto key = kv.first.as<std::string>();
        const bool known = std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& s) { return s.name == key; });
        if (!known) {
          std::string names;
          for (const auto& s : schema) names += (names.empty() ? "" : ", ") + s.name;
          errs.push_back(detail::issue_at(kv.first, "unknown parameter '" + key + "' for " + cfg.id + " (expected: " + names + ")"));
        }
      }
    }
    for (const auto& s : schema) {
      const bool present = params && params.IsMap() && std::as_const(params)[s.name].IsDefined();
      const YAML::Node n = present ? YAML::Node(std::as_const(params)[s.name]) : YAML::Node();
      if (!present) {
        cfg.params[s.name] = s.default_value;
      } else if (auto v = detail::check_param(s, n, errs)) {
        cfg.params[s.name] = *v;
      }
    }
    if (errs.empty()) detail::check_semantics(cfg.id, params, cfg.params, errs);
  }

  if (errs.empty()) out.config = std::move(cfg);
  return out;
}

/// validate_config that throws ConfigError on any problem.
inline ExperimentConfig parse_config(const std::string& text) {
  ConfigValidation v = validate_config(text);
  if (!v.ok()) throw ConfigError(std::move(v.errors));
  return std::move(*v.config);
}

/// Canonical YAML rendering; validate_config(render_config(c)) reproduces c.
inline std::string render_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap << YAML::Key << "experiment" << YAML::Value << c.id << YAML::Key << "seed" << YAML::Value
    << c.seed << YAML::Key << "output" << YAML::Value << c.output << YAML::Key << "params" << YAML::Value
    << YAML::BeginMap;
  for (const auto& [k, v] : c.params.items()) {
    e << YAML::Key << k << YAML::Value;
    if (v.is_array()) {
      e << YAML::Flow << YAML::BeginSeq;
      for (const auto& x : v) {
        if (x.is_string())
          e << x.get<std::string>();
        else if (x.is_number_integer())
          e << x.get<long long>();
        else
          e << fmt(x.get<double>());
      }
      e << YAML::EndSeq;
    } else if (v.is_string()) {
      e << v.get<std::string>();
    } else if (v.is_number_integer()) {
      e << v.get<long long>();
    } else {
      e << fmt(v.get<double>());
    }
  }
  e << YAML::EndMap << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace qcst::lab
