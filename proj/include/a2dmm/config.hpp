#ifndef A2DMM_CONFIG_HPP_
#define A2DMM_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "a2dmm/engine.hpp"
#include "a2dmm/errors.hpp"
#include "a2dmm/format.hpp"
#include "a2dmm/params.hpp"
#include "a2dmm/spectra.hpp"
#include "a2dmm/topology.hpp"

namespace a2dmm {

// Flat "key = value" lines grouped under [section] headers; '#' starts a comment.

struct IniEntry {
  std::string key;
  std::string value;
  std::size_t line;
};

struct IniSection {
  std::string name;
  std::size_t line;
  std::vector<IniEntry> entries;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const IniEntry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::logic_error&) {
    throw ConfigError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
  if (used != e.value.size()) throw ConfigError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const IniEntry& e) {
  if (e.value.empty() || e.value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(e.line, "'" + e.key + "' expects a non-negative integer, got '" + e.value + "'");
  }
  try {
    return std::stoull(e.value);
  } catch (const std::logic_error&) {
    throw ConfigError(e.line, "'" + e.key + "' is out of range");
  }
}

inline bool parse_bool(const IniEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError(e.line, "'" + e.key + "' expects true or false");
}

}  // namespace detail

inline std::vector<IniSection> read_ini(std::istream& is) {
  std::vector<IniSection> sections;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      sections.push_back({detail::trim(line.substr(1, line.size() - 2)), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (sections.empty()) throw ConfigError(line_no, "key outside of any [section]");
    IniEntry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) throw ConfigError(line_no, "empty key");
    for (const auto& prev : sections.back().entries) {
      if (prev.key == e.key) throw ConfigError(line_no, "duplicate key '" + e.key + "'");
    }
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

struct ProblemConfig {
  enum class Type { kQuadratic, kLogistic };
  Type type = Type::kQuadratic;
  std::size_t nodes = 0;
  std::size_t dimension = 2;
  std::uint64_t seed = 1;
  double eig_min = 1.0;
  double eig_max = 5.0;
  double a_min = -10.0;
  double a_max = 20.0;
  std::size_t points_per_node = 10;
  double C = 1.0;

  bool operator==(const ProblemConfig&) const = default;
};

struct GraphConfig {
  //! Edge-list file; when set the proximity generator is not used.
  std::optional<std::string> file;
  std::uint64_t seed = 1;
  double r_min = 0.1;
  double r_max = 0.17;
  double side = 2.0;
  std::size_t max_attempts = 100;

  bool operator==(const GraphConfig&) const = default;
};

struct RunConfig {
  std::size_t iterations = 500;
  InitMode::Kind init = InitMode::Kind::kZero;
  std::uint64_t init_seed = 0;
  bool early_stop = false;
  double fit_window_lo = 0.2;
  double fit_window_hi = 0.8;

  bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  GraphConfig graph;
  RunConfig run;
  std::vector<AlgorithmConfig> algorithms;
  std::string output_dir = "results";
  //! Soft-range notes collected while parsing; not part of the configuration value.
  std::vector<std::string> warnings;

  bool operator==(const ExperimentConfig& o) const {
    return problem == o.problem && graph == o.graph && run == o.run && algorithms == o.algorithms &&
           output_dir == o.output_dir;
  }
};

inline constexpr const char* kRequiredKeys =
    "[problem] type, [problem] nodes, [run] iterations, and at least one [algorithm] section with name and gamma";

/// Parses and validates an experiment configuration.
///
/// Hard errors: syntax, unknown sections or keys, missing required keys,
/// gamma or rho <= 0, alpha outside (0,1), epsilon outside (0,1]. Momentum
/// values outside (1,2) only produce warnings.
inline ExperimentConfig parse_config(std::istream& is) {
  const std::vector<IniSection> sections = read_ini(is);
  if (sections.empty()) throw ConfigError(0, std::string("empty configuration; required keys: ") + kRequiredKeys);

  ExperimentConfig cfg;
  bool have_type = false, have_nodes = false, have_iterations = false;
  auto unknown = [](const IniEntry& e, const std::string& section) {
    throw ConfigError(e.line, "unknown key '" + e.key + "' in [" + section + "]");
  };

  for (const auto& sec : sections) {
    if (sec.name == "problem") {
      for (const auto& e : sec.entries) {
        if (e.key == "type") {
          if (e.value == "quadratic") cfg.problem.type = ProblemConfig::Type::kQuadratic;
          else if (e.value == "logistic") cfg.problem.type = ProblemConfig::Type::kLogistic;
          else throw ConfigError(e.line, "problem type must be quadratic or logistic");
          have_type = true;
        } else if (e.key == "nodes") {
          cfg.problem.nodes = detail::parse_unsigned(e);
          if (cfg.problem.nodes == 0) throw ConfigError(e.line, "nodes must be >= 1");
          have_nodes = true;
        } else if (e.key == "dimension") {
          cfg.problem.dimension = detail::parse_unsigned(e);
          if (cfg.problem.dimension == 0) throw ConfigError(e.line, "dimension must be >= 1");
        } else if (e.key == "seed") {
          cfg.problem.seed = detail::parse_unsigned(e);
        } else if (e.key == "eig_min") {
          cfg.problem.eig_min = detail::parse_double(e);
        } else if (e.key == "eig_max") {
          cfg.problem.eig_max = detail::parse_double(e);
        } else if (e.key == "a_min") {
          cfg.problem.a_min = detail::parse_double(e);
        } else if (e.key == "a_max") {
          cfg.problem.a_max = detail::parse_double(e);
        } else if (e.key == "points_per_node") {
          cfg.problem.points_per_node = detail::parse_unsigned(e);
          if (cfg.problem.points_per_node == 0) throw ConfigError(e.line, "points_per_node must be >= 1");
        } else if (e.key == "C") {
          cfg.problem.C = detail::parse_double(e);
          if (!(cfg.problem.C > 0.0)) throw ConfigError(e.line, "C must be > 0");
        } else {
          unknown(e, sec.name);
        }
      }
      if (!(cfg.problem.eig_min > 0.0 && cfg.problem.eig_min <= cfg.problem.eig_max)) {
        throw ConfigError(sec.line, "eigenvalue range must satisfy 0 < eig_min <= eig_max");
      }
      if (!(cfg.problem.a_min <= cfg.problem.a_max)) throw ConfigError(sec.line, "a_min must be <= a_max");
    } else if (sec.name == "graph") {
      for (const auto& e : sec.entries) {
        if (e.key == "file") cfg.graph.file = e.value;
        else if (e.key == "seed") cfg.graph.seed = detail::parse_unsigned(e);
        else if (e.key == "r_min") cfg.graph.r_min = detail::parse_double(e);
        else if (e.key == "r_max") cfg.graph.r_max = detail::parse_double(e);
        else if (e.key == "side") cfg.graph.side = detail::parse_double(e);
        else if (e.key == "max_attempts") cfg.graph.max_attempts = detail::parse_unsigned(e);
        else unknown(e, sec.name);
      }
      if (!(cfg.graph.r_min > 0.0 && cfg.graph.r_min < cfg.graph.r_max && cfg.graph.r_max < cfg.graph.side)) {
        throw ConfigError(sec.line, "graph radii must satisfy 0 < r_min < r_max < side");
      }
    } else if (sec.name == "run") {
      for (const auto& e : sec.entries) {
        if (e.key == "iterations") {
          cfg.run.iterations = detail::parse_unsigned(e);
          have_iterations = true;
        } else if (e.key == "init") {
          if (e.value == "zero") cfg.run.init = InitMode::Kind::kZero;
          else if (e.value == "random") cfg.run.init = InitMode::Kind::kRandom;
          else throw ConfigError(e.line, "init must be zero or random");
        } else if (e.key == "init_seed") {
          cfg.run.init_seed = detail::parse_unsigned(e);
        } else if (e.key == "early_stop") {
          cfg.run.early_stop = detail::parse_bool(e);
        } else if (e.key == "fit_window_lo") {
          cfg.run.fit_window_lo = detail::parse_double(e);
        } else if (e.key == "fit_window_hi") {
          cfg.run.fit_window_hi = detail::parse_double(e);
        } else {
          unknown(e, sec.name);
        }
      }
      if (!(cfg.run.fit_window_lo >= 0.0 && cfg.run.fit_window_lo < cfg.run.fit_window_hi &&
            cfg.run.fit_window_hi <= 1.0)) {
        throw ConfigError(sec.line, "fit window must satisfy 0 <= lo < hi <= 1");
      }
    } else if (sec.name == "output") {
      for (const auto& e : sec.entries) {
        if (e.key == "dir") cfg.output_dir = e.value;
        else unknown(e, sec.name);
      }
    } else if (sec.name == "algorithm") {
      AlgorithmConfig alg;
      bool have_name = false, have_gamma = false;
      for (const auto& e : sec.entries) {
        if (e.key == "name") {
          try {
            alg.algorithm = parse_algorithm(e.value);
          } catch (const Error& err) {
            throw ConfigError(e.line, err.what());
          }
          have_name = true;
        } else if (e.key == "label") {
          alg.label = e.value;
        } else if (e.key == "gamma") {
          alg.params.gamma = detail::parse_double(e);
          have_gamma = true;
        } else if (e.key == "rho") {
          alg.params.rho = detail::parse_double(e);
        } else if (e.key == "alpha") {
          alg.params.alpha = detail::parse_double(e);
        } else if (e.key == "lambda") {
          alg.params.lambda = detail::parse_double(e);
        } else if (e.key == "mu") {
          alg.params.mu = detail::parse_double(e);
        } else if (e.key == "epsilon") {
          alg.params.epsilon = detail::parse_double(e);
        } else if (e.key == "z_index") {
          if (e.value == "neighbor") alg.params.z_index = ZIndexConvention::kNeighbor;
          else if (e.value == "own") alg.params.z_index = ZIndexConvention::kOwn;
          else throw ConfigError(e.line, "z_index must be neighbor or own");
        } else {
          unknown(e, sec.name);
        }
      }
      if (!have_name) throw ConfigError(sec.line, "[algorithm] requires 'name'");
      if (!have_gamma) throw ConfigError(sec.line, "[algorithm] requires 'gamma'");
      if (alg.label.empty()) alg.label = std::string(algorithm_name(alg.algorithm));
      try {
        if (alg.algorithm == Algorithm::kDiging) {
          if (!(alg.params.gamma > 0.0)) throw ParameterOutOfRange("gamma must be > 0");
        } else {
          for (auto& w : validate_params(alg.params)) {
            // Momentum warnings only concern the accelerated method.
            if (alg.algorithm == Algorithm::kA2dmmGt || w.rfind("own", 0) == 0) {
              cfg.warnings.push_back(alg.label + ": " + w);
            }
          }
        }
      } catch (const ParameterOutOfRange& err) {
        throw ConfigError(sec.line, alg.label + ": " + err.what());
      }
      cfg.algorithms.push_back(std::move(alg));
    } else {
      throw ConfigError(sec.line, "unknown section [" + sec.name + "]");
    }
  }

  std::vector<std::string> missing;
  if (!have_type) missing.push_back("[problem] type");
  if (!have_nodes) missing.push_back("[problem] nodes");
  if (!have_iterations) missing.push_back("[run] iterations");
  if (cfg.algorithms.empty()) missing.push_back("[algorithm] section");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m + ",";
    msg.pop_back();
    throw ConfigError(0, msg);
  }
  if (cfg.problem.type == ProblemConfig::Type::kLogistic && cfg.problem.dimension != 2) {
    throw ConfigError(0, "logistic problems have dimension 2");
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline void emit_config(std::ostream& os, const ExperimentConfig& cfg) {
  const auto& p = cfg.problem;
  os << "[problem]\n";
  os << "type = " << (p.type == ProblemConfig::Type::kQuadratic ? "quadratic" : "logistic") << '\n';
  os << "nodes = " << p.nodes << '\n';
  os << "dimension = " << p.dimension << '\n';
  os << "seed = " << p.seed << '\n';
  os << "eig_min = " << format_number(p.eig_min) << '\n';
  os << "eig_max = " << format_number(p.eig_max) << '\n';
  os << "a_min = " << format_number(p.a_min) << '\n';
  os << "a_max = " << format_number(p.a_max) << '\n';
  os << "points_per_node = " << p.points_per_node << '\n';
  os << "C = " << format_number(p.C) << '\n';
  os << "\n[graph]\n";
  if (cfg.graph.file) os << "file = " << *cfg.graph.file << '\n';
  os << "seed = " << cfg.graph.seed << '\n';
  os << "r_min = " << format_number(cfg.graph.r_min) << '\n';
  os << "r_max = " << format_number(cfg.graph.r_max) << '\n';
  os << "side = " << format_number(cfg.graph.side) << '\n';
  os << "max_attempts = " << cfg.graph.max_attempts << '\n';
  os << "\n[run]\n";
  os << "iterations = " << cfg.run.iterations << '\n';
  os << "init = " << (cfg.run.init == InitMode::Kind::kZero ? "zero" : "random") << '\n';
  os << "init_seed = " << cfg.run.init_seed << '\n';
  os << "early_stop = " << (cfg.run.early_stop ? "true" : "false") << '\n';
  os << "fit_window_lo = " << format_number(cfg.run.fit_window_lo) << '\n';
  os << "fit_window_hi = " << format_number(cfg.run.fit_window_hi) << '\n';
  os << "\n[output]\ndir = " << cfg.output_dir << '\n';
  for (const auto& a : cfg.algorithms) {
    os << "\n[algorithm]\n";
    os << "name = " << algorithm_name(a.algorithm) << '\n';
    os << "label = " << a.label << '\n';
    os << "gamma = " << format_number(a.params.gamma) << '\n';
    os << "rho = " << format_number(a.params.rho) << '\n';
    os << "alpha = " << format_number(a.params.alpha) << '\n';
    os << "lambda = " << format_number(a.params.lambda) << '\n';
    os << "mu = " << format_number(a.params.mu) << '\n';
    os << "epsilon = " << format_number(a.params.epsilon) << '\n';
    os << "z_index = " << (a.params.z_index == ZIndexConvention::kNeighbor ? "neighbor" : "own") << '\n';
  }
}

//! Grid over an open interval: `count` cell midpoints, or the single value when lo == hi.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 10;

  bool operator==(const GridSpec&) const = default;
};

struct ScanConfig {
  GridSpec alpha{0.0, 1.0, 10};
  GridSpec epsilon{0.0, 1.0, 10};
  GridSpec mu{1.0, 2.0, 10};
  std::string output_dir = "results";

  bool operator==(const ScanConfig&) const = default;
};

inline ScanConfig parse_scan_config(std::istream& is) {
  const auto sections = read_ini(is);
  if (sections.empty()) throw ConfigError(0, "empty scan configuration; expected a [scan] section");
  ScanConfig cfg;
  for (const auto& sec : sections) {
    if (sec.name == "output") {
      for (const auto& e : sec.entries) {
        if (e.key == "dir") cfg.output_dir = e.value;
        else throw ConfigError(e.line, "unknown key '" + e.key + "' in [output]");
      }
      continue;
    }
    if (sec.name != "scan") throw ConfigError(sec.line, "unknown section [" + sec.name + "]");
    for (const auto& e : sec.entries) {
      const auto us = e.key.rfind('_');
      GridSpec* grid = nullptr;
      const std::string axis = us == std::string::npos ? e.key : e.key.substr(0, us);
      const std::string field = us == std::string::npos ? "" : e.key.substr(us + 1);
      if (axis == "alpha") grid = &cfg.alpha;
      else if (axis == "epsilon") grid = &cfg.epsilon;
      else if (axis == "mu") grid = &cfg.mu;
      if (grid == nullptr || (field != "min" && field != "max" && field != "count")) {
        throw ConfigError(e.line, "unknown key '" + e.key + "' in [scan]");
      }
      if (field == "min") grid->lo = detail::parse_double(e);
      else if (field == "max") grid->hi = detail::parse_double(e);
      else grid->count = detail::parse_unsigned(e);
    }
  }
  return cfg;
}

inline std::vector<double> expand_grid(const GridSpec& g) {
  if (g.count == 0) throw ParameterOutOfRange("grid count must be >= 1");
  if (g.hi < g.lo) throw ParameterOutOfRange("grid bounds must be ordered");
  return open_grid(g.lo, g.hi, g.count);
}

}  // namespace a2dmm

#endif  // A2DMM_CONFIG_HPP_
