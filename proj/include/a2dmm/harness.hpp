#ifndef A2DMM_HARNESS_HPP_
#define A2DMM_HARNESS_HPP_

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "a2dmm/config.hpp"
#include "a2dmm/costs.hpp"
#include "a2dmm/engine.hpp"
#include "a2dmm/operator_forms.hpp"
#include "a2dmm/plot.hpp"
#include "a2dmm/spectra.hpp"
#include "a2dmm/topology.hpp"

namespace a2dmm {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDivergence = 2, kExitIo = 3 };

struct Instance {
  Graph graph;
  CostEnsemble costs;
  Vector x_star;
};

inline Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

inline Instance build_instance(const ExperimentConfig& cfg) {
  Instance inst;
  if (cfg.graph.file) {
    inst.graph = load_graph_file(*cfg.graph.file);
    const auto violations = validate_graph(inst.graph);
    if (!violations.empty()) throw ConfigError(0, "graph file: " + violations.front().message);
    if (inst.graph.node_count != cfg.problem.nodes) {
      throw ConfigError(0, "graph file has " + std::to_string(inst.graph.node_count) + " nodes, problem expects " +
                               std::to_string(cfg.problem.nodes));
    }
  } else {
    ProximityOptions opt;
    opt.r_min = cfg.graph.r_min;
    opt.r_max = cfg.graph.r_max;
    opt.side = cfg.graph.side;
    opt.max_attempts = cfg.graph.max_attempts;
    inst.graph = generate_proximity_graph(cfg.problem.nodes, cfg.graph.seed, opt);
  }
  const auto& p = cfg.problem;
  if (p.type == ProblemConfig::Type::kQuadratic) {
    inst.costs = make_quadratic_ensemble(p.nodes, p.dimension, p.seed, {p.eig_min, p.eig_max, p.a_min, p.a_max});
  } else {
    inst.costs = make_logistic_ensemble(p.nodes, p.points_per_node, p.seed, p.C);
  }
  inst.x_star = central_optimum(inst.costs);
  return inst;
}

struct SimulateOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::optional<double> gamma, rho, alpha, lambda, mu, epsilon;
};

//! Applies command-line overrides; parameter overrides hit every algorithm.
inline ExperimentConfig apply_overrides(ExperimentConfig cfg, const SimulateOverrides& o) {
  if (o.out) cfg.output_dir = *o.out;
  if (o.seed) {
    cfg.problem.seed = *o.seed;
    cfg.graph.seed = *o.seed;
  }
  if (o.iterations) cfg.run.iterations = *o.iterations;
  for (auto& a : cfg.algorithms) {
    if (o.gamma) a.params.gamma = *o.gamma;
    if (o.rho) a.params.rho = *o.rho;
    if (o.alpha) a.params.alpha = *o.alpha;
    if (o.lambda) a.params.lambda = *o.lambda;
    if (o.mu) a.params.mu = *o.mu;
    if (o.epsilon) a.params.epsilon = *o.epsilon;
    try {
      if (a.algorithm == Algorithm::kDiging) {
        if (!(a.params.gamma > 0.0)) throw ParameterOutOfRange("gamma must be > 0");
      } else {
        validate_params(a.params);
      }
    } catch (const ParameterOutOfRange& e) {
      throw ConfigError(0, a.label + ": " + e.what());
    }
  }
  return cfg;
}

//! Lower-case alphanumerics with '_' for everything else.
inline std::string file_stem(const std::string& label) {
  std::string out;
  for (unsigned char c : label) out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
  return out.empty() ? "series" : out;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

inline void close_output(std::ofstream& f, const std::filesystem::path& path) {
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

}  // namespace detail

/// Runs every configured algorithm on one instance and writes
/// trace_<label>.csv per algorithm, summary.csv, error.svg, plus the graph,
/// ensemble and effective configuration for replay.
inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  for (const auto& w : cfg.warnings) err << "warning: " << w << '\n';
  const Instance inst = build_instance(cfg);
  RunOptions opt;
  opt.iterations = cfg.run.iterations;
  opt.init = cfg.run.init == InitMode::Kind::kZero ? InitMode::zero() : InitMode::random(cfg.run.init_seed);
  opt.early_stop = cfg.run.early_stop;
  const auto rows = compare(inst.graph, inst.costs, cfg.algorithms, opt, inst.x_star, cfg.run.fit_window_lo,
                            cfg.run.fit_window_hi);

  const std::filesystem::path dir(cfg.output_dir);
  detail::ensure_directory(dir);
  std::vector<PlotSeries> series;
  for (const auto& r : rows) {
    const auto path = dir / ("trace_" + file_stem(r.label) + ".csv");
    auto f = detail::open_output(path);
    write_trace_csv(f, r.trace);
    detail::close_output(f, path);
    series.push_back({r.label, &r.trace});
  }
  {
    const auto path = dir / "summary.csv";
    auto f = detail::open_output(path);
    write_comparison_csv(f, rows);
    detail::close_output(f, path);
  }
  {
    const auto path = dir / "error.svg";
    auto f = detail::open_output(path);
    write_error_svg(f, series, "error vs iteration (N = " + std::to_string(inst.graph.node_count) + ")");
    detail::close_output(f, path);
  }
  {
    const auto path = dir / "graph.txt";
    auto f = detail::open_output(path);
    write_edge_list(f, inst.graph);
    detail::close_output(f, path);
  }
  {
    const auto path = dir / "ensemble.txt";
    auto f = detail::open_output(path);
    write_ensemble(f, inst.costs);
    detail::close_output(f, path);
  }
  {
    const auto path = dir / "config.cfg";
    auto f = detail::open_output(path);
    emit_config(f, cfg);
    detail::close_output(f, path);
  }

  out << "graph: " << inst.graph.node_count << " nodes, " << inst.graph.edge_count() << " edges\n";
  out << std::left << std::setw(16) << "label" << std::setw(16) << "final_error" << std::setw(14) << "c2"
      << std::setw(12) << "r_squared" << "t(1e-6)\n";
  bool diverged = false;
  for (const auto& r : rows) {
    out << std::setw(16) << r.label << std::setw(16) << r.final_error << std::setw(14) << r.c2 << std::setw(12)
        << r.r_squared << (r.iterations_to_threshold ? std::to_string(*r.iterations_to_threshold) : "-");
    if (r.diverged) {
      out << "  DIVERGED at t=" << *r.trace.diverged_at;
      err << "error: " << r.label << " diverged at iteration " << *r.trace.diverged_at << '\n';
      diverged = true;
    }
    out << '\n';
  }
  out << "wrote " << dir.string() << '\n';
  return diverged ? kExitDivergence : kExitOk;
}

inline std::string format_complex(const Complex& z) {
  std::ostringstream os;
  os.precision(6);
  if (std::abs(z.imag()) < 1e-14) {
    os << z.real();
  } else {
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  }
  return os.str();
}

/// Prints rates and verdicts; with a graph, also compares the closed-form
/// roots against a dense eigensolve of the assembled L.
inline int cmd_spectra(double alpha, double epsilon, double mu, const std::optional<Graph>& graph, std::size_t n,
                       std::ostream& out, std::ostream& err) {
  const SpectralReport rep = closed_form_spectrum(mu, epsilon, alpha);
  out.precision(6);
  out << "alpha = " << alpha << ", epsilon = " << epsilon << ", mu = " << mu << '\n';
  for (const auto& br : rep.branches) {
    out << "branch phi = " << br.phi << ": roots " << format_complex(br.roots[0]) << ", "
        << format_complex(br.roots[1]) << '\n';
  }
  out << "beta1 = " << rep.beta1 << " (with integral mode: " << rep.beta1_with_integral << ")\n";
  out << "beta2 = " << rep.beta2 << " (with integral mode: " << rep.beta2_with_integral << ")\n";
  out << "unit eigenvalue present = " << (rep.unit_eigenvalue_present ? "true" : "false") << '\n';
  out << "stable = " << (rep.stable ? "true" : "false") << '\n';
  out << "accelerated = " << (rep.accelerated ? "true" : "false") << '\n';
  if (graph) {
    const auto violations = validate_graph(*graph);
    if (!violations.empty()) {
      err << "error: " << violations.front().message << '\n';
      return kExitUsage;
    }
    const EdgeIndex index(*graph);
    const std::size_t size = 4 * n * index.slot_count();
    if (size > 4000) {
      err << "error: auxiliary matrix of size " << size << " is too large for a dense eigensolve\n";
      return kExitUsage;
    }
    AlgorithmParams p;
    p.alpha = alpha;
    p.epsilon = epsilon;
    p.mu = mu;
    const auto ops = assemble_operators(*graph, index, n, p);
    const auto numeric = numeric_spectrum(assemble_L(ops, p));
    const SpectralReport scaled = closed_form_spectrum(mu, epsilon, alpha, n * index.slot_count());
    const double gap = multiset_distance(closed_form_multiset(scaled), numeric);
    out << "numeric cross-check: " << numeric.size() << " eigenvalues, max deviation " << std::scientific << gap
        << std::defaultfloat << '\n';
  }
  return kExitOk;
}

inline int cmd_scan(const ScanConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const ScanTable table = acceleration_scan(expand_grid(cfg.alpha), expand_grid(cfg.epsilon), expand_grid(cfg.mu));
  const std::filesystem::path dir(cfg.output_dir);
  detail::ensure_directory(dir);
  const auto csv = dir / "scan.csv";
  {
    auto f = detail::open_output(csv);
    write_scan_csv(f, table);
    detail::close_output(f, csv);
  }
  std::ostringstream summary;
  summary.precision(6);
  const std::size_t total = table.rows.size();
  summary << "Scanned " << total << " parameter points. " << table.stable_count
          << " are stable (every eigenvalue other than the structural 1 lies inside the unit circle) and "
          << table.accelerated_count << " are accelerated (beta2 < beta1); " << table.counterexamples.size()
          << " points have beta2 >= beta1.";
  if (!table.counterexamples.empty()) {
    const auto& r = table.rows[table.counterexamples.front()];
    summary << " First such point: alpha = " << r.alpha << ", epsilon = " << r.epsilon << ", mu = " << r.mu
            << " with beta1 = " << r.beta1 << " and beta2 = " << r.beta2 << ".";
  }
  summary << '\n';
  const auto txt = dir / "scan_summary.txt";
  {
    auto f = detail::open_output(txt);
    f << summary.str();
    detail::close_output(f, txt);
  }
  out << summary.str() << "wrote " << csv.string() << '\n';
  return kExitOk;
}

inline int cmd_graph_gen(std::size_t nodes, std::uint64_t seed, const ProximityOptions& opt,
                         const std::string& path, std::ostream& out, std::ostream& /*err*/) {
  const Graph g = generate_proximity_graph(nodes, seed, opt);
  const std::filesystem::path p(path);
  if (p.has_parent_path()) detail::ensure_directory(p.parent_path());
  auto f = detail::open_output(p);
  write_edge_list(f, g);
  detail::close_output(f, p);
  out << "wrote " << path << ": " << g.node_count << " nodes, " << g.edge_count() << " edges\n";
  return kExitOk;
}

}  // namespace a2dmm

#endif  // A2DMM_HARNESS_HPP_
