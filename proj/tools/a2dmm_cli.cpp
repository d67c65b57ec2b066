// Command-line front end: simulate, spectra, scan, graph-gen.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "a2dmm/a2dmm.hpp"

namespace {

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const a2dmm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return a2dmm::kExitIo;
  } catch (const a2dmm::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return a2dmm::kExitDivergence;
  } catch (const a2dmm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return a2dmm::kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated ADMM gradient tracking: simulations and spectral analysis"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the configured algorithms on one instance");
  std::string config_path;
  a2dmm::SimulateOverrides overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double gamma = 0, rho = 0, alpha = 0, lambda = 0, mu = 0, eps = 0;
  simulate->add_option("--config", config_path, "Experiment configuration file")->required();
  auto* out_opt = simulate->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = simulate->add_option("--seed", seed, "Seed for graph and costs");
  auto* iter_opt = simulate->add_option("--iterations", iterations, "Number of rounds");
  auto* gamma_opt = simulate->add_option("--gamma", gamma);
  auto* rho_opt = simulate->add_option("--rho", rho);
  auto* alpha_opt = simulate->add_option("--alpha", alpha);
  auto* lambda_opt = simulate->add_option("--lambda", lambda);
  auto* mu_opt = simulate->add_option("--mu", mu);
  auto* eps_opt = simulate->add_option("--eps", eps);

  // spectra
  auto* spectra = app.add_subcommand("spectra", "Closed-form rates and stability of the edge-variable dynamics");
  double s_alpha = 0.9924, s_mu = 1.6, s_eps = 0.6;
  std::string s_graph;
  std::size_t s_dim = 1;
  spectra->add_option("--alpha", s_alpha, "Relaxation alpha")->capture_default_str();
  spectra->add_option("--mu", s_mu, "Momentum mu")->capture_default_str();
  spectra->add_option("--eps", s_eps, "Damping epsilon")->capture_default_str();
  auto* graph_opt = spectra->add_option("--graph", s_graph, "Edge-list file for a numeric cross-check");
  spectra->add_option("--dimension", s_dim, "Decision dimension n used for the cross-check")->capture_default_str();

  // scan
  auto* scan = app.add_subcommand("scan", "Sweep (alpha, epsilon, mu) and classify stability and acceleration");
  std::string scan_config;
  std::string scan_out;
  std::vector<double> alpha_grid, eps_grid, mu_grid;
  auto* scan_cfg_opt = scan->add_option("--config", scan_config, "Scan configuration file");
  auto* scan_out_opt = scan->add_option("--out", scan_out, "Output directory");
  auto* ag = scan->add_option("--alpha-grid", alpha_grid, "lo hi count")->expected(3);
  auto* eg = scan->add_option("--eps-grid", eps_grid, "lo hi count")->expected(3);
  auto* mg = scan->add_option("--mu-grid", mu_grid, "lo hi count")->expected(3);

  // graph-gen
  auto* graph_gen = app.add_subcommand("graph-gen", "Generate a proximity graph as an edge-list file");
  std::size_t g_nodes = 200;
  std::uint64_t g_seed = 1;
  std::string g_out = "graph.txt";
  a2dmm::ProximityOptions g_opt;
  graph_gen->add_option("--nodes", g_nodes)->capture_default_str();
  graph_gen->add_option("--seed", g_seed)->capture_default_str();
  graph_gen->add_option("--out", g_out)->capture_default_str();
  graph_gen->add_option("--r-min", g_opt.r_min)->capture_default_str();
  graph_gen->add_option("--r-max", g_opt.r_max)->capture_default_str();
  graph_gen->add_option("--side", g_opt.side)->capture_default_str();
  graph_gen->add_option("--max-attempts", g_opt.max_attempts)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? a2dmm::kExitOk : a2dmm::kExitUsage;
  }

  if (*simulate) {
    return guarded([&] {
      if (*out_opt) overrides.out = out_dir;
      if (*seed_opt) overrides.seed = seed;
      if (*iter_opt) overrides.iterations = iterations;
      if (*gamma_opt) overrides.gamma = gamma;
      if (*rho_opt) overrides.rho = rho;
      if (*alpha_opt) overrides.alpha = alpha;
      if (*lambda_opt) overrides.lambda = lambda;
      if (*mu_opt) overrides.mu = mu;
      if (*eps_opt) overrides.epsilon = eps;
      const auto cfg = a2dmm::apply_overrides(a2dmm::parse_config_file(config_path), overrides);
      return a2dmm::cmd_simulate(cfg, std::cout, std::cerr);
    });
  }
  if (*spectra) {
    return guarded([&] {
      std::optional<a2dmm::Graph> g;
      if (*graph_opt) g = a2dmm::load_graph_file(s_graph);
      return a2dmm::cmd_spectra(s_alpha, s_eps, s_mu, g, s_dim, std::cout, std::cerr);
    });
  }
  if (*scan) {
    return guarded([&] {
      a2dmm::ScanConfig cfg;
      if (*scan_cfg_opt) {
        std::ifstream in(scan_config);
        if (!in) throw a2dmm::IoError("cannot open scan config '" + scan_config + "'");
        cfg = a2dmm::parse_scan_config(in);
      }
      auto grid = [](const std::vector<double>& v) {
        if (v[2] < 1 || v[2] != static_cast<double>(static_cast<std::size_t>(v[2]))) {
          throw a2dmm::ConfigError(0, "grid count must be a positive integer");
        }
        return a2dmm::GridSpec{v[0], v[1], static_cast<std::size_t>(v[2])};
      };
      if (*ag) cfg.alpha = grid(alpha_grid);
      if (*eg) cfg.epsilon = grid(eps_grid);
      if (*mg) cfg.mu = grid(mu_grid);
      if (*scan_out_opt) cfg.output_dir = scan_out;
      return a2dmm::cmd_scan(cfg, std::cout, std::cerr);
    });
  }
  if (*graph_gen) {
    return guarded([&] { return a2dmm::cmd_graph_gen(g_nodes, g_seed, g_opt, g_out, std::cout, std::cerr); });
  }
  return a2dmm::kExitUsage;
}
