#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "a2dmm/harness.hpp"
#include "test_support.hpp"

namespace a2dmm {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kSmallConfig = R"(
[problem]
type = quadratic
nodes = 12
seed = 4

[graph]
seed = 4
r_max = 0.5

[run]
iterations = 40

[algorithm]
name = a2dmm-gt
label = Fast One
gamma = 0.05
rho = 1
alpha = 0.9
lambda = 1.2
mu = 1.2
epsilon = 0.6

[algorithm]
name = diging
gamma = 0.01
)";

TEST(Config, BundledQuadraticConfig) {
  const auto cfg = parse_config_file(std::string(A2DMM_CONFIG_DIR) + "/quadratic_fig2.cfg");
  EXPECT_EQ(cfg.problem.type, ProblemConfig::Type::kQuadratic);
  EXPECT_EQ(cfg.problem.nodes, 200u);
  EXPECT_EQ(cfg.problem.dimension, 2u);
  EXPECT_EQ(cfg.problem.eig_min, 1.0);
  EXPECT_EQ(cfg.problem.eig_max, 5.0);
  EXPECT_EQ(cfg.problem.a_min, -10.0);
  EXPECT_EQ(cfg.problem.a_max, 20.0);
  EXPECT_EQ(cfg.run.iterations, 500u);
  ASSERT_EQ(cfg.algorithms.size(), 3u);
  EXPECT_EQ(cfg.algorithms[0].algorithm, Algorithm::kA2dmmGt);
  EXPECT_EQ(cfg.algorithms[0].params.gamma, 1.6);
  EXPECT_EQ(cfg.algorithms[0].params.rho, 3.028);
  EXPECT_EQ(cfg.algorithms[0].params.alpha, 0.9924);
  EXPECT_EQ(cfg.algorithms[0].params.lambda, 0.2);
  EXPECT_EQ(cfg.algorithms[0].params.mu, 1.6);
  EXPECT_EQ(cfg.algorithms[0].params.epsilon, 0.6);
  EXPECT_EQ(cfg.algorithms[1].params.gamma, 0.4865);
  EXPECT_EQ(cfg.algorithms[1].params.rho, 0.528);
  EXPECT_EQ(cfg.algorithms[1].params.alpha, 0.8924);
  EXPECT_EQ(cfg.algorithms[2].algorithm, Algorithm::kDiging);
  EXPECT_EQ(cfg.algorithms[2].params.gamma, 0.0127);
  // lambda = 0.2 lies outside (1, 2).
  ASSERT_EQ(cfg.warnings.size(), 1u);
  EXPECT_NE(cfg.warnings[0].find("lambda"), std::string::npos);
}

TEST(Config, BundledConfigsRoundTrip) {
  for (const char* name : {"quadratic_fig2.cfg", "logistic_fig2.cfg", "tuned_quadratic.cfg"}) {
    const auto cfg = parse_config_file(std::string(A2DMM_CONFIG_DIR) + "/" + name);
    std::stringstream ss;
    emit_config(ss, cfg);
    EXPECT_EQ(parse_config(ss), cfg) << name;
  }
}

TEST(Config, LogisticConfig) {
  const auto cfg = parse_config_file(std::string(A2DMM_CONFIG_DIR) + "/logistic_fig2.cfg");
  EXPECT_EQ(cfg.problem.type, ProblemConfig::Type::kLogistic);
  EXPECT_EQ(cfg.problem.nodes, 50u);
  EXPECT_EQ(cfg.problem.points_per_node, 10u);
  EXPECT_EQ(cfg.problem.C, 1.0);
}

TEST(Config, EmptyFileListsRequiredKeys) {
  try {
    parse("# nothing here\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[problem] type"), std::string::npos);
    EXPECT_NE(msg.find("[run] iterations"), std::string::npos);
  }
}

TEST(Config, MissingKeysAreNamed) {
  try {
    parse("[problem]\ntype = quadratic\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[problem] nodes"), std::string::npos);
    EXPECT_NE(msg.find("[algorithm]"), std::string::npos);
  }
}

TEST(Config, HardErrorsCarryLineNumbers) {
  const std::string base = "[problem]\ntype = quadratic\nnodes = 3\n[run]\niterations = 5\n[algorithm]\nname = admm-gt\n";
  try {
    parse(base + "gamma = 0.1\nalpha = 1.2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 6u);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  try {
    parse(base + "gamma = 0.1\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 9u);
  }
  EXPECT_THROW(parse(base + "gamma = 0.1\ngamma = 0.2\n"), ConfigError);
  EXPECT_THROW(parse(base + "gamma = -1\n"), ConfigError);
  EXPECT_THROW(parse(base + "gamma = abc\n"), ConfigError);
  EXPECT_THROW(parse(base + "gamma = 0.1\n[nonsense]\n"), ConfigError);
  EXPECT_NO_THROW(parse(base + "gamma = 0.1\n"));
}

TEST(Config, MomentumOutsideRangeWarnsOnly) {
  const auto cfg = parse(
      "[problem]\ntype = quadratic\nnodes = 3\n[run]\niterations = 5\n"
      "[algorithm]\nname = a2dmm-gt\ngamma = 0.1\nlambda = 0.2\nmu = 1.5\n");
  ASSERT_EQ(cfg.warnings.size(), 1u);
  EXPECT_NE(cfg.warnings[0].find("lambda"), std::string::npos);
}

TEST(Config, SmallConfigRoundTrip) {
  const auto cfg = parse(kSmallConfig);
  EXPECT_EQ(cfg.algorithms[0].label, "Fast One");
  EXPECT_EQ(cfg.algorithms[1].label, "diging");
  std::stringstream ss;
  emit_config(ss, cfg);
  EXPECT_EQ(parse_config(ss), cfg);
}

TEST(ScanConfig, BundledDefault) {
  std::ifstream in(std::string(A2DMM_CONFIG_DIR) + "/scan_default.cfg");
  const ScanConfig cfg = parse_scan_config(in);
  EXPECT_EQ(cfg.alpha, (GridSpec{0.0, 1.0, 10}));
  EXPECT_EQ(cfg.mu, (GridSpec{1.0, 2.0, 10}));
  const auto g = expand_grid(cfg.alpha);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_GT(g.front(), 0.0);
  EXPECT_LT(g.back(), 1.0);
  std::istringstream bad("[scan]\nbeta_min = 1\n");
  EXPECT_THROW(parse_scan_config(bad), ConfigError);
}

TEST(Overrides, SeedAndParameters) {
  SimulateOverrides o;
  o.seed = 77;
  o.iterations = 3;
  o.gamma = 0.02;
  const auto cfg = apply_overrides(parse(kSmallConfig), o);
  EXPECT_EQ(cfg.problem.seed, 77u);
  EXPECT_EQ(cfg.graph.seed, 77u);
  EXPECT_EQ(cfg.run.iterations, 3u);
  for (const auto& a : cfg.algorithms) EXPECT_EQ(a.params.gamma, 0.02);
  SimulateOverrides bad;
  bad.alpha = 2.0;
  EXPECT_THROW(apply_overrides(parse(kSmallConfig), bad), ConfigError);
}

TEST(Simulate, WritesTracesSummaryPlotAndReplayFiles) {
  auto cfg = parse(kSmallConfig);
  const auto dir = testing::scratch_dir("simulate");
  cfg.output_dir = dir.string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(cfg, out, err), kExitOk) << err.str();
  for (const char* f : {"trace_fast_one.csv", "trace_diging.csv", "summary.csv", "error.svg", "graph.txt",
                        "ensemble.txt", "config.cfg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream trace(dir / "trace_fast_one.csv");
  EXPECT_EQ(read_trace_csv(trace).size(), 41u);
  EXPECT_EQ(count_lines(read_file(dir / "summary.csv")), 3u);

  const std::string svg = read_file(dir / "error.svg");
  EXPECT_EQ(count_occurrences(svg, "<polyline class=\"series\""), 2u);
  EXPECT_NE(svg.find("data-label=\"Fast One\""), std::string::npos);
  EXPECT_NE(svg.find("data-scale=\"log10\""), std::string::npos);
  EXPECT_NE(svg.find(">1e"), std::string::npos);

  // The replay files rebuild the same instance.
  const auto replay = parse_config_file((dir / "config.cfg").string());
  EXPECT_EQ(replay, cfg);
  EXPECT_EQ(load_graph_file((dir / "graph.txt").string()), build_instance(cfg).graph);
}

TEST(Simulate, ZeroIterationsWritesInitialRecordOnly) {
  auto cfg = parse(kSmallConfig);
  cfg.run.iterations = 0;
  const auto dir = testing::scratch_dir("simulate0");
  cfg.output_dir = dir.string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(cfg, out, err), kExitOk);
  std::ifstream trace(dir / "trace_diging.csv");
  EXPECT_EQ(read_trace_csv(trace).size(), 1u);
}

TEST(Simulate, DivergenceGivesExitTwo) {
  auto cfg = parse(kSmallConfig);
  cfg.algorithms[0].params.gamma = 20.0;
  cfg.run.iterations = 2000;
  cfg.output_dir = testing::scratch_dir("simulate_div").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(cfg, out, err), kExitDivergence);
  EXPECT_NE(err.str().find("diverged"), std::string::npos);
}

TEST(Simulate, UnwritableOutputIsAnIoError) {
  auto cfg = parse(kSmallConfig);
  const auto dir = testing::scratch_dir("simulate_io");
  std::ofstream(dir / "blocker") << "x";
  cfg.output_dir = (dir / "blocker" / "sub").string();
  std::ostringstream out, err;
  EXPECT_THROW(cmd_simulate(cfg, out, err), IoError);
}

TEST(Simulate, GraphFileMustMatchNodeCount) {
  auto cfg = parse(kSmallConfig);
  const auto dir = testing::scratch_dir("graph_file");
  {
    std::ofstream f(dir / "g.txt");
    write_edge_list(f, testing::triangle());
  }
  cfg.graph.file = (dir / "g.txt").string();
  EXPECT_THROW(build_instance(cfg), ConfigError);
  cfg.problem.nodes = 3;
  EXPECT_EQ(build_instance(cfg).graph, testing::triangle());
}

TEST(Spectra, TunedPointReport) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_spectra(0.9924, 0.6, 1.6, std::nullopt, 1, out, err), kExitOk);
  EXPECT_NE(out.str().find("beta1 = 0.9848"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("beta2 = 0.774597"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("accelerated = true"), std::string::npos);
}

TEST(Spectra, CounterexampleAndReduction) {
  std::ostringstream a, b, err;
  cmd_spectra(0.5, 0.5, 1.5, std::nullopt, 1, a, err);
  EXPECT_NE(a.str().find("accelerated = false"), std::string::npos);
  cmd_spectra(0.8924, 1.0, 1.0, std::nullopt, 1, b, err);
  EXPECT_NE(b.str().find("beta1 = 0.7848"), std::string::npos);
  EXPECT_NE(b.str().find("beta2 = 0.7848"), std::string::npos);
}

TEST(Spectra, NumericCrossCheckWithGraph) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_spectra(0.9924, 0.6, 1.6, testing::random_connected_graph(6, 1), 2, out, err), kExitOk);
  const std::regex dev("max deviation ([0-9.e+-]+)");
  std::smatch m;
  const std::string text = out.str();
  ASSERT_TRUE(std::regex_search(text, m, dev)) << text;
  EXPECT_LE(std::stod(m[1]), 1e-8);
  EXPECT_THROW(cmd_spectra(1.5, 0.6, 1.6, std::nullopt, 1, out, err), ParameterOutOfRange);
}

TEST(Scan, DefaultGridThousandRowsAllStable) {
  ScanConfig cfg;
  const auto dir = testing::scratch_dir("scan");
  cfg.output_dir = dir.string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_scan(cfg, out, err), kExitOk);
  const std::string csv = read_file(dir / "scan.csv");
  EXPECT_EQ(count_lines(csv), 1001u);
  EXPECT_EQ(count_occurrences(csv, ",false,"), 0u);
  EXPECT_NE(read_file(dir / "scan_summary.txt").find("1000 are stable"), std::string::npos);
}

TEST(Scan, SinglePointAtTunedParameters) {
  ScanConfig cfg;
  cfg.alpha = {0.9924, 0.9924, 1};
  cfg.epsilon = {0.6, 0.6, 1};
  cfg.mu = {1.6, 1.6, 1};
  const auto dir = testing::scratch_dir("scan1");
  cfg.output_dir = dir.string();
  std::ostringstream out, err;
  cmd_scan(cfg, out, err);
  const std::string csv = read_file(dir / "scan.csv");
  EXPECT_EQ(count_lines(csv), 2u);
  EXPECT_NE(csv.find("\n0.9924,0.6,1.6,"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",true,true"), std::string::npos);
}

TEST(GraphGen, WritesReadableEdgeList) {
  const auto dir = testing::scratch_dir("graph_gen");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_graph_gen(30, 2, {}, (dir / "sub" / "g.txt").string(), out, err), kExitOk);
  EXPECT_EQ(load_graph_file((dir / "sub" / "g.txt").string()), generate_proximity_graph(30, 2));
}

TEST(FileStem, Sanitizes) {
  EXPECT_EQ(file_stem("A2DMM-GT"), "a2dmm_gt");
  EXPECT_EQ(file_stem(""), "series");
}

}  // namespace
}  // namespace a2dmm
