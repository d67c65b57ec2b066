// Helpers shared by the unit and acceptance suites.

#ifndef A2DMM_TESTS_TEST_SUPPORT_HPP_
#define A2DMM_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "a2dmm/a2dmm.hpp"

namespace a2dmm::testing {

//! Random connected graph: a random spanning tree plus each remaining pair with probability p.
inline Graph random_connected_graph(std::size_t nodes, std::uint64_t seed, double p = 0.3) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i < nodes; ++i) {
    std::uniform_int_distribution<NodeId> parent(0, i - 1);
    edges.emplace_back(parent(rng), i);
  }
  std::bernoulli_distribution extra(p);
  for (NodeId i = 0; i < nodes; ++i) {
    for (NodeId j = i + 1; j < nodes; ++j) {
      if (extra(rng)) edges.emplace_back(i, j);
    }
  }
  return graph_from_edges(nodes, edges);
}

inline Graph path_graph(std::size_t nodes) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < nodes; ++i) edges.emplace_back(i, i + 1);
  return graph_from_edges(nodes, edges);
}

inline Graph triangle() { return graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline double max_abs_diff(const GlobalState& a, const GlobalState& b) {
  double m = 0.0;
  m = std::max(m, (a.x - b.x).lpNorm<Eigen::Infinity>());
  m = std::max(m, (a.y - b.y).lpNorm<Eigen::Infinity>());
  m = std::max(m, (a.s - b.s).lpNorm<Eigen::Infinity>());
  m = std::max(m, (a.z - b.z).lpNorm<Eigen::Infinity>());
  m = std::max(m, (a.z_prev - b.z_prev).lpNorm<Eigen::Infinity>());
  return m;
}

//! Max coordinatewise difference over x, y, s and z of two per-node state lists.
inline double max_abs_diff(const std::vector<NodeState>& a, const std::vector<NodeState>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, (a[i].x - b[i].x).lpNorm<Eigen::Infinity>());
    m = std::max(m, (a[i].y - b[i].y).lpNorm<Eigen::Infinity>());
    m = std::max(m, (a[i].s - b[i].s).lpNorm<Eigen::Infinity>());
    for (std::size_t k = 0; k < a[i].z.size(); ++k) {
      m = std::max(m, (a[i].z[k] - b[i].z[k]).lpNorm<Eigen::Infinity>());
    }
  }
  return m;
}

//! Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("a2dmm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

//! Parameter set whose coupled tracker/edge loop is stable on small graphs.
inline AlgorithmParams stable_accelerated_params() {
  AlgorithmParams p;
  p.gamma = 0.05;
  p.rho = 1.0;
  p.alpha = 0.9;
  p.lambda = 1.2;
  p.mu = 1.2;
  p.epsilon = 0.6;
  return p;
}

inline AlgorithmParams stable_plain_params() {
  AlgorithmParams p;
  p.gamma = 0.1;
  p.rho = 0.528;
  p.alpha = 0.8924;
  return p;
}

}  // namespace a2dmm::testing

#endif  // A2DMM_TESTS_TEST_SUPPORT_HPP_
