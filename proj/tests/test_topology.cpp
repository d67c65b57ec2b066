#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "a2dmm/topology.hpp"
#include "test_support.hpp"

namespace a2dmm {
namespace {

double distance(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

TEST(ProximityGraph, SingleNodeHasNoEdges) {
  for (std::uint64_t seed : {0u, 7u, 99u}) {
    const Graph g = generate_proximity_graph(1, seed);
    EXPECT_EQ(g.node_count, 1u);
    EXPECT_EQ(g.directed_edge_count(), 0u);
    EXPECT_TRUE(validate_graph(g).empty());
  }
}

// Re-checks the placement and edge predicates directly on the coordinates.
void expect_proximity_predicate(const Graph& g, const ProximityOptions& opt) {
  ASSERT_EQ(g.positions.size(), g.node_count);
  for (NodeId i = 0; i < g.node_count; ++i) {
    for (NodeId j = 0; j < g.node_count; ++j) {
      if (i == j) continue;
      const bool adjacent = std::binary_search(g.neighbors[i].begin(), g.neighbors[i].end(), j);
      EXPECT_EQ(adjacent, distance(g.positions[i], g.positions[j]) <= opt.r_max) << i << "," << j;
    }
    EXPECT_GE(g.positions[i][0], 0.0);
    EXPECT_LE(g.positions[i][0], opt.side);
    EXPECT_GE(g.positions[i][1], 0.0);
    EXPECT_LE(g.positions[i][1], opt.side);
  }
  for (NodeId k = 1; k < g.node_count; ++k) {
    bool anchored = false;
    for (NodeId i = 0; i < k; ++i) {
      const double r = distance(g.positions[i], g.positions[k]);
      anchored = anchored || (r >= opt.r_min && r <= opt.r_max);
    }
    EXPECT_TRUE(anchored) << "node " << k << " has no earlier node within [r_min, r_max]";
  }
}

TEST(ProximityGraph, FiveNodesSatisfyPlacementPredicate) {
  const ProximityOptions opt;
  const Graph g = generate_proximity_graph(5, 42, opt);
  EXPECT_EQ(g.node_count, 5u);
  EXPECT_TRUE(validate_graph(g).empty());
  expect_proximity_predicate(g, opt);
}

TEST(ProximityGraph, BenchmarkSizeIsValidAndDeterministic) {
  const ProximityOptions opt;
  const Graph a = generate_proximity_graph(200, 1, opt);
  const Graph b = generate_proximity_graph(200, 1, opt);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(validate_graph(a).empty());
  expect_proximity_predicate(a, opt);
  // Sparse relative to the complete graph on 200 nodes.
  EXPECT_LT(a.edge_count(), 200u * 199u / 2u / 5u);
}

TEST(ProximityGraph, RejectsBadRadii) {
  ProximityOptions opt;
  opt.r_min = 0.2;
  opt.r_max = 0.1;
  EXPECT_THROW(generate_proximity_graph(5, 1, opt), ParameterOutOfRange);
  EXPECT_THROW(generate_proximity_graph(0, 1), ParameterOutOfRange);
}

TEST(ProximityGraph, ReportsGenerationFailure) {
  ProximityOptions opt;
  opt.max_attempts = 1;
  opt.candidates_per_node = 1;
  // With one candidate per node a 50-node placement essentially never completes.
  EXPECT_THROW(generate_proximity_graph(50, 3, opt), GenerationFailure);
}

TEST(EdgeIndex, SingleEdge) {
  const Graph g = testing::path_graph(2);
  const EdgeIndex idx = build_edge_index(g);
  ASSERT_EQ(idx.slot_count(), 2u);
  EXPECT_EQ(idx.slot_of(0, 1), 0u);
  EXPECT_EQ(idx.slot_of(1, 0), 1u);
  EXPECT_EQ(idx.pair_of(0), 1u);
  EXPECT_EQ(idx.pair_of(1), 0u);
}

TEST(EdgeIndex, TriangleCanonicalOrder) {
  const EdgeIndex idx(testing::triangle());
  const std::vector<std::pair<NodeId, NodeId>> expected{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  ASSERT_EQ(idx.slot_count(), expected.size());
  for (std::size_t s = 0; s < expected.size(); ++s) {
    EXPECT_EQ(idx.source(s), expected[s].first);
    EXPECT_EQ(idx.target(s), expected[s].second);
    EXPECT_EQ(idx.slot_of(expected[s].first, expected[s].second), s);
  }
  EXPECT_EQ(idx.pair_of(0), 2u);
  EXPECT_EQ(idx.pair_of(1), 4u);
  EXPECT_EQ(idx.pair_of(3), 5u);
  EXPECT_FALSE(idx.slot_of(0, 0).has_value());
}

TEST(EdgeIndex, PairingIsFixedPointFreeInvolution) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = testing::random_connected_graph(3 + seed % 9, seed);
    const EdgeIndex idx(g);
    std::size_t degree_sum = 0;
    for (NodeId i = 0; i < g.node_count; ++i) degree_sum += g.degree(i);
    EXPECT_EQ(idx.slot_count(), degree_sum);
    EXPECT_EQ(idx.slot_count(), 2 * g.edge_count());
    for (std::size_t s = 0; s < idx.slot_count(); ++s) {
      EXPECT_NE(idx.pair_of(s), s);
      EXPECT_EQ(idx.pair_of(idx.pair_of(s)), s);
      EXPECT_EQ(idx.source(idx.pair_of(s)), idx.target(s));
      EXPECT_EQ(idx.target(idx.pair_of(s)), idx.source(s));
    }
  }
}

TEST(ValidateGraph, DisconnectedPair) {
  Graph g;
  g.node_count = 2;
  g.neighbors = {{}, {}};
  const auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, GraphViolation::Kind::kConnectivity);
  EXPECT_EQ(v[0].node, 1u);
}

TEST(ValidateGraph, AsymmetricLists) {
  Graph g;
  g.node_count = 3;
  g.neighbors = {{1}, {0, 2}, {}};
  const auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, GraphViolation::Kind::kSymmetry);
  EXPECT_EQ(v[0].node, 1u);
  EXPECT_EQ(v[0].other, 2u);
}

TEST(ValidateGraph, SelfLoopAndRange) {
  Graph g;
  g.node_count = 2;
  g.neighbors = {{0, 1}, {0, 5}};
  const auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, GraphViolation::Kind::kSelfLoop);
  EXPECT_EQ(v[1].kind, GraphViolation::Kind::kRange);
}

TEST(EdgeList, RoundTripAndFormat) {
  const Graph g = testing::triangle();
  std::ostringstream os;
  write_edge_list(os, g);
  EXPECT_EQ(os.str(), "N 3\n0 1\n0 2\n1 2\n");
  std::istringstream is(os.str());
  EXPECT_EQ(read_edge_list(is), g);

  const Graph big = generate_proximity_graph(40, 5);
  std::ostringstream os2;
  write_edge_list(os2, big);
  std::istringstream is2(os2.str());
  EXPECT_EQ(read_edge_list(is2), big);
}

TEST(EdgeList, MalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_edge_list(empty), ConfigError);
  std::istringstream bad_header("M 3\n");
  EXPECT_THROW(read_edge_list(bad_header), ConfigError);
  std::istringstream out_of_range("N 2\n0 2\n");
  try {
    read_edge_list(out_of_range);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace a2dmm
