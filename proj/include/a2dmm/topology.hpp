#ifndef A2DMM_TOPOLOGY_HPP_
#define A2DMM_TOPOLOGY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "a2dmm/errors.hpp"

namespace a2dmm {

using NodeId = std::size_t;
using Point2 = std::array<double, 2>;

//! Static undirected communication graph. Neighbor lists are sorted ascending.
struct Graph {
  std::size_t node_count = 0;
  std::vector<std::vector<NodeId>> neighbors;
  //! Placement coordinates, present only for generated graphs.
  std::vector<Point2> positions;

  std::size_t degree(NodeId i) const { return neighbors[i].size(); }

  //! d = sum of degrees = number of directed edge slots.
  std::size_t directed_edge_count() const {
    std::size_t d = 0;
    for (const auto& nb : neighbors) d += nb.size();
    return d;
  }

  std::size_t edge_count() const { return directed_edge_count() / 2; }

  bool operator==(const Graph& other) const {
    return node_count == other.node_count && neighbors == other.neighbors;
  }
};

//! Builds a graph from an undirected edge list. Duplicates are merged.
inline Graph graph_from_edges(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Graph g;
  g.node_count = node_count;
  g.neighbors.assign(node_count, {});
  for (auto [i, j] : edges) {
    if (i >= node_count || j >= node_count) throw Error("edge endpoint out of range");
    g.neighbors[i].push_back(j);
    g.neighbors[j].push_back(i);
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

/// Canonical numbering of directed edges.
///
/// Slots are assigned by ascending node id i, then by position of j in the
/// sorted neighbor list of i. Each slot carries one 2n-block of the stacked
/// auxiliary vector, so `pair_of` realizes the exchange permutation that swaps
/// the (i,j) and (j,i) blocks.
class EdgeIndex {
 public:
  EdgeIndex() = default;

  explicit EdgeIndex(const Graph& g) : first_slot_(g.node_count + 1, 0) {
    for (NodeId i = 0; i < g.node_count; ++i) first_slot_[i + 1] = first_slot_[i] + g.degree(i);
    const std::size_t d = first_slot_.back();
    source_.resize(d);
    target_.resize(d);
    pair_.resize(d);
    for (NodeId i = 0; i < g.node_count; ++i) {
      for (std::size_t k = 0; k < g.degree(i); ++k) {
        source_[first_slot_[i] + k] = i;
        target_[first_slot_[i] + k] = g.neighbors[i][k];
      }
    }
    for (std::size_t s = 0; s < d; ++s) {
      const NodeId i = source_[s];
      const NodeId j = target_[s];
      const auto& nb = g.neighbors[j];
      const auto it = std::lower_bound(nb.begin(), nb.end(), i);
      if (it == nb.end() || *it != i) throw Error("graph is not symmetric; cannot pair edge slots");
      pair_[s] = first_slot_[j] + static_cast<std::size_t>(it - nb.begin());
    }
  }

  std::size_t slot_count() const { return pair_.size(); }

  //! Slot of the k-th neighbor of node i.
  std::size_t slot(NodeId i, std::size_t k) const { return first_slot_[i] + k; }

  std::size_t first_slot(NodeId i) const { return first_slot_[i]; }

  //! Slot of directed pair (i, j), if j is a neighbor of i.
  std::optional<std::size_t> slot_of(NodeId i, NodeId j) const {
    for (std::size_t s = first_slot_[i]; s < first_slot_[i + 1]; ++s) {
      if (target_[s] == j) return s;
    }
    return std::nullopt;
  }

  std::size_t pair_of(std::size_t slot) const { return pair_[slot]; }
  NodeId source(std::size_t slot) const { return source_[slot]; }
  NodeId target(std::size_t slot) const { return target_[slot]; }

  //! Position of node i inside the neighbor list of node target(slot(i, k)).
  std::size_t reverse_position(NodeId i, std::size_t k) const {
    const std::size_t back = pair_[slot(i, k)];
    return back - first_slot_[source_[back]];
  }

 private:
  std::vector<std::size_t> first_slot_;
  std::vector<NodeId> source_;
  std::vector<NodeId> target_;
  std::vector<std::size_t> pair_;
};

inline EdgeIndex build_edge_index(const Graph& g) { return EdgeIndex(g); }

struct GraphViolation {
  enum class Kind { kRange, kSelfLoop, kSymmetry, kConnectivity };
  Kind kind;
  NodeId node;
  NodeId other;
  std::string message;
};

//! Lists every broken graph invariant; empty iff the graph is valid.
inline std::vector<GraphViolation> validate_graph(const Graph& g) {
  std::vector<GraphViolation> out;
  if (g.neighbors.size() != g.node_count) {
    out.push_back({GraphViolation::Kind::kRange, g.neighbors.size(), g.node_count,
                   "neighbor list count differs from node count"});
    return out;
  }
  for (NodeId i = 0; i < g.node_count; ++i) {
    for (NodeId j : g.neighbors[i]) {
      if (j >= g.node_count) {
        out.push_back({GraphViolation::Kind::kRange, i, j,
                       "node " + std::to_string(i) + " lists out-of-range neighbor " + std::to_string(j)});
      } else if (j == i) {
        out.push_back({GraphViolation::Kind::kSelfLoop, i, i, "self-loop at node " + std::to_string(i)});
      } else if (std::find(g.neighbors[j].begin(), g.neighbors[j].end(), i) == g.neighbors[j].end()) {
        out.push_back({GraphViolation::Kind::kSymmetry, i, j,
                       "symmetry: " + std::to_string(i) + " lists " + std::to_string(j) + " but " +
                           std::to_string(j) + " omits " + std::to_string(i)});
      }
    }
  }
  if (g.node_count == 0) return out;
  // Undirected reachability from node 0, following edges in either direction.
  std::vector<std::vector<NodeId>> undirected(g.node_count);
  for (NodeId i = 0; i < g.node_count; ++i) {
    for (NodeId j : g.neighbors[i]) {
      if (j < g.node_count) {
        undirected[i].push_back(j);
        undirected[j].push_back(i);
      }
    }
  }
  std::vector<bool> seen(g.node_count, false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : undirected[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != g.node_count) {
    const NodeId first = static_cast<NodeId>(std::find(seen.begin(), seen.end(), false) - seen.begin());
    out.push_back({GraphViolation::Kind::kConnectivity, first, 0,
                   "connectivity: " + std::to_string(g.node_count - reached) +
                       " node(s) unreachable from node 0, first is " + std::to_string(first)});
  }
  return out;
}

struct ProximityOptions {
  double r_min = 0.1;
  double r_max = 0.17;
  double side = 2.0;
  std::size_t max_attempts = 100;
  //! Candidate draws per node before the whole placement is restarted.
  std::size_t candidates_per_node = 10000;
};

/// Sequential proximity-graph placement.
///
/// Node 0 lands uniformly in the square. Every later node is drawn uniformly
/// until some already-placed node lies at a distance within [r_min, r_max].
/// Edges join every pair at distance <= r_max.
inline Graph generate_proximity_graph(std::size_t node_count, std::uint64_t seed,
                                      const ProximityOptions& opt = {}) {
  if (node_count == 0) throw ParameterOutOfRange("proximity graph needs at least one node");
  if (!(opt.r_min > 0.0 && opt.r_min < opt.r_max && opt.r_max < opt.side)) {
    throw ParameterOutOfRange("proximity graph needs 0 < r_min < r_max < side");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, opt.side);
  auto dist = [](const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };

  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::vector<Point2> pts;
    pts.reserve(node_count);
    pts.push_back({coord(rng), coord(rng)});
    bool placed_all = true;
    while (pts.size() < node_count && placed_all) {
      placed_all = false;
      for (std::size_t c = 0; c < opt.candidates_per_node; ++c) {
        const Point2 cand{coord(rng), coord(rng)};
        const bool ok = std::any_of(pts.begin(), pts.end(), [&](const Point2& p) {
          const double r = dist(p, cand);
          return r >= opt.r_min && r <= opt.r_max;
        });
        if (ok) {
          pts.push_back(cand);
          placed_all = true;
          break;
        }
      }
    }
    if (!placed_all) continue;

    Graph g;
    g.node_count = node_count;
    g.neighbors.assign(node_count, {});
    for (NodeId i = 0; i < node_count; ++i) {
      for (NodeId j = i + 1; j < node_count; ++j) {
        if (dist(pts[i], pts[j]) <= opt.r_max) {
          g.neighbors[i].push_back(j);
          g.neighbors[j].push_back(i);
        }
      }
    }
    for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
    g.positions = std::move(pts);
    if (validate_graph(g).empty()) return g;
  }
  throw GenerationFailure("no valid connected proximity graph after " + std::to_string(opt.max_attempts) +
                          " attempts");
}

//! Edge-list text: "N <count>" then one "i j" line (i < j) per undirected edge, ascending.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << "N " << g.node_count << '\n';
  for (NodeId i = 0; i < g.node_count; ++i) {
    for (NodeId j : g.neighbors[i]) {
      if (i < j) os << i << ' ' << j << '\n';
    }
  }
}

inline Graph read_edge_list(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> count;
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!count) {
      std::string tag;
      std::size_t n = 0;
      if (!(ls >> tag >> n) || tag != "N") throw ConfigError(line_no, "expected header 'N <count>'");
      count = n;
      continue;
    }
    long long i = -1, j = -1;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra) || i < 0 || j < 0) throw ConfigError(line_no, "expected 'i j'");
    if (static_cast<std::size_t>(i) >= *count || static_cast<std::size_t>(j) >= *count) {
      throw ConfigError(line_no, "edge endpoint out of range");
    }
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  if (!count) throw ConfigError(0, "empty edge list: missing 'N <count>' header");
  Graph g;
  g.node_count = *count;
  g.neighbors.assign(*count, {});
  for (auto [i, j] : edges) {
    g.neighbors[i].push_back(j);
    if (i != j) g.neighbors[j].push_back(i);
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

//! FNV-1a digest of the edge list, stored in trace metadata.
inline std::uint64_t graph_digest(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(g.node_count);
  for (NodeId i = 0; i < g.node_count; ++i) {
    for (NodeId j : g.neighbors[i]) {
      mix(i);
      mix(j);
    }
  }
  return h;
}

}  // namespace a2dmm

#endif  // A2DMM_TOPOLOGY_HPP_
