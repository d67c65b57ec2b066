#ifndef A2DMM_NODE_ALGORITHMS_HPP_
#define A2DMM_NODE_ALGORITHMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "a2dmm/costs.hpp"
#include "a2dmm/errors.hpp"
#include "a2dmm/params.hpp"
#include "a2dmm/topology.hpp"

namespace a2dmm {

//! Divergence guard on the optimum estimates.
inline constexpr double kDivergenceBound = 1e12;

/// Local state of one agent.
///
/// `z` and `z_prev` are indexed like the node's sorted neighbor list: entry k
/// belongs to neighbor `g.neighbors[i][k]` and holds a 2n-vector whose first n
/// entries pair with the estimate tracker and last n with the gradient tracker.
struct NodeState {
  Vector x;
  Vector y;
  Vector s;
  std::vector<Vector> z;
  std::vector<Vector> z_prev;
  //! Gradient at x from the previous round (gradient-difference tracking only).
  Vector last_gradient;

  bool operator==(const NodeState&) const = default;
};

//! One directed transmission. For the ADMM family the payload is z_ji and the
//! companion is [y_j; s_j]; for DIGing the payload is [x_j; s_j].
struct EdgeMessage {
  NodeId sender;
  NodeId receiver;
  Vector payload;
  Vector companion;
};

struct RoundResult {
  std::vector<NodeState> states;
  std::vector<EdgeMessage> messages;
};

struct InitMode {
  enum class Kind { kZero, kRandom };
  Kind kind = Kind::kZero;
  std::uint64_t seed = 0;

  static InitMode zero() { return {}; }
  static InitMode random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
};

/// Zero mode clears everything. Random mode draws x uniform in [-1,1]^n and
/// y, s, z, z_prev from the standard normal distribution.
inline std::vector<NodeState> init_states(const Graph& g, std::size_t n, InitMode mode = InitMode::zero()) {
  std::vector<NodeState> states(g.node_count);
  std::mt19937_64 rng(mode.seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool random = mode.kind == InitMode::Kind::kRandom;
  auto fill = [&](Vector& v, std::size_t size, bool uniform) {
    v = Vector::Zero(static_cast<Eigen::Index>(size));
    if (!random) return;
    for (auto& e : v) e = uniform ? box(rng) : normal(rng);
  };
  for (NodeId i = 0; i < g.node_count; ++i) {
    auto& st = states[i];
    fill(st.x, n, true);
    fill(st.y, n, false);
    fill(st.s, n, false);
    st.z.resize(g.degree(i));
    st.z_prev.resize(g.degree(i));
    for (auto& v : st.z) fill(v, 2 * n, false);
    for (auto& v : st.z_prev) fill(v, 2 * n, false);
    st.last_gradient = Vector::Zero(static_cast<Eigen::Index>(n));
  }
  return states;
}

namespace detail {

inline bool finite(const Vector& v) { return v.allFinite(); }

inline void guard(const std::vector<NodeState>& states, std::size_t iteration) {
  for (const auto& st : states) {
    bool ok = finite(st.x) && finite(st.y) && finite(st.s) && st.x.lpNorm<Eigen::Infinity>() <= kDivergenceBound;
    for (const auto& v : st.z) ok = ok && finite(v);
    if (!ok) throw DivergenceError(iteration);
  }
}

inline Vector stack2(const Vector& top, const Vector& bottom) {
  Vector v(top.size() + bottom.size());
  v << top, bottom;
  return v;
}

// Tracker and edge-variable round shared by the accelerated and plain variants.
// With `accelerated == false` the momentum lines are skipped entirely.
inline RoundResult admm_family_round(const std::vector<NodeState>& states, const AlgorithmParams& p,
                                     const CostEnsemble& costs, const Graph& g, const EdgeIndex& index,
                                     std::size_t iteration, bool accelerated) {
  const std::size_t N = g.node_count;
  const Eigen::Index n = static_cast<Eigen::Index>(costs.dimension);
  if (states.size() != N || costs.size() != N) throw DimensionMismatch(N, states.size());

  RoundResult out;
  out.states = states;

  // Lines 4-7: local averaging of the estimate and gradient with incoming z^t.
  for (NodeId i = 0; i < N; ++i) {
    const NodeState& st = states[i];
    auto& nx = out.states[i];
    Vector sum = Vector::Zero(2 * n);
    for (const auto& zij : st.z) sum += zij;
    const double scale = 1.0 / (1.0 + p.rho * static_cast<double>(g.degree(i)));
    const Vector grad = gradient(costs[i], st.x);
    const Vector y_bar = scale * (st.x + sum.head(n));
    const Vector s_bar = scale * (grad + sum.tail(n));
    if (accelerated) {
      nx.y = st.y + p.lambda * (y_bar - st.y);
      nx.s = st.s + p.lambda * (s_bar - st.s);
    } else {
      nx.y = y_bar;
      nx.s = s_bar;
    }
    nx.last_gradient = grad;
  }

  // Exchange: j -> i carries z_ji^t and the fresh [y_j; s_j].
  out.messages.reserve(index.slot_count());
  for (std::size_t slot = 0; slot < index.slot_count(); ++slot) {
    const NodeId j = index.source(slot);
    const std::size_t k = slot - index.first_slot(j);
    out.messages.push_back({j, index.target(slot), states[j].z[k], stack2(out.states[j].y, out.states[j].s)});
  }

  // Lines 8-10: edge-variable update and estimate step.
  for (NodeId i = 0; i < N; ++i) {
    const NodeState& st = states[i];
    auto& nx = out.states[i];
    const Vector own = stack2(nx.y, nx.s);
    for (std::size_t k = 0; k < g.degree(i); ++k) {
      const EdgeMessage& in = out.messages[index.pair_of(index.slot(i, k))];
      const Vector& target = p.z_index == ZIndexConvention::kNeighbor ? in.companion : own;
      const Vector z_bar = (1.0 - p.alpha) * st.z[k] - p.alpha * (in.payload - 2.0 * p.rho * target);
      if (accelerated) {
        nx.z[k] = p.mu * (st.z[k] + p.epsilon * (z_bar - st.z[k])) + (1.0 - p.mu) * st.z_prev[k];
      } else {
        nx.z[k] = z_bar;
      }
      nx.z_prev[k] = st.z[k];
    }
    nx.x = st.x + p.gamma * (nx.y - st.x) - p.gamma * nx.s;
  }

  guard(out.states, iteration);
  return out;
}

}  // namespace detail

//! One synchronous round of the accelerated ADMM gradient-tracking method.
inline RoundResult a2dmm_gt_round(const std::vector<NodeState>& states, const AlgorithmParams& params,
                                  const CostEnsemble& costs, const Graph& g, const EdgeIndex& index,
                                  std::size_t iteration = 0) {
  return detail::admm_family_round(states, params, costs, g, index, iteration, true);
}

//! One synchronous round of plain ADMM gradient tracking; lambda, mu, epsilon are ignored.
inline RoundResult admm_gt_round(const std::vector<NodeState>& states, const AlgorithmParams& params,
                                 const CostEnsemble& costs, const Graph& g, const EdgeIndex& index,
                                 std::size_t iteration = 0) {
  return detail::admm_family_round(states, params, costs, g, index, iteration, false);
}

//! Metropolis-Hastings weight of edge (i, j).
inline double metropolis_weight(const Graph& g, NodeId i, NodeId j) {
  return 1.0 / (1.0 + static_cast<double>(std::max(g.degree(i), g.degree(j))));
}

//! Dense Metropolis-Hastings mixing matrix; symmetric and doubly stochastic.
inline Matrix metropolis_matrix(const Graph& g) {
  const auto N = static_cast<Eigen::Index>(g.node_count);
  Matrix W = Matrix::Zero(N, N);
  for (NodeId i = 0; i < g.node_count; ++i) {
    double row = 0.0;
    for (NodeId j : g.neighbors[i]) {
      const double w = metropolis_weight(g, i, j);
      W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      row += w;
    }
    W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 - row;
  }
  return W;
}

//! Sets s = last_gradient = grad f_i(x_i) and y = x, the starting point of gradient-difference tracking.
inline void diging_initialize(std::vector<NodeState>& states, const CostEnsemble& costs) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& st = states[i];
    st.last_gradient = gradient(costs[i], st.x);
    st.s = st.last_gradient;
    st.y = st.x;
  }
}

/// DIGing round: x <- W x - gamma s, s <- W s + grad f(x_new) - grad f(x_old).
///
/// States must have been prepared by diging_initialize. `y` mirrors x for
/// diagnostics.
inline RoundResult diging_round(const std::vector<NodeState>& states, const AlgorithmParams& params,
                                const CostEnsemble& costs, const Graph& g, const EdgeIndex& index,
                                std::size_t iteration = 0) {
  const std::size_t N = g.node_count;
  if (states.size() != N || costs.size() != N) throw DimensionMismatch(N, states.size());
  RoundResult out;
  out.states = states;
  out.messages.reserve(index.slot_count());
  for (std::size_t slot = 0; slot < index.slot_count(); ++slot) {
    const NodeId j = index.source(slot);
    out.messages.push_back({j, index.target(slot), detail::stack2(states[j].x, states[j].s), Vector()});
  }
  const Eigen::Index n = static_cast<Eigen::Index>(costs.dimension);
  for (NodeId i = 0; i < N; ++i) {
    const NodeState& st = states[i];
    Vector mixed_x = st.x;
    Vector mixed_s = st.s;
    double self = 1.0;
    mixed_x.setZero();
    mixed_s.setZero();
    for (std::size_t k = 0; k < g.degree(i); ++k) {
      const EdgeMessage& in = out.messages[index.pair_of(index.slot(i, k))];
      const double w = metropolis_weight(g, i, in.sender);
      self -= w;
      mixed_x += w * in.payload.head(n);
      mixed_s += w * in.payload.tail(n);
    }
    mixed_x += self * st.x;
    mixed_s += self * st.s;
    auto& nx = out.states[i];
    nx.x = mixed_x - params.gamma * st.s;
    const Vector grad = gradient(costs[i], nx.x);
    nx.s = mixed_s + grad - st.last_gradient;
    nx.last_gradient = grad;
    nx.y = nx.x;
  }
  detail::guard(out.states, iteration);
  return out;
}

}  // namespace a2dmm

#endif  // A2DMM_NODE_ALGORITHMS_HPP_
