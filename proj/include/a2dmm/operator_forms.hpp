#ifndef A2DMM_OPERATOR_FORMS_HPP_
#define A2DMM_OPERATOR_FORMS_HPP_

#include <cstddef>
#include <iomanip>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "a2dmm/costs.hpp"
#include "a2dmm/node_algorithms.hpp"
#include "a2dmm/params.hpp"
#include "a2dmm/topology.hpp"

namespace a2dmm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Network-wide operators over the canonical slot ordering.
///
/// Stacked z holds one 2n-block per directed slot; v(y, s) holds [y_i; s_i]
/// per node. All operators are selection or scaling matrices, stored sparse.
struct StackedOperators {
  std::size_t nodes = 0;
  std::size_t dim = 0;
  std::size_t slots = 0;
  double rho = 0.0;
  SparseMatrix Ax;  //!< 2nd x Nn, copies x_i into the first half of each slot of node i
  SparseMatrix Az;  //!< 2nd x Nn, same for the second half
  SparseMatrix A;   //!< 2nd x 2nN, replicates [y_i; s_i] into each slot of node i
  SparseMatrix H;   //!< Nn x Nn, block diagonal I / (1 + rho d_i)
  SparseMatrix P;   //!< 2nd x 2nd, swaps slot (i,j) with (j,i)
  SparseMatrix F;   //!< (1 - eps alpha) I - eps alpha P
};

struct GlobalState {
  Vector x;
  Vector z;
  Vector z_prev;
  Vector y;
  Vector s;
};

inline StackedOperators assemble_operators(const Graph& g, const EdgeIndex& index, std::size_t n,
                                           const AlgorithmParams& params) {
  using Triplet = Eigen::Triplet<double>;
  StackedOperators ops;
  ops.nodes = g.node_count;
  ops.dim = n;
  ops.slots = index.slot_count();
  ops.rho = params.rho;
  const auto N = static_cast<Eigen::Index>(g.node_count);
  const auto nn = static_cast<Eigen::Index>(n);
  const auto zsize = static_cast<Eigen::Index>(2 * n * ops.slots);

  std::vector<Triplet> ax, az, a, p;
  for (std::size_t slot = 0; slot < ops.slots; ++slot) {
    const auto s = static_cast<Eigen::Index>(slot);
    const auto i = static_cast<Eigen::Index>(index.source(slot));
    const auto back = static_cast<Eigen::Index>(index.pair_of(slot));
    for (Eigen::Index k = 0; k < nn; ++k) {
      ax.emplace_back(2 * nn * s + k, nn * i + k, 1.0);
      az.emplace_back(2 * nn * s + nn + k, nn * i + k, 1.0);
    }
    for (Eigen::Index k = 0; k < 2 * nn; ++k) {
      a.emplace_back(2 * nn * s + k, 2 * nn * i + k, 1.0);
      p.emplace_back(2 * nn * s + k, 2 * nn * back + k, 1.0);
    }
  }
  ops.Ax.resize(zsize, N * nn);
  ops.Ax.setFromTriplets(ax.begin(), ax.end());
  ops.Az.resize(zsize, N * nn);
  ops.Az.setFromTriplets(az.begin(), az.end());
  ops.A.resize(zsize, 2 * nn * N);
  ops.A.setFromTriplets(a.begin(), a.end());
  ops.P.resize(zsize, zsize);
  ops.P.setFromTriplets(p.begin(), p.end());

  std::vector<Triplet> h;
  for (NodeId i = 0; i < g.node_count; ++i) {
    const double scale = 1.0 / (1.0 + params.rho * static_cast<double>(g.degree(i)));
    for (Eigen::Index k = 0; k < nn; ++k) h.emplace_back(static_cast<Eigen::Index>(i) * nn + k, static_cast<Eigen::Index>(i) * nn + k, scale);
  }
  ops.H.resize(N * nn, N * nn);
  ops.H.setFromTriplets(h.begin(), h.end());

  const double ea = params.epsilon * params.alpha;
  SparseMatrix identity(zsize, zsize);
  identity.setIdentity();
  ops.F = (1.0 - ea) * identity - ea * ops.P;
  return ops;
}

//! v(y, s) = [y_1; s_1; ...; y_N; s_N].
inline Vector interleave(const Vector& y, const Vector& s, std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::Index N = y.size() / nn;
  Vector v(2 * y.size());
  for (Eigen::Index i = 0; i < N; ++i) {
    v.segment(2 * nn * i, nn) = y.segment(nn * i, nn);
    v.segment(2 * nn * i + nn, nn) = s.segment(nn * i, nn);
  }
  return v;
}

//! g(x) = [grad f_1(x_1); ...; grad f_N(x_N)].
inline Vector stacked_gradient(const Vector& x, const CostEnsemble& costs) {
  const auto n = static_cast<Eigen::Index>(costs.dimension);
  Vector out(x.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * n;
    out.segment(off, n) = gradient(costs[i], x.segment(off, n));
  }
  return out;
}

//! Stacks per-node states in canonical order.
inline GlobalState stack_states(const std::vector<NodeState>& states, const EdgeIndex& index, std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  const auto N = static_cast<Eigen::Index>(states.size());
  const auto zsize = static_cast<Eigen::Index>(2 * n * index.slot_count());
  GlobalState gs{Vector(N * nn), Vector(zsize), Vector(zsize), Vector(N * nn), Vector(N * nn)};
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * nn;
    gs.x.segment(off, nn) = states[i].x;
    gs.y.segment(off, nn) = states[i].y;
    gs.s.segment(off, nn) = states[i].s;
    for (std::size_t k = 0; k < states[i].z.size(); ++k) {
      const auto zoff = static_cast<Eigen::Index>(2 * n * index.slot(i, k));
      gs.z.segment(zoff, 2 * nn) = states[i].z[k];
      gs.z_prev.segment(zoff, 2 * nn) = states[i].z_prev[k];
    }
  }
  return gs;
}

//! Network-wide form of one accelerated round. Pass mu = epsilon = lambda = 1
//! (with F assembled accordingly) for the non-accelerated method.
inline GlobalState global_dynamics_step(const GlobalState& st, const StackedOperators& ops, const CostEnsemble& costs,
                                        const AlgorithmParams& params) {
  const double lam = params.lambda;
  GlobalState next;
  next.y = (1.0 - lam) * st.y + lam * (ops.H * (st.x + ops.Ax.transpose() * st.z));
  next.s = (1.0 - lam) * st.s + lam * (ops.H * (stacked_gradient(st.x, costs) + ops.Az.transpose() * st.z));
  const Vector v = interleave(next.y, next.s, ops.dim);
  const double coupling = 2.0 * params.mu * params.epsilon * params.alpha * params.rho;
  next.z = params.mu * (ops.F * st.z) + (1.0 - params.mu) * st.z_prev + coupling * (ops.P * (ops.A * v));
  next.z_prev = st.z;
  next.x = st.x + params.gamma * (next.y - st.x) - params.gamma * next.s;
  if (!next.x.allFinite() || !next.z.allFinite() || !next.y.allFinite() || !next.s.allFinite()) {
    throw Error("global_dynamics_step: non-finite result");
  }
  return next;
}

//! Parameters of the non-accelerated method expressed in accelerated form.
inline AlgorithmParams reduced_params(AlgorithmParams p) {
  p.lambda = 1.0;
  p.mu = 1.0;
  p.epsilon = 1.0;
  return p;
}

//! Edge-variable error dynamics [[mu F, (1 - mu) I], [I, 0]].
struct AuxMatrix {
  SparseMatrix L;

  Matrix dense() const { return Matrix(L); }
};

inline AuxMatrix assemble_L(const StackedOperators& ops, const AlgorithmParams& params) {
  using Triplet = Eigen::Triplet<double>;
  const auto m = static_cast<Eigen::Index>(ops.F.rows());
  const double ea = params.epsilon * params.alpha;
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < m; ++r) {
    t.emplace_back(r, r, params.mu * (1.0 - ea));
    if (params.mu != 1.0) t.emplace_back(r, m + r, 1.0 - params.mu);
    t.emplace_back(m + r, r, 1.0);
  }
  for (Eigen::Index c = 0; c < ops.P.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(ops.P, c); it; ++it) {
      t.emplace_back(it.row(), it.col(), -params.mu * ea * it.value());
    }
  }
  AuxMatrix aux;
  aux.L.resize(2 * m, 2 * m);
  aux.L.setFromTriplets(t.begin(), t.end());
  return aux;
}

struct EquilibriumResiduals {
  double r_residual;  //!< ||[y; s] - h(w)||
  double z_residual;  //!< ||(I + P) z - 2 rho P A v(y, s)||
  double x_residual;  //!< ||x - 1 (x) x*||
};

inline EquilibriumResiduals equilibrium_residuals(const GlobalState& st, const StackedOperators& ops,
                                                  const CostEnsemble& costs, const Vector& x_star) {
  const Vector hy = ops.H * (st.x + ops.Ax.transpose() * st.z);
  const Vector hs = ops.H * (stacked_gradient(st.x, costs) + ops.Az.transpose() * st.z);
  const double r = std::sqrt((st.y - hy).squaredNorm() + (st.s - hs).squaredNorm());
  const Vector v = interleave(st.y, st.s, ops.dim);
  const double z = (st.z + ops.P * st.z - 2.0 * ops.rho * (ops.P * (ops.A * v))).norm();
  const double x = (st.x - x_star.replicate(static_cast<Eigen::Index>(ops.nodes), 1)).norm();
  return {r, z, x};
}

//! Dense dump: one row per line, row-major, full precision.
inline void write_dense(std::ostream& os, const Matrix& m) {
  const auto old = os.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c == 0 ? "" : " ") << m(r, c);
    os << '\n';
  }
  os.precision(old);
}

}  // namespace a2dmm

#endif  // A2DMM_OPERATOR_FORMS_HPP_
