#ifndef A2DMM_COSTS_HPP_
#define A2DMM_COSTS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "a2dmm/errors.hpp"

namespace a2dmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

//! f(x) = x^T B x + a^T x with B symmetric positive definite.
struct QuadraticCost {
  Matrix B;
  Vector a;

  std::size_t dimension() const { return static_cast<std::size_t>(a.size()); }
};

//! f(x) = sum_j log(1 + exp(-l_j (q1 p_j + q2))) + C ||x||^2, x = [q1, q2].
struct LogisticCost {
  std::vector<double> points;
  std::vector<double> labels;
  double C = 1.0;

  std::size_t dimension() const { return 2; }
};

using Cost = std::variant<QuadraticCost, LogisticCost>;

struct Evaluation {
  double value;
  Vector gradient;
};

inline std::size_t dimension(const Cost& c) {
  return std::visit([](const auto& f) { return f.dimension(); }, c);
}

namespace detail {

// log(1 + exp(t)) without overflow.
inline double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline void check_dimension(const Cost& c, const Vector& x) {
  const std::size_t n = dimension(c);
  if (static_cast<std::size_t>(x.size()) != n) throw DimensionMismatch(n, static_cast<std::size_t>(x.size()));
}

}  // namespace detail

inline Evaluation evaluate(const QuadraticCost& f, const Vector& x) {
  return {x.dot(f.B * x) + f.a.dot(x), 2.0 * f.B * x + f.a};
}

inline Evaluation evaluate(const LogisticCost& f, const Vector& x) {
  double value = f.C * x.squaredNorm();
  Vector grad = 2.0 * f.C * x;
  for (std::size_t j = 0; j < f.points.size(); ++j) {
    const double p = f.points[j];
    const double l = f.labels[j];
    const double score = x[0] * p + x[1];
    value += detail::softplus(-l * score);
    const double w = -l * detail::logistic(-l * score);
    grad[0] += w * p;
    grad[1] += w;
  }
  return {value, grad};
}

inline Evaluation evaluate(const Cost& c, const Vector& x) {
  detail::check_dimension(c, x);
  return std::visit([&x](const auto& f) { return evaluate(f, x); }, c);
}

inline Vector gradient(const Cost& c, const Vector& x) { return evaluate(c, x).gradient; }

inline Matrix hessian(const Cost& c, const Vector& x) {
  detail::check_dimension(c, x);
  if (const auto* q = std::get_if<QuadraticCost>(&c)) return 2.0 * q->B;
  const auto& f = std::get<LogisticCost>(c);
  Matrix h = 2.0 * f.C * Matrix::Identity(2, 2);
  for (double p : f.points) {
    const double sg = detail::logistic(x[0] * p + x[1]);
    const double w = sg * (1.0 - sg);
    h(0, 0) += w * p * p;
    h(0, 1) += w * p;
    h(1, 0) += w * p;
    h(1, 1) += w;
  }
  return h;
}

//! Central differences, one coordinate at a time.
inline Vector finite_difference_gradient(const Cost& c, const Vector& x, double h = 1e-6) {
  if (!(h > 0.0)) throw ParameterOutOfRange("finite difference step must be positive");
  detail::check_dimension(c, x);
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = evaluate(c, probe).value;
    probe[k] = x[k] - h;
    const double down = evaluate(c, probe).value;
    probe[k] = x[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

//! Per-node local costs sharing one decision dimension.
struct CostEnsemble {
  std::vector<Cost> costs;
  std::size_t dimension = 0;
  //! Empirical bounds, reported only.
  std::optional<double> strong_convexity;
  std::optional<double> lipschitz;

  std::size_t size() const { return costs.size(); }
  const Cost& operator[](std::size_t i) const { return costs[i]; }

  bool all_quadratic() const {
    for (const auto& c : costs) {
      if (!std::holds_alternative<QuadraticCost>(c)) return false;
    }
    return true;
  }
};

inline CostEnsemble make_ensemble(std::vector<Cost> costs) {
  CostEnsemble e;
  e.dimension = costs.empty() ? 0 : a2dmm::dimension(costs.front());
  for (const auto& c : costs) {
    if (a2dmm::dimension(c) != e.dimension) throw DimensionMismatch(e.dimension, a2dmm::dimension(c));
  }
  e.costs = std::move(costs);
  return e;
}

//! Haar-distributed orthogonal matrix: QR of a Gaussian matrix with sign-fixed R diagonal.
template <typename Rng>
Matrix random_orthogonal(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q;
}

struct QuadraticEnsembleOptions {
  double eig_min = 1.0;
  double eig_max = 5.0;
  double a_min = -10.0;
  double a_max = 20.0;
};

/// Random quadratic costs B_i = R diag(lambda) R^T with lambda uniform in
/// [eig_min, eig_max] and a_i elementwise uniform in [a_min, a_max].
inline CostEnsemble make_quadratic_ensemble(std::size_t nodes, std::size_t n, std::uint64_t seed,
                                            const QuadraticEnsembleOptions& opt = {}) {
  if (!(opt.eig_min > 0.0 && opt.eig_min <= opt.eig_max)) {
    throw ParameterOutOfRange("eigenvalue range must be positive and ordered");
  }
  if (!(opt.a_min <= opt.a_max)) throw ParameterOutOfRange("linear-term range must be ordered");
  std::mt19937_64 rng(seed);
  // uniform_real_distribution requires a < b.
  auto uniform = [&rng](double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<Cost> costs;
  costs.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const Matrix R = random_orthogonal(n, rng);
    Vector lambda(n);
    for (auto& v : lambda) v = uniform(opt.eig_min, opt.eig_max);
    Matrix B = R * lambda.asDiagonal() * R.transpose();
    B = (0.5 * (B + B.transpose())).eval();
    Vector a(n);
    for (auto& v : a) v = uniform(opt.a_min, opt.a_max);
    costs.emplace_back(QuadraticCost{std::move(B), std::move(a)});
  }
  CostEnsemble e = make_ensemble(std::move(costs));
  e.dimension = n;
  e.strong_convexity = 2.0 * opt.eig_min;
  e.lipschitz = 2.0 * opt.eig_max;
  return e;
}

//! Logistic-regression costs: m standard-normal points and uniform +-1 labels per node.
inline CostEnsemble make_logistic_ensemble(std::size_t nodes, std::size_t points_per_node, std::uint64_t seed,
                                           double C = 1.0) {
  if (points_per_node == 0) throw ParameterOutOfRange("logistic ensemble needs m >= 1");
  if (!(C > 0.0)) throw ParameterOutOfRange("logistic ensemble needs C > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Cost> costs;
  costs.reserve(nodes);
  double max_sq = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    LogisticCost f;
    f.C = C;
    for (std::size_t j = 0; j < points_per_node; ++j) {
      f.points.push_back(normal(rng));
      f.labels.push_back(coin(rng) ? 1.0 : -1.0);
    }
    double sq = 0.0;
    for (double p : f.points) sq += p * p + 1.0;
    max_sq = std::max(max_sq, sq);
    costs.emplace_back(std::move(f));
  }
  CostEnsemble e = make_ensemble(std::move(costs));
  e.dimension = 2;
  e.strong_convexity = 2.0 * C;
  // sigma' <= 1/4, so the data term Hessian is bounded by sum ||[p,1]||^2 / 4.
  e.lipschitz = 2.0 * C + 0.25 * max_sq;
  return e;
}

/// Minimizer of the summed cost.
///
/// All-quadratic ensembles are solved from sum 2 B_i x = -sum a_i. Anything
/// else runs Newton with halving backtracking until the summed gradient norm
/// reaches tol.
inline Vector central_optimum(const CostEnsemble& ensemble, double tol = 1e-12, std::size_t max_iter = 200) {
  const std::size_t n = ensemble.dimension;
  if (ensemble.size() == 0) throw Error("central_optimum: empty ensemble");
  if (ensemble.all_quadratic()) {
    Matrix lhs = Matrix::Zero(n, n);
    Vector rhs = Vector::Zero(n);
    for (const auto& c : ensemble.costs) {
      const auto& q = std::get<QuadraticCost>(c);
      lhs += 2.0 * q.B;
      rhs -= q.a;
    }
    return lhs.ldlt().solve(rhs);
  }

  auto total = [&](const Vector& x) {
    double value = 0.0;
    Vector grad = Vector::Zero(n);
    for (const auto& c : ensemble.costs) {
      auto ev = evaluate(c, x);
      value += ev.value;
      grad += ev.gradient;
    }
    return Evaluation{value, grad};
  };

  Vector x = Vector::Zero(n);
  Evaluation cur = total(x);
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (cur.gradient.norm() <= tol) return x;
    Matrix h = Matrix::Zero(n, n);
    for (const auto& c : ensemble.costs) h += hessian(c, x);
    const Vector step = h.ldlt().solve(-cur.gradient);
    const double slope = cur.gradient.dot(step);
    double t = 1.0;
    Vector trial = x + step;
    Evaluation next = total(trial);
    // Near the optimum the objective stalls in floating point while the
    // gradient keeps shrinking, so a full step that halves it is accepted too.
    const bool gradient_merit = next.gradient.norm() <= 0.5 * cur.gradient.norm();
    for (int k = 0; k < 60 && !gradient_merit && next.value > cur.value + 1e-4 * t * slope; ++k) {
      t *= 0.5;
      trial = x + t * step;
      next = total(trial);
    }
    if (next.value > cur.value && next.gradient.norm() >= cur.gradient.norm()) break;
    x = std::move(trial);
    cur = std::move(next);
  }
  if (cur.gradient.norm() <= tol) return x;
  throw NoConvergence("central_optimum: Newton stopped with gradient norm " + std::to_string(cur.gradient.norm()));
}

//! Summed gradient sum_i grad f_i(x).
inline Vector total_gradient(const CostEnsemble& ensemble, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (const auto& c : ensemble.costs) g += gradient(c, x);
  return g;
}

// Serialization: one cost per line, full precision.
//   quadratic <n> <B row-major, n*n values> <a, n values>
//   logistic <m> <C> <p_1 l_1 ... p_m l_m>

inline void write_ensemble(std::ostream& os, const CostEnsemble& e) {
  const auto old_precision = os.precision(17);
  for (const auto& c : e.costs) {
    if (const auto* q = std::get_if<QuadraticCost>(&c)) {
      os << "quadratic " << q->dimension();
      for (Eigen::Index r = 0; r < q->B.rows(); ++r) {
        for (Eigen::Index k = 0; k < q->B.cols(); ++k) os << ' ' << q->B(r, k);
      }
      for (double v : q->a) os << ' ' << v;
    } else {
      const auto& f = std::get<LogisticCost>(c);
      os << "logistic " << f.points.size() << ' ' << f.C;
      for (std::size_t j = 0; j < f.points.size(); ++j) os << ' ' << f.points[j] << ' ' << f.labels[j];
    }
    os << '\n';
  }
  os.precision(old_precision);
}

inline CostEnsemble read_ensemble(std::istream& is) {
  std::vector<Cost> costs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&](const std::string& what) { throw ConfigError(line_no, what); };
    if (tag == "quadratic") {
      std::size_t n = 0;
      if (!(ls >> n) || n == 0) fail("bad quadratic dimension");
      QuadraticCost q{Matrix(n, n), Vector(n)};
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
          if (!(ls >> q.B(r, k))) fail("truncated quadratic matrix");
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (!(ls >> q.a[k])) fail("truncated quadratic vector");
      }
      costs.emplace_back(std::move(q));
    } else if (tag == "logistic") {
      std::size_t m = 0;
      LogisticCost f;
      if (!(ls >> m >> f.C) || m == 0) fail("bad logistic header");
      for (std::size_t j = 0; j < m; ++j) {
        double p = 0.0, l = 0.0;
        if (!(ls >> p >> l)) fail("truncated logistic data");
        if (l != 1.0 && l != -1.0) fail("logistic label must be +1 or -1");
        f.points.push_back(p);
        f.labels.push_back(l);
      }
      costs.emplace_back(std::move(f));
    } else {
      fail("unknown cost type '" + tag + "'");
    }
  }
  return make_ensemble(std::move(costs));
}

}  // namespace a2dmm

#endif  // A2DMM_COSTS_HPP_
