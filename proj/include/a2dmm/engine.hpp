#ifndef A2DMM_ENGINE_HPP_
#define A2DMM_ENGINE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "a2dmm/costs.hpp"
#include "a2dmm/errors.hpp"
#include "a2dmm/format.hpp"
#include "a2dmm/node_algorithms.hpp"
#include "a2dmm/params.hpp"
#include "a2dmm/topology.hpp"

namespace a2dmm {

struct TraceRecord {
  std::size_t t = 0;
  double error = 0.0;       //!< ||x - 1 (x) x*||
  double consensus = 0.0;   //!< max_{i,j} ||x_i - x_j||
  double y_residual = 0.0;  //!< max_i ||y_i - x*||
  double s_residual = 0.0;  //!< max_i ||s_i||
  double z_residual = 0.0;  //!< ||(I + P) z - 2 rho P A v(y, s)||, 0 without edge variables

  bool operator==(const TraceRecord&) const = default;
};

struct TraceMetadata {
  std::string algorithm;
  AlgorithmParams params;
  InitMode::Kind init = InitMode::Kind::kZero;
  std::uint64_t init_seed = 0;
  std::uint64_t graph_digest = 0;
};

struct Trace {
  TraceMetadata metadata;
  std::vector<TraceRecord> records;
  bool diverged = false;
  //! Iteration of the tagged divergence record.
  std::optional<std::size_t> diverged_at;
  std::vector<NodeState> final_states;

  const TraceRecord& final_record() const { return records.back(); }
};

struct RunOptions {
  std::size_t iterations = 500;
  InitMode init = InitMode::zero();
  //! Stop once the error reaches early_stop_threshold. Off by default.
  bool early_stop = false;
  double early_stop_threshold = 1e-12;
};

inline TraceRecord diagnose(std::size_t t, const std::vector<NodeState>& states, const Graph& g,
                            const EdgeIndex& index, double rho, const Vector& x_star, bool edge_variables) {
  TraceRecord rec;
  rec.t = t;
  double err2 = 0.0;
  for (const auto& st : states) {
    err2 += (st.x - x_star).squaredNorm();
    rec.y_residual = std::max(rec.y_residual, (st.y - x_star).norm());
    rec.s_residual = std::max(rec.s_residual, st.s.norm());
  }
  rec.error = std::sqrt(err2);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      rec.consensus = std::max(rec.consensus, (states[i].x - states[j].x).norm());
    }
  }
  if (edge_variables) {
    double z2 = 0.0;
    for (NodeId i = 0; i < g.node_count; ++i) {
      for (std::size_t k = 0; k < g.degree(i); ++k) {
        const NodeId j = g.neighbors[i][k];
        const std::size_t back = index.reverse_position(i, k);
        const auto n = states[j].y.size();
        Vector r = states[i].z[k] + states[j].z[back];
        r.head(n) -= 2.0 * rho * states[j].y;
        r.tail(n) -= 2.0 * rho * states[j].s;
        z2 += r.squaredNorm();
      }
    }
    rec.z_residual = std::sqrt(z2);
  }
  return rec;
}

/// Runs `options.iterations` synchronous rounds and records diagnostics.
///
/// The trace holds iterations + 1 records (t = 0 included) unless the run
/// diverges, in which case a final record with infinite entries is appended
/// and the trace is tagged.
inline Trace run(Algorithm algorithm, const Graph& g, const CostEnsemble& costs, const AlgorithmParams& params,
                 const RunOptions& options, const Vector& x_star) {
  if (costs.size() != g.node_count) throw DimensionMismatch(g.node_count, costs.size());
  if (static_cast<std::size_t>(x_star.size()) != costs.dimension) {
    throw DimensionMismatch(costs.dimension, static_cast<std::size_t>(x_star.size()));
  }
  if (algorithm == Algorithm::kDiging) {
    if (!(params.gamma > 0.0)) throw ParameterOutOfRange("gamma must be > 0");
  } else {
    validate_params(params);
  }
  const EdgeIndex index(g);
  Trace trace;
  trace.metadata = {std::string(algorithm_name(algorithm)), params, options.init.kind, options.init.seed,
                    graph_digest(g)};
  std::vector<NodeState> states = init_states(g, costs.dimension, options.init);
  if (algorithm == Algorithm::kDiging) diging_initialize(states, costs);
  const bool edges = algorithm != Algorithm::kDiging;
  trace.records.reserve(options.iterations + 1);
  trace.records.push_back(diagnose(0, states, g, index, params.rho, x_star, edges));

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    if (options.early_stop && trace.records.back().error <= options.early_stop_threshold) break;
    try {
      switch (algorithm) {
        case Algorithm::kA2dmmGt: states = a2dmm_gt_round(states, params, costs, g, index, t).states; break;
        case Algorithm::kAdmmGt: states = admm_gt_round(states, params, costs, g, index, t).states; break;
        case Algorithm::kDiging: states = diging_round(states, params, costs, g, index, t).states; break;
      }
    } catch (const DivergenceError& e) {
      const double inf = std::numeric_limits<double>::infinity();
      trace.records.push_back({e.iteration(), inf, inf, inf, inf, inf});
      trace.diverged = true;
      trace.diverged_at = e.iteration();
      break;
    }
    trace.records.push_back(diagnose(t, states, g, index, params.rho, x_star, edges));
  }
  trace.final_states = std::move(states);
  return trace;
}

//! Least-squares fit of ln e^t = ln c1 - c2 t.
struct RateFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double r_squared = 0.0;
  std::size_t first = 0;  //!< first iteration in the window
  std::size_t last = 0;   //!< last iteration in the window
  bool underflow = false; //!< some in-window error was clamped at 1e-300
};

inline RateFit fit_linear_rate(const Trace& trace, double window_lo = 0.2, double window_hi = 0.8) {
  if (!(window_lo >= 0.0 && window_lo < window_hi && window_hi <= 1.0)) {
    throw ParameterOutOfRange("fit window must satisfy 0 <= lo < hi <= 1");
  }
  std::vector<TraceRecord> usable;
  for (const auto& r : trace.records) {
    if (std::isfinite(r.error)) usable.push_back(r);
  }
  if (usable.empty()) throw InsufficientData("trace has no finite records");
  const double span = static_cast<double>(usable.back().t);
  const auto lo = static_cast<std::size_t>(std::ceil(window_lo * span));
  const auto hi = static_cast<std::size_t>(std::floor(window_hi * span));
  RateFit fit;
  fit.first = lo;
  fit.last = hi;
  std::vector<double> ts, ls;
  for (const auto& r : usable) {
    if (r.t < lo || r.t > hi) continue;
    double e = r.error;
    if (e < 1e-300) {
      e = 1e-300;
      fit.underflow = true;
    }
    ts.push_back(static_cast<double>(r.t));
    ls.push_back(std::log(e));
  }
  if (ts.size() < 10) throw InsufficientData("rate fit needs at least 10 in-window points");
  const double m = static_cast<double>(ts.size());
  double tbar = 0.0, lbar = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    tbar += ts[k];
    lbar += ls[k];
  }
  tbar /= m;
  lbar /= m;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - tbar) * (ts[k] - tbar);
    stl += (ts[k] - tbar) * (ls[k] - lbar);
    sll += (ls[k] - lbar) * (ls[k] - lbar);
  }
  const double slope = stl / stt;
  const double intercept = lbar - slope * tbar;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double r = ls[k] - (intercept + slope * ts[k]);
    ss_res += r * r;
  }
  fit.c1 = std::exp(intercept);
  fit.c2 = -slope;
  // A flat series is fitted exactly by a horizontal line.
  fit.r_squared = sll > 0.0 ? std::clamp(1.0 - ss_res / sll, 0.0, 1.0) : 1.0;
  return fit;
}

struct AlgorithmConfig {
  std::string label;
  Algorithm algorithm = Algorithm::kA2dmmGt;
  AlgorithmParams params;

  bool operator==(const AlgorithmConfig&) const = default;
};

struct ComparisonRow {
  std::string label;
  std::string algorithm;
  double final_error = 0.0;
  double c2 = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  //! First t with e^t <= 1e-6.
  std::optional<std::size_t> iterations_to_threshold;
  bool diverged = false;
  Trace trace;
};

inline constexpr double kThresholdError = 1e-6;

//! Runs every configuration on one instance; rows follow the configuration order.
inline std::vector<ComparisonRow> compare(const Graph& g, const CostEnsemble& costs,
                                          const std::vector<AlgorithmConfig>& configs, const RunOptions& options,
                                          const Vector& x_star, double window_lo = 0.2, double window_hi = 0.8) {
  std::vector<ComparisonRow> rows;
  rows.reserve(configs.size());
  for (const auto& cfg : configs) {
    ComparisonRow row;
    row.label = cfg.label.empty() ? std::string(algorithm_name(cfg.algorithm)) : cfg.label;
    row.algorithm = std::string(algorithm_name(cfg.algorithm));
    row.trace = run(cfg.algorithm, g, costs, cfg.params, options, x_star);
    row.diverged = row.trace.diverged;
    row.final_error = row.trace.final_record().error;
    for (const auto& r : row.trace.records) {
      if (r.error <= kThresholdError) {
        row.iterations_to_threshold = r.t;
        break;
      }
    }
    try {
      const RateFit fit = fit_linear_rate(row.trace, window_lo, window_hi);
      row.c2 = fit.c2;
      row.r_squared = fit.r_squared;
    } catch (const InsufficientData&) {
      // Too short to fit; c2 and r_squared stay NaN.
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline constexpr const char* kTraceCsvHeader = "t,error,consensus,y_residual,s_residual,z_residual";

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.t << ',' << format_number(r.error) << ',' << format_number(r.consensus) << ','
       << format_number(r.y_residual) << ',' << format_number(r.s_residual) << ',' << format_number(r.z_residual)
       << '\n';
  }
}

inline std::vector<TraceRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceCsvHeader) throw ConfigError(1, "unexpected trace CSV header");
  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  auto number = [](const std::string& cell) {
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(cell);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ConfigError(line_no, "trace row needs 6 columns");
    try {
      out.push_back({static_cast<std::size_t>(std::stoull(cells[0])), number(cells[1]), number(cells[2]),
                     number(cells[3]), number(cells[4]), number(cells[5])});
    } catch (const std::logic_error&) {
      throw ConfigError(line_no, "malformed number in trace row");
    }
  }
  return out;
}

inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "label,algorithm,final_error,c2,r_squared,iterations_to_threshold,diverged\n";
  for (const auto& r : rows) {
    os << r.label << ',' << r.algorithm << ',' << format_number(r.final_error) << ',' << format_number(r.c2) << ','
       << format_number(r.r_squared) << ',';
    if (r.iterations_to_threshold) os << *r.iterations_to_threshold;
    os << ',' << (r.diverged ? "true" : "false") << '\n';
  }
}

}  // namespace a2dmm

#endif  // A2DMM_ENGINE_HPP_
