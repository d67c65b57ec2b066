#ifndef A2DMM_PARAMS_HPP_
#define A2DMM_PARAMS_HPP_

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "a2dmm/errors.hpp"

namespace a2dmm {

enum class Algorithm { kA2dmmGt, kAdmmGt, kDiging };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kA2dmmGt: return "a2dmm-gt";
    case Algorithm::kAdmmGt: return "admm-gt";
    case Algorithm::kDiging: return "diging";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "a2dmm-gt") return Algorithm::kA2dmmGt;
  if (name == "admm-gt") return Algorithm::kAdmmGt;
  if (name == "diging") return Algorithm::kDiging;
  throw Error("unknown algorithm identifier '" + std::string(name) + "'");
}

//! Which [y; s] pair enters the edge-variable update of slot (i, j).
enum class ZIndexConvention {
  //! Neighbor j's fresh [y_j; s_j], as carried by the edge message (matches the stacked P A v form).
  kNeighbor,
  //! Node i's own [y_i; s_i]. Experimental; does not match the stacked form.
  kOwn,
};

struct AlgorithmParams {
  double gamma = 0.1;    //!< step size
  double rho = 1.0;      //!< ADMM penalty
  double alpha = 0.9;    //!< relaxation
  double lambda = 1.0;   //!< tracker momentum
  double mu = 1.0;       //!< edge-variable momentum
  double epsilon = 1.0;  //!< edge-variable damping
  ZIndexConvention z_index = ZIndexConvention::kNeighbor;

  bool operator==(const AlgorithmParams&) const = default;
};

/// Checks hard ranges and returns soft-range warnings.
///
/// Hard: gamma > 0, rho > 0, alpha in (0,1), epsilon in (0,1]. epsilon = 1
/// together with mu = lambda = 1 is the non-accelerated reduction.
/// Soft: lambda and mu inside (1,2).
inline std::vector<std::string> validate_params(const AlgorithmParams& p) {
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw ParameterOutOfRange("gamma must be > 0");
  if (!(p.rho > 0.0) || !std::isfinite(p.rho)) throw ParameterOutOfRange("rho must be > 0");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ParameterOutOfRange("alpha must lie in (0,1)");
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw ParameterOutOfRange("epsilon must lie in (0,1]");
  if (!std::isfinite(p.lambda) || !std::isfinite(p.mu)) throw ParameterOutOfRange("lambda and mu must be finite");
  std::vector<std::string> warnings;
  if (!(p.lambda > 1.0 && p.lambda < 2.0)) {
    warnings.push_back("lambda = " + std::to_string(p.lambda) + " lies outside the analyzed range (1,2)");
  }
  if (!(p.mu > 1.0 && p.mu < 2.0)) {
    warnings.push_back("mu = " + std::to_string(p.mu) + " lies outside the analyzed range (1,2)");
  }
  if (p.z_index == ZIndexConvention::kOwn) {
    warnings.push_back("own-index edge update does not match the stacked network dynamics");
  }
  return warnings;
}

}  // namespace a2dmm

#endif  // A2DMM_PARAMS_HPP_
