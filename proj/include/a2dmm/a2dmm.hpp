#ifndef A2DMM_A2DMM_HPP_
#define A2DMM_A2DMM_HPP_

#include "a2dmm/errors.hpp"
#include "a2dmm/format.hpp"
#include "a2dmm/topology.hpp"
#include "a2dmm/costs.hpp"
#include "a2dmm/params.hpp"
#include "a2dmm/node_algorithms.hpp"
#include "a2dmm/operator_forms.hpp"
#include "a2dmm/spectra.hpp"
#include "a2dmm/engine.hpp"
#include "a2dmm/config.hpp"
#include "a2dmm/plot.hpp"
#include "a2dmm/harness.hpp"

#endif  // A2DMM_A2DMM_HPP_
