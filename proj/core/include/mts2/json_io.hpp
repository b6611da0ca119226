#pragma once

#include <string>

#include "mts2/equilibrium.hpp"
#include "mts2/model.hpp"
#include "mts2/performance.hpp"
#include "mts2/planner.hpp"
#include "mts2/producer.hpp"
#include "mts2/simulator.hpp"

namespace mts2 {

/// Parses the configuration document. Required keys, no others: mu,
/// lambda_cap, reward, price, wait_cost, hold_cost (the array keys hold
/// one value per type). Throws ConfigError on malformed input.
MarketParams params_from_json(const std::string& text);
MarketParams load_params_file(const std::string& path);

std::string to_json(const MarketParams& params);
std::string to_json(const PerformanceReport& report);
std::string to_json(const EquilibriumOutcome& outcome);
std::string to_json(const ProducerSolution& solution);
std::string to_json(const PlannerSolution& solution);
std::string to_json(const SimEstimates& estimates);

/// simulate --compare payload: estimates, the closed-form report and
/// per-measure z-scores.
std::string comparison_json(const SimEstimates& estimates, const PerformanceReport& report);

/// tolls payload: the planner (or fixed-policy) solution plus the result of
/// re-solving the joining game under the computed tolls.
std::string tolls_json(const PlannerSolution& solution, const TollCheck& check);

}  // namespace mts2
