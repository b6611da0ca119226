#pragma once

#include <array>

#include "mts2/equilibrium.hpp"
#include "mts2/model.hpp"

namespace mts2 {

struct ProducerSolution {
    InventoryPolicy policy;
    EquilibriumOutcome equilibrium;
    JoiningProfile realized_profile;   ///< continuum: the min-profit endpoint
    double profit = 0.0;
    std::array<int, 2> thresholds{};   ///< search bounds beyond which all customers join
};

/// Profit at one inventory pair together with the equilibrium it induces.
struct ProfitEval {
    double profit = 0.0;
    EquilibriumOutcome equilibrium;
    JoiningProfile realized_profile;
};

/// Smallest base-stock level at which a type-i customer joins even when
/// everyone joins. Zero when the type has no demand.
int joining_threshold(int type, const MarketParams& params);

/// Revenue minus holding cost at the equilibrium induced by `policy`.
/// On a continuum outcome returns the lowest profit over the segment.
ProfitEval evaluate_profit(const InventoryPolicy& policy, const MarketParams& params);
double expected_profit(const InventoryPolicy& policy, const MarketParams& params);

/// Exhaustive search over {0..threshold1} x {0..threshold2}; ties resolved
/// toward the lexicographically smallest pair.
ProducerSolution optimize_policy(const MarketParams& params, int threads = 1);

}  // namespace mts2
