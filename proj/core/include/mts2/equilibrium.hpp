#pragma once

#include <array>
#include <string>

#include "mts2/model.hpp"

namespace mts2 {

enum class EquilibriumKind { unique, continuum };

/// Result of the customer joining game. `unique` carries the equilibrium
/// profile and its Table cell label. `continuum` (zero-inventory tie case)
/// carries the line q1*Lambda1 + q2*Lambda2 = rate_sum clipped to [0,1]^2.
struct EquilibriumOutcome {
    EquilibriumKind kind = EquilibriumKind::unique;
    JoiningProfile profile{};              ///< unique only
    std::string case_label;                ///< one of the nine cells, e.g. "(q1,0)"
    std::array<double, 2> residuals{};     ///< utilities at the reported profile
    double rate_sum = 0.0;                 ///< continuum only
    std::array<JoiningProfile, 2> endpoints{};  ///< continuum segment ends
};

struct Classification {
    std::string case_label;
    std::array<double, 2> residuals{};
    bool satisfied = false;
};

/// Expected utility of joining for one customer type, given everyone else's
/// strategies. Strictly decreasing in both joining probabilities. Optional
/// per-type admission corrections (tolls) shift the utility additively.
double utility(int type, const JoiningProfile& profile, const MarketParams& params,
               const InventoryPolicy& policy, const std::array<double, 2>& tolls = {0.0, 0.0});

/// The unique fixed point of one type's best response with the other type's
/// strategy held fixed: 0, 1, or the interior root of the utility.
double best_response_fixed_point(int type, double q_other, const MarketParams& params,
                                 const InventoryPolicy& policy,
                                 const std::array<double, 2>& tolls = {0.0, 0.0},
                                 double tol = 1e-12);

/// Solves the joining game. Zero inventory on both products dispatches the
/// closed-form case table; any positive target uses the damped composed
/// best-response iteration. Throws NoConvergence only on pathological input.
EquilibriumOutcome solve_equilibrium(const MarketParams& params, const InventoryPolicy& policy,
                                     const std::array<double, 2>& tolls = {0.0, 0.0});

/// Identifies which of the nine equilibrium cells a profile sits in and
/// checks that cell's utility conditions: equalities within `slack`,
/// inequalities with `slack` of tolerance.
Classification classify(const JoiningProfile& profile, const MarketParams& params,
                        const InventoryPolicy& policy, double slack = 1e-8,
                        const std::array<double, 2>& tolls = {0.0, 0.0});

}  // namespace mts2
