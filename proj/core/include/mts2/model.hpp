#pragma once

#include <array>

#include "mts2/errors.hpp"

namespace mts2 {

/// Relative stability margin: internal evaluations keep
/// lambda1 + lambda2 <= mu * (1 - kStabilityMargin).
inline constexpr double kStabilityMargin = 1e-9;

/// All exogenous scalars of the market. Types are indexed 0 and 1
/// internally; user-facing labels are 1-based.
struct MarketParams {
    double mu = 1.0;                       ///< service rate, > 0
    std::array<double, 2> lambda_cap{};    ///< potential arrival rates, >= 0
    std::array<double, 2> reward{};        ///< reward per served customer
    std::array<double, 2> price{};         ///< price paid on joining
    std::array<double, 2> wait_cost{};     ///< waiting cost per unit time, > 0
    std::array<double, 2> hold_cost{};     ///< holding cost per unit per time, > 0

    double margin(int type) const { return reward[type] - price[type]; }
};

/// Pair of nonnegative integer base-stock targets.
struct InventoryPolicy {
    std::array<int, 2> target{0, 0};
};

/// Per-type joining probabilities in [0, 1].
struct JoiningProfile {
    std::array<double, 2> q{1.0, 1.0};
};

/// Effective (joined) arrival rates.
struct EffectiveRates {
    std::array<double, 2> lambda{0.0, 0.0};

    double total() const { return lambda[0] + lambda[1]; }
};

/// Largest total arrival rate treated as stable for the given service rate.
inline double stability_cap(double mu) { return mu * (1.0 - kStabilityMargin); }

/// Checks all model invariants. Throws StabilityViolation, NonpositiveMargin
/// or NonpositiveRate; returns normally when the parameters are usable.
void validate(const MarketParams& params);

/// lambda_i = q_i * Lambda_i.
EffectiveRates effective_rates(const JoiningProfile& profile, const MarketParams& params);

}  // namespace mts2
