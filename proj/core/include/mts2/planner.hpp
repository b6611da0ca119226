#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mts2/model.hpp"

namespace mts2 {

struct PlannerSolution {
    EffectiveRates rates;
    InventoryPolicy policy;
    double welfare = 0.0;
    std::array<int, 2> subdomain{};
    std::array<double, 2> tolls{};
};

struct PlannerOptions {
    int threads = 1;
    int random_starts = 4;
    std::uint64_t seed = 0x706c616e;
};

/// Half-plane a*l1 + b*l2 <= c with (a, b) normalized to unit length.
struct HalfPlane {
    double a = 0.0, b = 0.0, c = 0.0;
};

/// One cell of the rate-region partition: the set of effective rates whose
/// cost-minimizing base-stock pair equals `labels`. The boundary curves are
/// straight lines, so the closure is a convex polygon.
struct SubdomainRegion {
    std::array<int, 2> labels{};
    std::vector<HalfPlane> closure;  ///< intersection of these half-planes

    /// Half-open membership exactly as the partition defines it.
    bool contains(const EffectiveRates& rates, const MarketParams& params) const;
};

/// Holding plus waiting cost at the given rates and policy.
double total_cost(const EffectiveRates& rates, const InventoryPolicy& policy,
                  const MarketParams& params);

/// Reward minus total cost; prices cancel as transfers.
double social_welfare(const EffectiveRates& rates, const InventoryPolicy& policy,
                      const MarketParams& params);

/// Cost-minimizing base-stock pair for fixed rates (zero at zero demand).
InventoryPolicy optimal_inventory_for_rates(const EffectiveRates& rates,
                                            const MarketParams& params);

/// Strict upper bound on the optimal base-stock of one type over all
/// feasible rates.
int inventory_upper_bound(int type, const MarketParams& params);

SubdomainRegion subdomain_bounds(int s1, int s2, const MarketParams& params);

/// Analytic gradient of the welfare with the base-stock pair held fixed.
std::array<double, 2> sw_gradient(const EffectiveRates& rates, const InventoryPolicy& policy,
                                  const MarketParams& params);

/// Maximizes welfare over the feasible rate box at a fixed policy.
EffectiveRates optimize_rates_for_policy(const InventoryPolicy& policy,
                                         const MarketParams& params,
                                         const PlannerOptions& options = {});

/// Full planner solve: enumerates subdomains, maximizes welfare over each
/// closure by multi-start projected gradient ascent with coordinate
/// refinement, and returns the global optimum with its tolls.
PlannerSolution optimize_welfare(const MarketParams& params, const PlannerOptions& options = {});

/// Admission corrections that make the planner rates a customer equilibrium.
std::array<double, 2> compute_tolls(const EffectiveRates& rates_star,
                                    const MarketParams& params, const InventoryPolicy& policy);

/// Outcome of re-solving the joining game under tolls against a target.
struct TollCheck {
    EffectiveRates induced;      ///< rates the tolled equilibrium produces
    double max_error = 0.0;      ///< worst deviation from the target rates
    bool continuum = false;      ///< target checked against the equilibrium line
};

TollCheck verify_tolls(const MarketParams& params, const InventoryPolicy& policy,
                       const EffectiveRates& target, const std::array<double, 2>& tolls);

}  // namespace mts2
