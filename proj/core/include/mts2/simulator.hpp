#pragma once

#include <array>
#include <cstdint>

#include "mts2/model.hpp"

namespace mts2 {

struct SimConfig {
    long long num_arrivals = 100000;  ///< joining customers per replication, >= 1000
    double warmup_fraction = 0.2;     ///< fraction of arrivals discarded, in [0, 1)
    int replications = 10;
    std::uint64_t seed = 0x6d74733273696d;  ///< per-replication seeds are seed + index
    bool paranoid = false;            ///< re-check state invariants at every event
};

/// Point estimate with its 95% confidence half-width over replications.
struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;
    double std_error = 0.0;
    bool defined = true;  ///< false when no sample exists (e.g. no arrivals of a type)
};

struct TypeEstimates {
    Estimate mean_wait;           ///< customer average, zero for stock-served arrivals
    Estimate time_avg_inventory;
    Estimate time_avg_backlog;
    Estimate stockout_fraction;   ///< fraction of arrivals finding zero stock
};

struct SimEstimates {
    std::array<TypeEstimates, 2> per_type{};
    Estimate realized_utilization;
    long long arrivals_per_rep = 0;
    int replications = 0;
    std::uint64_t seed = 0;
};

/// Event-driven simulation of the two-product shared-server make-to-stock
/// system under the given joining profile. Deterministic for a fixed
/// (seed, config) pair. Throws DegenerateConfig when both effective rates
/// are zero and StabilityViolation outside the stable region.
SimEstimates simulate(const MarketParams& params, const InventoryPolicy& policy,
                      const JoiningProfile& profile, const SimConfig& config);

/// Two-sided 95% Student-t critical value used for the replication CIs.
double student_t_975(int degrees_of_freedom);

}  // namespace mts2
