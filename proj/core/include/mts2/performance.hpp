#pragma once

#include <array>
#include <cstdint>

#include "mts2/model.hpp"

namespace mts2 {

struct TypeMeasures {
    double expected_wait = 0.0;        ///< unconditional mean over all joining customers
    double expected_inventory = 0.0;   ///< time-average on-hand stock, in [0, S_i]
    double expected_backlog = 0.0;     ///< time-average number of waiting customers
    double stockout_prob = 0.0;        ///< P{I_i = 0}
};

struct PerformanceReport {
    std::array<TypeMeasures, 2> per_type{};
    double total_utilization = 0.0;    ///< (lambda1 + lambda2) / mu
};

/// Nonnegative integer power with the 0^0 = 1 convention.
double pow_int(double base, long long exponent);

/// P{N = n} for the total job count: geometric with ratio (lambda1+lambda2)/mu.
double queue_length_pmf(long long n, const EffectiveRates& rates, double mu);

/// P{I_type = k}, k in [0, S_type].
double inventory_pmf(int k, int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu);

/// P{B_type = k}, k >= 0.
double backlog_pmf(long long k, int type, const EffectiveRates& rates,
                   const InventoryPolicy& policy, double mu);

/// Joint law of the queue position of a backlogged type arrival: n_ahead jobs
/// up to and including the one whose completion serves it, n_behind strictly
/// behind. Sub-normalized: total mass equals the stockout probability.
/// Requires S_type >= 1; zero outside n_ahead >= 1, n_behind >= S_type - 1.
double position_pmf(long long n_ahead, long long n_behind, int type,
                    const EffectiveRates& rates, const InventoryPolicy& policy, double mu);

double stockout_prob(int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu);
double expected_wait(int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu);
double expected_inventory(int type, const EffectiveRates& rates,
                          const InventoryPolicy& policy, double mu);
double expected_backlog(int type, const EffectiveRates& rates,
                        const InventoryPolicy& policy, double mu);

PerformanceReport report(const EffectiveRates& rates, const InventoryPolicy& policy,
                         const MarketParams& params);

}  // namespace mts2
