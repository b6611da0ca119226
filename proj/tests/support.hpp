#pragma once

#include <cstdint>
#include <random>

#include "mts2/model.hpp"

namespace mts2::test {

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
};

/// Valid market with demand bounded away from the capacity edge.
inline MarketParams random_params(Rng& rng, double max_load = 0.9) {
    MarketParams p;
    p.mu = rng.uniform(0.5, 2.0);
    const double total = rng.uniform(0.2, max_load) * p.mu;
    const double share = rng.uniform(0.1, 0.9);
    p.lambda_cap = {total * share, total * (1.0 - share)};
    for (int i = 0; i < 2; ++i) {
        p.price[i] = rng.uniform(0.5, 5.0);
        p.reward[i] = p.price[i] + rng.uniform(1.0, 8.0);
        p.wait_cost[i] = rng.uniform(0.3, 5.0);
        p.hold_cost[i] = rng.uniform(0.05, 2.0);
    }
    return p;
}

/// Rates inside the feasible box, at least `headroom` of mu away from the
/// stability edge.
inline EffectiveRates random_rates(Rng& rng, const MarketParams& p, double headroom = 0.05) {
    EffectiveRates rates;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        rates.lambda = {rng.uniform(0.0, p.lambda_cap[0]), rng.uniform(0.0, p.lambda_cap[1])};
        if (rates.total() <= p.mu * (1.0 - headroom)) return rates;
    }
    rates.lambda = {0.0, 0.0};
    return rates;
}

inline MarketParams baseline_params() {
    MarketParams p;
    p.mu = 1.0;
    p.lambda_cap = {0.45, 0.45};
    p.reward = {10.0, 10.0};
    p.price = {5.0, 5.0};
    p.wait_cost = {3.0, 3.0};
    p.hold_cost = {0.4, 0.4};
    return p;
}

}  // namespace mts2::test
