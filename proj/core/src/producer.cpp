#include "mts2/producer.hpp"

#include <cmath>
#include <vector>

#include "mts2/parallel.hpp"
#include "mts2/performance.hpp"

namespace mts2 {

namespace {

double revenue(const JoiningProfile& q, const MarketParams& p) {
    return p.price[0] * p.lambda_cap[0] * q.q[0] + p.price[1] * p.lambda_cap[1] * q.q[1];
}

double profit_at(const JoiningProfile& q, const InventoryPolicy& policy,
                 const MarketParams& p) {
    const EffectiveRates rates = effective_rates(q, p);
    double holding = 0.0;
    for (int i = 0; i < 2; ++i) {
        holding += p.hold_cost[i] * expected_inventory(i, rates, policy, p.mu);
    }
    return revenue(q, p) - holding;
}

}  // namespace

int joining_threshold(int type, const MarketParams& params) {
    validate(params);
    if (params.lambda_cap[type] <= 0.0) return 0;
    const JoiningProfile everyone{{1.0, 1.0}};
    InventoryPolicy policy;
    for (int s = 0; s < 1000000; ++s) {
        policy.target[type] = s;
        if (utility(type, everyone, params, policy) >= 0.0) return s;
    }
    throw NoConvergence("joining threshold search ran away");
}

ProfitEval evaluate_profit(const InventoryPolicy& policy, const MarketParams& params) {
    ProfitEval eval;
    eval.equilibrium = solve_equilibrium(params, policy);
    if (eval.equilibrium.kind == EquilibriumKind::unique) {
        eval.realized_profile = eval.equilibrium.profile;
        eval.profit = profit_at(eval.realized_profile, policy, params);
        return eval;
    }
    // Continuum only occurs at zero inventory, so profit is pure revenue,
    // linear along the segment: the minimum sits at an endpoint.
    double worst = 0.0;
    bool first = true;
    for (const JoiningProfile& end : eval.equilibrium.endpoints) {
        const double value = revenue(end, params);
        if (first || value < worst) {
            worst = value;
            eval.realized_profile = end;
            first = false;
        }
    }
    eval.profit = worst;
    return eval;
}

double expected_profit(const InventoryPolicy& policy, const MarketParams& params) {
    return evaluate_profit(policy, params).profit;
}

ProducerSolution optimize_policy(const MarketParams& params, int threads) {
    validate(params);
    const std::array<int, 2> bounds{joining_threshold(0, params), joining_threshold(1, params)};
    const int n1 = bounds[0] + 1;
    const int n2 = bounds[1] + 1;

    std::vector<ProfitEval> evals(static_cast<std::size_t>(n1) * n2);
    parallel_for(n1 * n2, threads, [&](int idx) {
        InventoryPolicy policy;
        policy.target[0] = idx / n2;
        policy.target[1] = idx % n2;
        evals[idx] = evaluate_profit(policy, params);
    });

    int best = 0;
    for (int idx = 1; idx < n1 * n2; ++idx) {
        const double tie_eps = 1e-12 * std::max(1.0, std::abs(evals[best].profit));
        if (evals[idx].profit > evals[best].profit + tie_eps) {
            best = idx;
        }
        // ties keep the lexicographically smaller pair, which is the one
        // visited first in row-major order
    }

    ProducerSolution out;
    out.policy.target = {best / n2, best % n2};
    out.equilibrium = evals[best].equilibrium;
    out.realized_profile = evals[best].realized_profile;
    out.profit = evals[best].profit;
    out.thresholds = bounds;
    return out;
}

}  // namespace mts2
