#include "mts2/model.hpp"

#include <cmath>
#include <string>

namespace mts2 {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void validate(const MarketParams& p) {
    if (!std::isfinite(p.mu) || p.mu <= 0.0) {
        throw NonpositiveRate("service rate mu must be finite and > 0");
    }
    for (int i = 0; i < 2; ++i) {
        const std::string tag = std::to_string(i + 1);
        if (!finite_nonneg(p.lambda_cap[i])) {
            throw NonpositiveRate("arrival rate Lambda" + tag + " must be finite and >= 0");
        }
        if (!std::isfinite(p.wait_cost[i]) || p.wait_cost[i] <= 0.0) {
            throw NonpositiveRate("waiting cost c" + tag + " must be finite and > 0");
        }
        if (!std::isfinite(p.hold_cost[i]) || p.hold_cost[i] <= 0.0) {
            throw NonpositiveRate("holding cost h" + tag + " must be finite and > 0");
        }
        if (!std::isfinite(p.reward[i]) || !std::isfinite(p.price[i]) ||
            !finite_nonneg(p.price[i])) {
            throw NonpositiveRate("reward/price for type " + tag + " must be finite, price >= 0");
        }
        if (p.margin(i) <= 0.0) {
            throw NonpositiveMargin("reward R" + tag + " must exceed price p" + tag);
        }
    }
    if (p.lambda_cap[0] + p.lambda_cap[1] >= p.mu) {
        throw StabilityViolation("Lambda1 + Lambda2 must be < mu");
    }
}

EffectiveRates effective_rates(const JoiningProfile& profile, const MarketParams& params) {
    EffectiveRates rates;
    for (int i = 0; i < 2; ++i) {
        rates.lambda[i] = profile.q[i] * params.lambda_cap[i];
    }
    return rates;
}

}  // namespace mts2
