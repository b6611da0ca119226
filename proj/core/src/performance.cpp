#include "mts2/performance.hpp"

#include <cmath>

namespace mts2 {

namespace {

void require_stable(const EffectiveRates& rates, double mu) {
    if (!(mu > 0.0)) {
        throw StabilityViolation("service rate must be positive");
    }
    if (!(rates.lambda[0] >= 0.0) || !(rates.lambda[1] >= 0.0)) {
        throw StabilityViolation("effective rates must be nonnegative");
    }
    if (rates.total() > stability_cap(mu)) {
        throw StabilityViolation("lambda1 + lambda2 exceeds the stable region");
    }
}

void require_type(int type) {
    if (type != 0 && type != 1) {
        throw IndexOutOfRange("type index must be 0 or 1");
    }
}

/// lambda_i / (mu - lambda_j): the product-specific congestion ratio.
double congestion_ratio(int type, const EffectiveRates& rates, double mu) {
    return rates.lambda[type] / (mu - rates.lambda[1 - type]);
}

double log_binomial(long long n, long long k) {
    return std::lgamma(static_cast<double>(n + 1)) -
           std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

double pow_int(double base, long long exponent) {
    if (exponent == 0) {
        return 1.0;
    }
    if (base == 0.0) {
        return 0.0;
    }
    return std::exp(static_cast<double>(exponent) * std::log(base));
}

double queue_length_pmf(long long n, const EffectiveRates& rates, double mu) {
    require_stable(rates, mu);
    if (n < 0) {
        throw IndexOutOfRange("queue length must be nonnegative");
    }
    const double rho = rates.total() / mu;
    return (1.0 - rho) * pow_int(rho, n);
}

double inventory_pmf(int k, int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    const int s = policy.target[type];
    if (k < 0 || k > s) {
        throw IndexOutOfRange("inventory level outside [0, S]");
    }
    const double r = congestion_ratio(type, rates, mu);
    if (k == 0) {
        return pow_int(r, s);
    }
    return (1.0 - r) * pow_int(r, s - k);
}

double backlog_pmf(long long k, int type, const EffectiveRates& rates,
                   const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    if (k < 0) {
        throw IndexOutOfRange("backlog level must be nonnegative");
    }
    const int s = policy.target[type];
    const double r = congestion_ratio(type, rates, mu);
    if (k == 0) {
        return 1.0 - pow_int(r, s + 1);
    }
    return (1.0 - r) * pow_int(r, s + k);
}

double position_pmf(long long n_ahead, long long n_behind, int type,
                    const EffectiveRates& rates, const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    const int s = policy.target[type];
    if (s < 1) {
        throw IndexOutOfRange("position distribution requires S >= 1");
    }
    if (n_ahead < 1 || n_behind < s - 1) {
        return 0.0;
    }
    const double lam_i = rates.lambda[type];
    const double lam_j = rates.lambda[1 - type];
    const double lam_sum = lam_i + lam_j;
    const double slack = mu - lam_sum;

    if (lam_i == 0.0) {
        return 0.0;  // lam_i^S with S >= 1
    }
    const long long e_sum = n_ahead - 1;
    const long long e_j = n_behind - s + 1;
    if (lam_j == 0.0 && e_j > 0) {
        return 0.0;
    }

    double log_p = log_binomial(n_behind, s - 1);
    if (e_sum > 0) {
        log_p += static_cast<double>(e_sum) * std::log(lam_sum);
    }
    log_p += static_cast<double>(s) * std::log(lam_i);
    if (e_j > 0) {
        log_p += static_cast<double>(e_j) * std::log(lam_j);
    }
    log_p += std::log(slack);
    log_p -= static_cast<double>(n_ahead + n_behind + 1) * std::log(mu);
    return std::exp(log_p);
}

double stockout_prob(int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    return pow_int(congestion_ratio(type, rates, mu), policy.target[type]);
}

double expected_wait(int type, const EffectiveRates& rates,
                     const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    const double r = congestion_ratio(type, rates, mu);
    return pow_int(r, policy.target[type]) / (mu - rates.total());
}

double expected_inventory(int type, const EffectiveRates& rates,
                          const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    const int s = policy.target[type];
    const double r = congestion_ratio(type, rates, mu);
    const double depletion = rates.lambda[type] / (mu - rates.total());
    return s - depletion * (1.0 - pow_int(r, s));
}

double expected_backlog(int type, const EffectiveRates& rates,
                        const InventoryPolicy& policy, double mu) {
    require_type(type);
    require_stable(rates, mu);
    const double r = congestion_ratio(type, rates, mu);
    return pow_int(r, policy.target[type]) * rates.lambda[type] / (mu - rates.total());
}

PerformanceReport report(const EffectiveRates& rates, const InventoryPolicy& policy,
                         const MarketParams& params) {
    require_stable(rates, params.mu);
    PerformanceReport out;
    for (int i = 0; i < 2; ++i) {
        out.per_type[i].expected_wait = expected_wait(i, rates, policy, params.mu);
        out.per_type[i].expected_inventory = expected_inventory(i, rates, policy, params.mu);
        out.per_type[i].expected_backlog = expected_backlog(i, rates, policy, params.mu);
        out.per_type[i].stockout_prob = stockout_prob(i, rates, policy, params.mu);
    }
    out.total_utilization = rates.total() / params.mu;
    return out;
}

}  // namespace mts2
