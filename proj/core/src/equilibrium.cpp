#include "mts2/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mts2/performance.hpp"

namespace mts2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool approx_equal_rel(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

std::string cell_label(int code1, int code2) {
    static const char* names[2][3] = {{"0", "q1", "1"}, {"0", "q2", "1"}};
    return std::string("(") + names[0][code1] + "," + names[1][code2] + ")";
}

int position_code(double q) {
    constexpr double eps = 1e-9;
    if (q <= eps) return 0;
    if (q >= 1.0 - eps) return 2;
    return 1;
}

/// Patience ratio c / margin, +inf when the (toll-adjusted) margin vanishes.
double patience_ratio(int type, const MarketParams& params, double toll) {
    const double margin = params.margin(type) - toll;
    return margin > 0.0 ? params.wait_cost[type] / margin : kInf;
}

/// Line q1*L1 + q2*L2 = k clipped to the unit square; returns the two
/// extreme points ordered by (q1, q2).
std::array<JoiningProfile, 2> clip_rate_line(double k, const MarketParams& params) {
    const double l1 = params.lambda_cap[0];
    const double l2 = params.lambda_cap[1];
    constexpr double eps = 1e-12;
    std::vector<std::array<double, 2>> pts;
    auto push = [&](double q1, double q2) {
        q1 = std::clamp(q1, 0.0, 1.0);
        q2 = std::clamp(q2, 0.0, 1.0);
        for (const auto& p : pts) {
            if (std::abs(p[0] - q1) < 1e-10 && std::abs(p[1] - q2) < 1e-10) return;
        }
        pts.push_back({q1, q2});
    };
    if (l1 > 0.0) {
        for (double q2 : {0.0, 1.0}) {
            const double q1 = (k - q2 * l2) / l1;
            if (q1 >= -eps && q1 <= 1.0 + eps) push(q1, q2);
        }
    }
    if (l2 > 0.0) {
        for (double q1 : {0.0, 1.0}) {
            const double q2 = (k - q1 * l1) / l2;
            if (q2 >= -eps && q2 <= 1.0 + eps) push(q1, q2);
        }
    }
    std::sort(pts.begin(), pts.end());
    if (pts.empty()) {
        throw NoConvergence("continuum line misses the unit square");
    }
    return {JoiningProfile{pts.front()}, JoiningProfile{pts.back()}};
}

/// Closed-form dispatch for the zero-inventory game, with toll-adjusted
/// margins. Nine unique cells plus the equal-ratio continuum.
EquilibriumOutcome solve_zero_inventory(const MarketParams& params,
                                        const std::array<double, 2>& tolls) {
    const double mu = params.mu;
    const double l1 = params.lambda_cap[0];
    const double l2 = params.lambda_cap[1];
    const double a1 = patience_ratio(0, params, tolls[0]);
    const double a2 = patience_ratio(1, params, tolls[1]);

    const InventoryPolicy zero{};
    auto finish = [&](double q1, double q2, const std::string& label) {
        EquilibriumOutcome out;
        out.kind = EquilibriumKind::unique;
        out.profile.q = {q1, q2};
        out.case_label = label;
        out.residuals = {utility(0, out.profile, params, zero, tolls),
                         utility(1, out.profile, params, zero, tolls)};
        return out;
    };

    // equal patience ratios with mu strictly inside the partial-joining band
    if (std::isfinite(a1) && std::isfinite(a2) && approx_equal_rel(a1, a2, 1e-12) &&
        a1 < mu && mu < a1 + l1 + l2) {
        EquilibriumOutcome out;
        out.kind = EquilibriumKind::continuum;
        out.case_label = "(q1,q2)";
        out.rate_sum = mu - a1;
        out.endpoints = clip_rate_line(out.rate_sum, params);
        out.profile = out.endpoints[0];
        out.residuals = {utility(0, out.profile, params, zero, tolls),
                         utility(1, out.profile, params, zero, tolls)};
        return out;
    }

    if (a1 <= a2) {
        // type 1 weakly more patient: it joins weakly more
        if (mu <= a1) return finish(0.0, 0.0, "(0,0)");
        if (mu < a1 + l1) return finish((mu - a1) / l1, 0.0, "(q1,0)");
        if (mu <= a2 + l1) return finish(1.0, 0.0, "(1,0)");
        if (mu < a2 + l1 + l2) return finish(1.0, (mu - l1 - a2) / l2, "(1,q2)");
        return finish(1.0, 1.0, "(1,1)");
    }
    if (mu <= a2) return finish(0.0, 0.0, "(0,0)");
    if (mu < a2 + l2) return finish(0.0, (mu - a2) / l2, "(0,q2)");
    if (mu <= a1 + l2) return finish(0.0, 1.0, "(0,1)");
    if (mu < a1 + l1 + l2) return finish((mu - l2 - a1) / l1, 1.0, "(q1,1)");
    return finish(1.0, 1.0, "(1,1)");
}

}  // namespace

double utility(int type, const JoiningProfile& profile, const MarketParams& params,
               const InventoryPolicy& policy, const std::array<double, 2>& tolls) {
    if (type != 0 && type != 1) {
        throw IndexOutOfRange("type index must be 0 or 1");
    }
    const double mu = params.mu;
    const double lam_i = profile.q[type] * params.lambda_cap[type];
    const double lam_j = profile.q[1 - type] * params.lambda_cap[1 - type];
    // clamp to the stability margin; with validated params and q in [0,1]^2
    // the clamp is inactive
    const double slack = std::max(mu - lam_i - lam_j, mu * kStabilityMargin);
    const double r = lam_i / std::max(mu - lam_j, mu * kStabilityMargin);
    const double wait = pow_int(r, policy.target[type]) / slack;
    return params.margin(type) - tolls[type] - params.wait_cost[type] * wait;
}

double best_response_fixed_point(int type, double q_other, const MarketParams& params,
                                 const InventoryPolicy& policy,
                                 const std::array<double, 2>& tolls, double tol) {
    JoiningProfile probe;
    probe.q[1 - type] = q_other;

    probe.q[type] = 0.0;
    if (utility(type, probe, params, policy, tolls) <= 0.0) return 0.0;
    probe.q[type] = 1.0;
    if (utility(type, probe, params, policy, tolls) >= 0.0) return 1.0;

    // unique interior root: the utility is continuous and strictly decreasing
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        probe.q[type] = mid;
        if (utility(type, probe, params, policy, tolls) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

EquilibriumOutcome solve_equilibrium(const MarketParams& params, const InventoryPolicy& policy,
                                     const std::array<double, 2>& tolls) {
    // The joining game is well-posed for any demand level: customers balk
    // enough to keep the joined rates stable. Only the non-demand parameters
    // need checking here; Lambda1 + Lambda2 >= mu is fine.
    MarketParams relaxed = params;
    relaxed.lambda_cap = {0.0, 0.0};
    validate(relaxed);
    if (params.lambda_cap[0] < 0.0 || params.lambda_cap[1] < 0.0 ||
        !std::isfinite(params.lambda_cap[0]) || !std::isfinite(params.lambda_cap[1])) {
        throw NonpositiveRate("arrival rates must be finite and >= 0");
    }
    if (policy.target[0] < 0 || policy.target[1] < 0) {
        throw IndexOutOfRange("base-stock targets must be nonnegative");
    }

    if (policy.target[0] == 0 && policy.target[1] == 0) {
        return solve_zero_inventory(params, tolls);
    }

    // Composed best-response iteration: q1 <- f1(f2(q1)). The composition is
    // increasing with slope below one, so plain iteration converges; a 0.5
    // damping factor kicks in only if the residual ever oscillates.
    constexpr int max_iters = 10000;
    constexpr double iter_tol = 1e-10;
    double q1 = 1.0;
    double q2 = 0.0;
    double prev_delta = 0.0;
    int flips = 0;
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
        q2 = best_response_fixed_point(1, q1, params, policy, tolls);
        const double next = best_response_fixed_point(0, q2, params, policy, tolls);
        const double delta = next - q1;
        if (std::abs(delta) <= iter_tol) {
            q1 = next;
            converged = true;
            break;
        }
        if (delta * prev_delta < 0.0 && ++flips >= 2) {
            q1 = 0.5 * (q1 + next);
        } else {
            q1 = next;
        }
        prev_delta = delta;
    }
    if (!converged) {
        throw NoConvergence("best-response iteration did not settle");
    }
    q2 = best_response_fixed_point(1, q1, params, policy, tolls);

    EquilibriumOutcome out;
    out.kind = EquilibriumKind::unique;
    out.profile.q = {q1, q2};
    const Classification check = classify(out.profile, params, policy, 1e-8, tolls);
    if (!check.satisfied) {
        throw NotAnEquilibrium("solver output fails its cell conditions");
    }
    out.case_label = check.case_label;
    out.residuals = check.residuals;
    return out;
}

Classification classify(const JoiningProfile& profile, const MarketParams& params,
                        const InventoryPolicy& policy, double slack,
                        const std::array<double, 2>& tolls) {
    Classification out;
    const std::array<int, 2> codes{position_code(profile.q[0]), position_code(profile.q[1])};
    out.case_label = cell_label(codes[0], codes[1]);
    out.residuals = {utility(0, profile, params, policy, tolls),
                     utility(1, profile, params, policy, tolls)};
    out.satisfied = true;
    for (int i = 0; i < 2; ++i) {
        const double u = out.residuals[i];
        switch (codes[i]) {
            case 0: out.satisfied = out.satisfied && u <= slack; break;
            case 1: out.satisfied = out.satisfied && std::abs(u) <= slack; break;
            case 2: out.satisfied = out.satisfied && u >= -slack; break;
        }
    }
    return out;
}

}  // namespace mts2
