#include <cmath>

#include "doctest.h"
#include "mts2/performance.hpp"
#include "mts2/planner.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mts2;

namespace {

EffectiveRates rates_of(double l1, double l2) {
    EffectiveRates r;
    r.lambda = {l1, l2};
    return r;
}

InventoryPolicy stock(int s1, int s2) {
    InventoryPolicy p;
    p.target = {s1, s2};
    return p;
}

MarketParams kappa20() {
    MarketParams p = test::baseline_params();
    p.wait_cost[1] = 60.0;
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("planner");

TEST_CASE("total cost closed forms") {
    const MarketParams p = test::baseline_params();
    CHECK(total_cost(rates_of(0, 0), stock(2, 1), p) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(total_cost(rates_of(0.45, 0), stock(2, 0), p) ==
          doctest::Approx(0.4 * 1.3475 + 3.0 * 0.45 * (0.2025 / 0.55)).epsilon(1e-12));
    // zero stock: waiting cost only
    CHECK(total_cost(rates_of(0.3, 0.2), stock(0, 0), p) ==
          doctest::Approx(3.0 * 0.3 * 2.0 + 3.0 * 0.2 * 2.0).epsilon(1e-12));
}

TEST_CASE("social welfare closed forms") {
    const MarketParams p = test::baseline_params();
    CHECK(social_welfare(rates_of(0.45, 0), stock(2, 0), p) ==
          doctest::Approx(3.4639545454545454).epsilon(1e-12));
    CHECK(social_welfare(rates_of(0.45, 0), stock(1, 0), p) ==
          doctest::Approx(3.1754545454545454).epsilon(1e-12));
    CHECK(social_welfare(rates_of(0, 0), stock(0, 0), p) == 0.0);
}

TEST_CASE("cost-minimizing stock formula") {
    const MarketParams p = test::baseline_params();
    CHECK(optimal_inventory_for_rates(rates_of(0.45, 0), p).target ==
          std::array<int, 2>{2, 0});
    CHECK(optimal_inventory_for_rates(rates_of(0.45, 0.45), p).target ==
          std::array<int, 2>{10, 10});
    CHECK(optimal_inventory_for_rates(rates_of(1e-9, 1e-9), p).target ==
          std::array<int, 2>{0, 0});
}

TEST_CASE("stock formula matches brute-force minimization") {
    test::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const MarketParams p = test::random_params(rng);
        const EffectiveRates r = test::random_rates(rng, p);
        const InventoryPolicy predicted = optimal_inventory_for_rates(r, p);
        for (int i = 0; i < 2; ++i) {
            if (r.lambda[i] <= 0.0) {
                CHECK(predicted.target[i] == 0);
                continue;
            }
            const int cap = 3 * std::max(1, inventory_upper_bound(i, p));
            CHECK(predicted.target[i] == test::brute_force_optimal_stock(i, r, p, cap));
        }
    }
}

TEST_CASE("stock cost differences increase") {
    test::Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const MarketParams p = test::random_params(rng);
        EffectiveRates r = test::random_rates(rng, p);
        for (int i = 0; i < 2; ++i) {
            if (r.lambda[i] <= 1e-9) continue;
            const double ratio = r.lambda[i] / (p.mu - r.lambda[1 - i]);
            double prev_delta = -1e300;
            for (int s = 0; s < 12; ++s) {
                const double delta = test::single_type_cost(i, s + 1, r, p) -
                                     test::single_type_cost(i, s, r, p);
                // strict growth while the geometric term is resolvable in
                // doubles; beyond that the difference saturates at h_i
                const double scale =
                    (p.hold_cost[i] + p.wait_cost[i]) * std::pow(ratio, s + 1);
                if (scale > 1e-10) {
                    CHECK(delta > prev_delta);
                } else {
                    CHECK(delta >= prev_delta - 1e-12);
                }
                prev_delta = delta;
            }
        }
    }
}

TEST_CASE("inventory upper bound") {
    CHECK(inventory_upper_bound(0, test::baseline_params()) == 3);
    MarketParams p = test::baseline_params();
    p.lambda_cap[0] = 0.0;
    CHECK(inventory_upper_bound(0, p) == 0);

    test::Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const MarketParams q = test::random_params(rng);
        const EffectiveRates r = test::random_rates(rng, q);
        // the published bound is strict whenever the other product is idle
        EffectiveRates solo = r;
        solo.lambda[1] = 0.0;
        CHECK(optimal_inventory_for_rates(solo, q).target[0] <
              std::max(1, inventory_upper_bound(0, q)));
        // the full-demand stock dominates every interior optimum, which is
        // what the welfare search enumerates against
        EffectiveRates caps;
        caps.lambda = q.lambda_cap;
        const InventoryPolicy at_caps = optimal_inventory_for_rates(caps, q);
        const InventoryPolicy opt = optimal_inventory_for_rates(r, q);
        CHECK(opt.target[0] <= at_caps.target[0]);
        CHECK(opt.target[1] <= at_caps.target[1]);
    }
}

TEST_CASE("subdomain membership") {
    const MarketParams p = test::baseline_params();
    CHECK(subdomain_bounds(2, 0, p).contains(rates_of(0.45, 0), p));
    CHECK_FALSE(subdomain_bounds(1, 0, p).contains(rates_of(0.45, 0), p));
    CHECK(subdomain_bounds(0, 0, p).contains(rates_of(1e-6, 1e-6), p));

    // a point exactly on the upper curve belongs to the cell below it
    const double beta = 0.4 / 3.4;
    const double boundary = std::pow(beta, 1.0 / 2.0) * p.mu;  // r^2 == beta at l2 = 0
    EffectiveRates edge = rates_of(boundary, 0.0);
    if (edge.lambda[0] <= p.lambda_cap[0]) {
        CHECK(subdomain_bounds(1, 0, p).contains(edge, p));
        CHECK(optimal_inventory_for_rates(edge, p).target[0] == 1);
    }
}

TEST_CASE("partition agrees with the stock formula") {
    test::Rng rng(44);
    for (int trial = 0; trial < 1000; ++trial) {
        const MarketParams p = test::random_params(rng);
        const EffectiveRates r = test::random_rates(rng, p);
        const InventoryPolicy opt = optimal_inventory_for_rates(r, p);
        CHECK(subdomain_bounds(opt.target[0], opt.target[1], p).contains(r, p));
        // and no neighboring cell claims the same point
        for (int d1 = -1; d1 <= 1; ++d1) {
            for (int d2 = -1; d2 <= 1; ++d2) {
                if (d1 == 0 && d2 == 0) continue;
                const int s1 = opt.target[0] + d1;
                const int s2 = opt.target[1] + d2;
                if (s1 < 0 || s2 < 0) continue;
                CHECK_FALSE(subdomain_bounds(s1, s2, p).contains(r, p));
            }
        }
    }
}

TEST_CASE("welfare gradient closed form") {
    const MarketParams p = test::baseline_params();
    const auto at_origin = sw_gradient(rates_of(0, 0), stock(0, 0), p);
    CHECK(at_origin[0] == doctest::Approx(10.0 - 3.0).epsilon(1e-12));
    CHECK(at_origin[1] == doctest::Approx(10.0 - 3.0).epsilon(1e-12));

    const auto symmetric = sw_gradient(rates_of(0.3, 0.3), stock(2, 2), p);
    CHECK(symmetric[0] == doctest::Approx(symmetric[1]).epsilon(1e-12));
}

TEST_CASE("welfare gradient matches finite differences") {
    test::Rng rng(45);
    constexpr double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const MarketParams p = test::random_params(rng, 0.8);
        EffectiveRates r = test::random_rates(rng, p, 0.1);
        r.lambda[0] = std::max(r.lambda[0], 1e-3);
        r.lambda[1] = std::max(r.lambda[1], 1e-3);
        const InventoryPolicy s = stock(rng.uniform_int(0, 5), rng.uniform_int(0, 5));
        const auto grad = sw_gradient(r, s, p);
        for (int i = 0; i < 2; ++i) {
            EffectiveRates hi = r, lo = r;
            hi.lambda[i] += h;
            lo.lambda[i] -= h;
            const double fd =
                (social_welfare(hi, s, p) - social_welfare(lo, s, p)) / (2.0 * h);
            CHECK(std::abs(fd - grad[i]) <= 1e-5 * std::max(1.0, std::abs(grad[i])));
        }
    }
}

TEST_CASE("welfare optimization on the scarce-stock market") {
    const PlannerSolution sol = optimize_welfare(kappa20());
    CHECK(sol.policy.target == std::array<int, 2>{2, 0});
    CHECK(sol.rates.lambda[0] == doctest::Approx(0.45).epsilon(1e-9));
    CHECK(sol.rates.lambda[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.welfare == doctest::Approx(3.4639545454545454).epsilon(1e-9));
    CHECK(sol.subdomain == sol.policy.target);
}

TEST_CASE("symmetric market gets a symmetric plan") {
    const PlannerSolution sol = optimize_welfare(test::baseline_params());
    CHECK(sol.policy.target[0] == sol.policy.target[1]);
    CHECK(sol.rates.lambda[0] == doctest::Approx(sol.rates.lambda[1]).epsilon(1e-9));
}

TEST_CASE("huge rewards admit everyone") {
    MarketParams p = test::baseline_params();
    p.reward = {1e6, 1e6};
    const PlannerSolution sol = optimize_welfare(p);
    CHECK(sol.rates.lambda[0] == doctest::Approx(0.45).epsilon(1e-9));
    CHECK(sol.rates.lambda[1] == doctest::Approx(0.45).epsilon(1e-9));
}

TEST_CASE("no demand at all is rejected") {
    MarketParams p = test::baseline_params();
    p.lambda_cap = {0.0, 0.0};
    CHECK_THROWS_AS(optimize_welfare(p), EmptyFeasibleRegion);
}

TEST_CASE("optimizer dominates a brute-force grid") {
    test::Rng rng(46);
    for (int trial = 0; trial < 5; ++trial) {
        const MarketParams p = test::random_params(rng, 0.85);
        const PlannerSolution sol = optimize_welfare(p);
        double best_grid = -1e300;
        constexpr int kGrid = 200;
        for (int i = 0; i <= kGrid; ++i) {
            for (int j = 0; j <= kGrid; ++j) {
                EffectiveRates r = rates_of(p.lambda_cap[0] * i / kGrid,
                                            p.lambda_cap[1] * j / kGrid);
                if (r.total() > stability_cap(p.mu)) continue;
                const InventoryPolicy s = optimal_inventory_for_rates(r, p);
                best_grid = std::max(best_grid, social_welfare(r, s, p));
            }
        }
        CHECK(sol.welfare >= best_grid - 1e-6);
    }
}

TEST_CASE("tolls make the planner rates an equilibrium") {
    const MarketParams p = kappa20();
    const PlannerSolution sol = optimize_welfare(p);
    CHECK(sol.tolls[0] == doctest::Approx(5.0 - 3.0 * (0.2025 / 0.55)).epsilon(1e-9));

    const TollCheck check = verify_tolls(p, sol.policy, sol.rates, sol.tolls);
    CHECK(check.max_error <= 1e-6);

    // a market already indifferent at its target needs no correction
    MarketParams q = test::baseline_params();
    const EffectiveRates target = rates_of(0.25, 0.15);  // slack 0.6, wait 5/3
    q.wait_cost = {3.0, 3.0};
    const auto tolls = compute_tolls(target, q, stock(0, 0));
    CHECK(tolls[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tolls[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fixed-policy rate optimization stays in the box") {
    const MarketParams p = kappa20();
    const EffectiveRates r = optimize_rates_for_policy(stock(2, 0), p);
    CHECK(r.lambda[0] == doctest::Approx(0.45).epsilon(1e-9));
    CHECK(r.lambda[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(social_welfare(r, stock(2, 0), p) >=
          social_welfare(rates_of(0.4, 0.0), stock(2, 0), p));
}

TEST_SUITE_END();
