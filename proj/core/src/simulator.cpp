#include "mts2/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace mts2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen for reproducibility: the
/// sequence is fully determined by the 64-bit seed on every platform.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform draw strictly inside (0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }
};

struct Backorder {
    double arrival_time;
    long long arrival_index;
};

struct RepStats {
    std::array<double, 2> mean_wait{};
    std::array<double, 2> avg_inventory{};
    std::array<double, 2> avg_backlog{};
    std::array<double, 2> stockout_fraction{};
    std::array<bool, 2> has_arrivals{};
    double utilization = 0.0;
};

RepStats run_replication(const MarketParams& params, const InventoryPolicy& policy,
                         const EffectiveRates& rates, const SimConfig& config,
                         std::uint64_t seed) {
    SplitMix64 rng(seed);

    const double mu = params.mu;
    const std::array<double, 2> lam = rates.lambda;

    std::array<long long, 2> inv{policy.target[0], policy.target[1]};
    std::array<std::deque<Backorder>, 2> backlog;
    std::deque<int> queue;  // job types, head is in service

    double now = 0.0;
    std::array<double, 2> next_arrival{
        lam[0] > 0.0 ? rng.exponential(lam[0]) : kInf,
        lam[1] > 0.0 ? rng.exponential(lam[1]) : kInf,
    };
    double service_end = kInf;

    const long long total_arrivals = config.num_arrivals;
    const long long warmup_arrivals =
        static_cast<long long>(config.warmup_fraction * static_cast<double>(total_arrivals));
    long long arrivals_seen = 0;
    bool collecting = warmup_arrivals == 0;
    bool draining = false;

    double window_start = 0.0;
    double window_end = 0.0;
    std::array<double, 2> inv_integral{};
    std::array<double, 2> backlog_integral{};
    double busy_integral = 0.0;
    std::array<double, 2> wait_sum{};
    std::array<long long, 2> joiners{};
    std::array<long long, 2> stockouts{};

    auto check_invariants = [&]() {
        if (!config.paranoid) return;
        std::array<long long, 2> in_queue{0, 0};
        for (int t : queue) in_queue[t] += 1;
        for (int i = 0; i < 2; ++i) {
            const long long expected =
                policy.target[i] - inv[i] + static_cast<long long>(backlog[i].size());
            if (in_queue[i] != expected || inv[i] < 0 || inv[i] > policy.target[i]) {
                throw Error("sim_invariant", "queue accounting out of balance");
            }
            if (inv[i] > 0 && !backlog[i].empty()) {
                throw Error("sim_invariant", "positive stock next to a nonempty backlog");
            }
        }
    };

    while (true) {
        const double next_event =
            std::min({next_arrival[0], next_arrival[1], service_end});
        if (next_event == kInf) break;

        if (collecting && !draining) {
            const double dt = next_event - now;
            inv_integral[0] += dt * static_cast<double>(inv[0]);
            inv_integral[1] += dt * static_cast<double>(inv[1]);
            backlog_integral[0] += dt * static_cast<double>(backlog[0].size());
            backlog_integral[1] += dt * static_cast<double>(backlog[1].size());
            if (!queue.empty()) busy_integral += dt;
        }
        now = next_event;

        if (service_end <= next_arrival[0] && service_end <= next_arrival[1]) {
            // service completion
            const int type = queue.front();
            queue.pop_front();
            if (!backlog[type].empty()) {
                const Backorder customer = backlog[type].front();
                backlog[type].pop_front();
                if (customer.arrival_index > warmup_arrivals) {
                    wait_sum[type] += now - customer.arrival_time;
                }
            } else {
                inv[type] += 1;
            }
            service_end = queue.empty() ? kInf : now + rng.exponential(mu);
        } else {
            // arrival of the type whose clock fired
            const int type = next_arrival[0] <= next_arrival[1] ? 0 : 1;
            arrivals_seen += 1;
            const bool counted = arrivals_seen > warmup_arrivals;
            if (counted) {
                joiners[type] += 1;
                if (inv[type] == 0) stockouts[type] += 1;
            }
            if (inv[type] > 0) {
                inv[type] -= 1;  // wait zero, nothing to add
            } else {
                backlog[type].push_back({now, arrivals_seen});
            }
            queue.push_back(type);
            if (queue.size() == 1) service_end = now + rng.exponential(mu);

            if (!collecting && arrivals_seen >= warmup_arrivals) {
                collecting = true;
                window_start = now;
            }
            if (arrivals_seen >= total_arrivals) {
                // freeze the measurement window, then serve out the backlog so
                // every joined customer's wait is recorded
                draining = true;
                window_end = now;
                next_arrival = {kInf, kInf};
            } else {
                next_arrival[type] = now + rng.exponential(lam[type]);
            }
        }
        check_invariants();

        if (draining && backlog[0].empty() && backlog[1].empty()) break;
    }

    RepStats stats;
    const double span = window_end - window_start;
    if (!(span > 0.0)) {
        throw DegenerateConfig("empty measurement window; increase num_arrivals");
    }
    for (int i = 0; i < 2; ++i) {
        stats.has_arrivals[i] = joiners[i] > 0;
        stats.mean_wait[i] =
            stats.has_arrivals[i] ? wait_sum[i] / static_cast<double>(joiners[i]) : 0.0;
        stats.stockout_fraction[i] =
            stats.has_arrivals[i]
                ? static_cast<double>(stockouts[i]) / static_cast<double>(joiners[i])
                : 0.0;
        stats.avg_inventory[i] = inv_integral[i] / span;
        stats.avg_backlog[i] = backlog_integral[i] / span;
    }
    stats.utilization = busy_integral / span;
    return stats;
}

Estimate summarize(const std::vector<double>& values, double t_crit) {
    Estimate est;
    const int n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / n;
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
        est.half_width = t_crit * est.std_error;
    }
    return est;
}

}  // namespace

double student_t_975(int df) {
    static constexpr double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1) return 0.0;
    if (df <= 30) return table[df - 1];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

SimEstimates simulate(const MarketParams& params, const InventoryPolicy& policy,
                      const JoiningProfile& profile, const SimConfig& config) {
    validate(params);
    if (config.num_arrivals < 1000) {
        throw ConfigError("num_arrivals must be >= 1000");
    }
    if (!(config.warmup_fraction >= 0.0) || !(config.warmup_fraction < 1.0)) {
        throw ConfigError("warmup_fraction must lie in [0, 1)");
    }
    if (config.replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    const EffectiveRates rates = effective_rates(profile, params);
    if (rates.total() == 0.0) {
        throw DegenerateConfig("both effective arrival rates are zero");
    }
    if (rates.total() > stability_cap(params.mu)) {
        throw StabilityViolation("effective rates outside the stable region");
    }

    const int reps = config.replications;
    std::vector<RepStats> all(reps);
    for (int r = 0; r < reps; ++r) {
        all[r] = run_replication(params, policy, rates, config,
                                 config.seed + static_cast<std::uint64_t>(r));
    }

    const double t_crit = student_t_975(reps - 1);
    SimEstimates out;
    out.arrivals_per_rep = config.num_arrivals;
    out.replications = reps;
    out.seed = config.seed;

    std::vector<double> buf(reps);
    auto collect = [&](auto field_of) {
        for (int r = 0; r < reps; ++r) buf[r] = field_of(all[r]);
        return summarize(buf, t_crit);
    };

    for (int i = 0; i < 2; ++i) {
        bool defined = true;
        for (const RepStats& s : all) defined = defined && s.has_arrivals[i];
        TypeEstimates& te = out.per_type[i];
        te.mean_wait = collect([&](const RepStats& s) { return s.mean_wait[i]; });
        te.stockout_fraction =
            collect([&](const RepStats& s) { return s.stockout_fraction[i]; });
        te.mean_wait.defined = defined;
        te.stockout_fraction.defined = defined;
        te.time_avg_inventory =
            collect([&](const RepStats& s) { return s.avg_inventory[i]; });
        te.time_avg_backlog = collect([&](const RepStats& s) { return s.avg_backlog[i]; });
    }
    out.realized_utilization = collect([](const RepStats& s) { return s.utilization; });
    return out;
}

}  // namespace mts2
