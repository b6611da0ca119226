#include "mts2/experiments.hpp"

#include <cmath>
#include <cstdio>

#include "mts2/parallel.hpp"
#include "mts2/performance.hpp"
#include "mts2/planner.hpp"
#include "mts2/producer.hpp"

namespace mts2 {

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct CellTask {
    double kappa, rho, h2_ratio;
};

std::vector<SweepCell> solve_tasks(const SweepSpec& spec, const std::vector<CellTask>& tasks,
                                   int threads) {
    std::vector<SweepCell> cells(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), threads, [&](int i) {
        cells[i] = solve_cell(spec, tasks[i].kappa, tasks[i].rho, tasks[i].h2_ratio);
    });
    return cells;
}

}  // namespace

std::vector<double> range_values(const std::array<double, 3>& range) {
    const double lo = range[0], hi = range[1], step = range[2];
    if (!(step > 0.0) || hi < lo) {
        throw ConfigError("range must satisfy min <= max with step > 0");
    }
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) values[i] = lo + i * step;
    return values;
}

namespace {

void check_spec(const SweepSpec& spec) {
    if (!(spec.kappa_range[0] > 0.0)) {
        throw ConfigError("kappa range must be positive");
    }
    if (!(spec.rho_range[0] > 0.0) || !(spec.rho_range[1] < 1.0)) {
        throw ConfigError("rho range must lie inside (0, 1)");
    }
    if (!(spec.cross_section_rho > 0.0) || !(spec.cross_section_rho < 1.0)) {
        throw ConfigError("cross-section rho must lie inside (0, 1)");
    }
    for (double ratio : spec.h2_over_h1) {
        if (!(ratio > 0.0)) throw ConfigError("h2/h1 ratios must be positive");
    }
}

}  // namespace

Metrics metrics(const MarketParams& params) {
    validate(params);
    Metrics m;
    m.nu1 = params.mu * params.margin(0) / params.wait_cost[0];
    m.nu2 = params.mu * params.margin(1) / params.wait_cost[1];
    m.kappa = m.nu1 / m.nu2;
    m.rho = (params.lambda_cap[0] + params.lambda_cap[1]) / params.mu;
    return m;
}

MarketParams cell_params(const SweepSpec& spec, double kappa, double rho, double h2_ratio) {
    MarketParams p = spec.base;
    p.reward[1] = p.reward[0];
    p.price[1] = p.price[0];
    p.wait_cost[1] = kappa * p.wait_cost[0];
    p.hold_cost[1] = h2_ratio * p.hold_cost[0];
    const double lam = rho * p.mu / 2.0;
    p.lambda_cap = {lam, lam};
    return p;
}

SweepCell solve_cell(const SweepSpec& spec, double kappa, double rho, double h2_ratio) {
    SweepCell cell;
    cell.kappa = kappa;
    cell.rho = rho;
    cell.h2_ratio = h2_ratio;
    try {
        const MarketParams params = cell_params(spec, kappa, rho, h2_ratio);
        validate(params);

        const ProducerSolution dec = optimize_policy(params);
        const PlannerSolution cen = optimize_welfare(params);

        cell.s_dec = dec.policy.target;
        cell.q_dec = dec.realized_profile.q;
        cell.profit_dec = dec.profit;

        const EffectiveRates rates_dec = effective_rates(dec.realized_profile, params);
        // both welfare values go through the same evaluation path so that
        // identical solutions compare exactly equal
        cell.sw_dec = social_welfare(rates_dec, dec.policy, params);
        cell.sw_cen = social_welfare(cen.rates, cen.policy, params);

        cell.s_cen = cen.policy.target;
        cell.lambda_cen = cen.rates.lambda;

        cell.efficiency = cell.sw_dec / cell.sw_cen;
        cell.rho_eff_dec = rates_dec.total() / params.mu;
        cell.rho_eff_cen = cen.rates.total() / params.mu;

        const double q_sum_dec = cell.q_dec[0] + cell.q_dec[1];
        if (q_sum_dec > 0.0) cell.share1_dec = cell.q_dec[0] / q_sum_dec;
        const double q1_cen = cen.rates.lambda[0] / params.lambda_cap[0];
        const double q2_cen = cen.rates.lambda[1] / params.lambda_cap[1];
        if (q1_cen + q2_cen > 0.0) cell.share1_cen = q1_cen / (q1_cen + q2_cen);

        cell.ew1_dec = expected_wait(0, rates_dec, dec.policy, params.mu);
        cell.ew2_dec = expected_wait(1, rates_dec, dec.policy, params.mu);
        cell.ew1_cen = expected_wait(0, cen.rates, cen.policy, params.mu);
        cell.ew2_cen = expected_wait(1, cen.rates, cen.policy, params.mu);
    } catch (const Error& e) {
        cell.status = "error:" + e.code();
    } catch (const std::exception&) {
        cell.status = "error:internal";
    }
    return cell;
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec, int threads) {
    check_spec(spec);
    const std::vector<double> kappas = range_values(spec.kappa_range);
    const std::vector<double> rhos = range_values(spec.rho_range);
    std::vector<CellTask> tasks;
    tasks.reserve(kappas.size() * rhos.size() * spec.h2_over_h1.size());
    for (double kappa : kappas) {
        for (double rho : rhos) {
            for (double ratio : spec.h2_over_h1) {
                tasks.push_back({kappa, rho, ratio});
            }
        }
    }
    return solve_tasks(spec, tasks, threads);
}

std::vector<SweepCell> cross_section(const SweepSpec& spec, int threads) {
    check_spec(spec);
    const std::vector<double> kappas = range_values(spec.kappa_range);
    std::vector<CellTask> tasks;
    tasks.reserve(kappas.size() * spec.h2_over_h1.size());
    for (double kappa : kappas) {
        for (double ratio : spec.h2_over_h1) {
            tasks.push_back({kappa, spec.cross_section_rho, ratio});
        }
    }
    return solve_tasks(spec, tasks, threads);
}

void write_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
    out << "kappa,rho,h2_ratio,S1_dec,S2_dec,q1_dec,q2_dec,profit_dec,sw_dec,"
           "S1_cen,S2_cen,lam1_cen,lam2_cen,sw_cen,efficiency,rho_eff_dec,rho_eff_cen,"
           "share1_dec,share1_cen,EW1_dec,EW2_dec,EW1_cen,EW2_cen,status\n";
    for (const SweepCell& c : cells) {
        out << format_number(c.kappa) << ',' << format_number(c.rho) << ','
            << format_number(c.h2_ratio) << ',';
        if (c.status == "ok") {
            out << c.s_dec[0] << ',' << c.s_dec[1] << ',' << format_number(c.q_dec[0]) << ','
                << format_number(c.q_dec[1]) << ',' << format_number(c.profit_dec) << ','
                << format_number(c.sw_dec) << ',' << c.s_cen[0] << ',' << c.s_cen[1] << ','
                << format_number(c.lambda_cen[0]) << ',' << format_number(c.lambda_cen[1])
                << ',' << format_number(c.sw_cen) << ',' << format_number(c.efficiency) << ','
                << format_number(c.rho_eff_dec) << ',' << format_number(c.rho_eff_cen) << ','
                << (c.share1_dec ? format_number(*c.share1_dec) : std::string()) << ','
                << (c.share1_cen ? format_number(*c.share1_cen) : std::string()) << ','
                << format_number(c.ew1_dec) << ',' << format_number(c.ew2_dec) << ','
                << format_number(c.ew1_cen) << ',' << format_number(c.ew2_cen) << ',';
        } else {
            out << ",,,,,,,,,,,,,,,,,,,,";
        }
        out << c.status << '\n';
    }
}

}  // namespace mts2
