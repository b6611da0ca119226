#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "mts2/experiments.hpp"
#include "mts2/json_io.hpp"
#include "mts2/planner.hpp"
#include "mts2/producer.hpp"
#include "mts2/simulator.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON parameter file")->required();
    cmd->add_option("--out", args.out_path, "write output here instead of stdout");
    cmd->add_option("--threads", args.threads, "worker thread cap");
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(args.out_path);
    if (!out) {
        throw mts2::ConfigError("cannot open output file: " + args.out_path);
    }
    out << text << '\n';
}

std::array<double, 3> parse_range(const std::string& text, const std::string& flag) {
    std::array<double, 3> range{};
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> range[0] >> sep1 >> range[1] >> sep2 >> range[2]) || sep1 != ':' ||
        sep2 != ':' || !in.eof()) {
        throw mts2::ConfigError(flag + " expects min:max:step");
    }
    return range;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t pos = 0;
            values.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw mts2::ConfigError(flag + " expects a comma-separated number list");
        }
    }
    if (values.empty()) {
        throw mts2::ConfigError(flag + " expects at least one value");
    }
    return values;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* env = std::getenv("MTS2_SEED");
    if (env == nullptr) return fallback;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw mts2::ConfigError("MTS2_SEED must be a nonnegative integer");
    }
}

bool is_validation_error(const mts2::Error& e) {
    return dynamic_cast<const mts2::ConfigError*>(&e) != nullptr ||
           dynamic_cast<const mts2::NonpositiveRate*>(&e) != nullptr ||
           dynamic_cast<const mts2::NonpositiveMargin*>(&e) != nullptr;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-product make-to-stock queueing game solver"};
    app.require_subcommand(1);

    CommonArgs args;

    // measures
    auto* measures = app.add_subcommand("measures", "closed-form performance report");
    std::vector<int> policy_in{0, 0};
    std::vector<double> profile_in{1.0, 1.0};
    add_common(measures, args);
    measures->add_option("--S", policy_in, "base-stock targets S1 S2")->expected(2);
    measures->add_option("--q", profile_in, "joining probabilities q1 q2")->expected(2);

    // equilibrium
    auto* equil = app.add_subcommand("equilibrium", "customer joining equilibrium");
    add_common(equil, args);
    equil->add_option("--S", policy_in, "base-stock targets S1 S2")->expected(2);

    // producer
    auto* producer_cmd = app.add_subcommand("producer", "profit-optimal base-stock pair");
    add_common(producer_cmd, args);

    // planner
    auto* planner_cmd = app.add_subcommand("planner", "welfare-optimal rates and stocks");
    add_common(planner_cmd, args);

    // tolls
    auto* tolls_cmd = app.add_subcommand("tolls", "admission corrections for planner rates");
    add_common(tolls_cmd, args);
    bool tolls_fixed_policy = false;
    auto* tolls_s_opt =
        tolls_cmd->add_option("--S", policy_in, "fix the base-stock pair")->expected(2);

    // simulate
    auto* sim = app.add_subcommand("simulate", "discrete-event simulation estimates");
    add_common(sim, args);
    mts2::SimConfig sim_config;
    bool compare = false;
    sim->add_option("--S", policy_in, "base-stock targets S1 S2")->expected(2);
    sim->add_option("--q", profile_in, "joining probabilities q1 q2")->expected(2);
    sim->add_option("--arrivals", sim_config.num_arrivals, "joining customers per replication");
    sim->add_option("--warmup", sim_config.warmup_fraction, "warm-up fraction");
    sim->add_option("--reps", sim_config.replications, "independent replications");
    sim->add_option("--seed", sim_config.seed, "base RNG seed");
    sim->add_flag("--compare", compare, "also print closed forms and z-scores");

    // sweep / cross-section
    auto* sweep_cmd = app.add_subcommand("sweep", "kappa-rho grid to CSV");
    auto* cross_cmd = app.add_subcommand("cross-section", "kappa series at fixed rho");
    std::string kappa_text, rho_text, ratio_text;
    double rho_fixed = 0.9;
    bool full_grid = false;
    for (CLI::App* cmd : {sweep_cmd, cross_cmd}) {
        add_common(cmd, args);
        cmd->add_option("--kappa", kappa_text, "kappa range min:max:step");
        cmd->add_option("--h2-ratio", ratio_text, "h2/h1 ratios, comma separated");
    }
    sweep_cmd->add_option("--rho", rho_text, "rho range min:max:step");
    sweep_cmd->add_flag("--full", full_grid, "full-resolution grid (0.01 x 0.001 steps)");
    cross_cmd->add_option("--rho-fixed", rho_fixed, "cross-section rho");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }
    tolls_fixed_policy = tolls_s_opt->count() > 0;

    mts2::MarketParams params;
    try {
        params = mts2::load_params_file(args.config_path);
        mts2::validate(params);
    } catch (const mts2::Error& e) {
        std::cerr << "mts2: error: " << e.code() << ": " << e.what() << '\n';
        return kExitValidation;
    }
    if (args.threads < 1) args.threads = 1;

    try {
        mts2::InventoryPolicy policy;
        policy.target = {policy_in[0], policy_in[1]};
        mts2::JoiningProfile profile;
        profile.q = {profile_in[0], profile_in[1]};

        if (*measures) {
            const mts2::EffectiveRates rates = mts2::effective_rates(profile, params);
            emit(args, mts2::to_json(mts2::report(rates, policy, params)));
        } else if (*equil) {
            emit(args, mts2::to_json(mts2::solve_equilibrium(params, policy)));
        } else if (*producer_cmd) {
            emit(args, mts2::to_json(mts2::optimize_policy(params, args.threads)));
        } else if (*planner_cmd) {
            mts2::PlannerOptions options;
            options.threads = args.threads;
            emit(args, mts2::to_json(mts2::optimize_welfare(params, options)));
        } else if (*tolls_cmd) {
            mts2::PlannerOptions options;
            options.threads = args.threads;
            mts2::PlannerSolution solution;
            if (tolls_fixed_policy) {
                solution.policy = policy;
                solution.rates = mts2::optimize_rates_for_policy(policy, params, options);
                solution.subdomain = policy.target;
                solution.welfare = mts2::social_welfare(solution.rates, policy, params);
                solution.tolls = mts2::compute_tolls(solution.rates, params, policy);
            } else {
                solution = mts2::optimize_welfare(params, options);
            }
            const mts2::TollCheck check =
                mts2::verify_tolls(params, solution.policy, solution.rates, solution.tolls);
            emit(args, mts2::tolls_json(solution, check));
        } else if (*sim) {
            sim_config.seed = seed_from_env(sim_config.seed);
            const mts2::SimEstimates estimates =
                mts2::simulate(params, policy, profile, sim_config);
            if (compare) {
                const mts2::EffectiveRates rates = mts2::effective_rates(profile, params);
                emit(args, mts2::comparison_json(estimates,
                                                 mts2::report(rates, policy, params)));
            } else {
                emit(args, mts2::to_json(estimates));
            }
        } else if (*sweep_cmd || *cross_cmd) {
            mts2::SweepSpec spec;
            spec.base = params;
            if (full_grid) {
                spec.kappa_range[2] = 0.01;
                spec.rho_range[2] = 0.001;
            }
            if (!kappa_text.empty()) spec.kappa_range = parse_range(kappa_text, "--kappa");
            if (!rho_text.empty()) spec.rho_range = parse_range(rho_text, "--rho");
            std::vector<mts2::SweepCell> cells;
            if (*sweep_cmd) {
                if (!ratio_text.empty()) spec.h2_over_h1 = parse_list(ratio_text, "--h2-ratio");
                cells = mts2::run_sweep(spec, args.threads);
            } else {
                spec.h2_over_h1 = {0.9, 1.0, 1.1};
                if (!ratio_text.empty()) spec.h2_over_h1 = parse_list(ratio_text, "--h2-ratio");
                spec.cross_section_rho = rho_fixed;
                cells = mts2::cross_section(spec, args.threads);
            }
            std::ostringstream csv;
            mts2::write_csv(csv, cells);
            if (args.out_path.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(args.out_path);
                if (!out) {
                    throw mts2::ConfigError("cannot open output file: " + args.out_path);
                }
                out << csv.str();
            }
        }
    } catch (const mts2::Error& e) {
        std::cerr << "mts2: error: " << e.code() << ": " << e.what() << '\n';
        return is_validation_error(e) ? kExitValidation : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "mts2: error: internal: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
