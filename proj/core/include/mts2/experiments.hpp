#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mts2/model.hpp"

namespace mts2 {

/// Grid specification for the waiting-cost asymmetry experiment. Each cell
/// derives a parameter set from `base`: symmetric in everything except
/// c2 = kappa * c1 and h2 = ratio * h1, with Lambda1 = Lambda2 = rho*mu/2.
struct SweepSpec {
    std::array<double, 3> kappa_range{1.0, 20.0, 0.5};   // min, max, step
    std::array<double, 3> rho_range{0.65, 0.90, 0.01};
    std::vector<double> h2_over_h1{1.0};
    MarketParams base;
    double cross_section_rho = 0.9;
};

/// One grid cell's decentralized and centralized solutions plus derived
/// comparison metrics.
struct SweepCell {
    double kappa = 0.0, rho = 0.0, h2_ratio = 1.0;

    std::array<int, 2> s_dec{};
    std::array<double, 2> q_dec{};
    double profit_dec = 0.0;
    double sw_dec = 0.0;

    std::array<int, 2> s_cen{};
    std::array<double, 2> lambda_cen{};
    double sw_cen = 0.0;

    double efficiency = 0.0;
    double rho_eff_dec = 0.0;
    double rho_eff_cen = 0.0;
    std::optional<double> share1_dec;   ///< empty when nobody joins
    std::optional<double> share1_cen;
    double ew1_dec = 0.0, ew2_dec = 0.0;
    double ew1_cen = 0.0, ew2_cen = 0.0;

    std::string status = "ok";          ///< "ok" or "error:<code>"
};

struct Metrics {
    double nu1 = 0.0;    ///< delay-tolerance index mu*(R-p)/c
    double nu2 = 0.0;
    double kappa = 0.0;  ///< nu1 / nu2
    double rho = 0.0;    ///< potential utilization
};

Metrics metrics(const MarketParams& params);

/// Parameter set for one grid cell.
MarketParams cell_params(const SweepSpec& spec, double kappa, double rho, double h2_ratio);

/// Solves both sides for one cell; errors are captured in `status`.
SweepCell solve_cell(const SweepSpec& spec, double kappa, double rho, double h2_ratio);

/// Full grid, rows ordered by (kappa, rho, h2_ratio).
std::vector<SweepCell> run_sweep(const SweepSpec& spec, int threads = 1);

/// kappa series at the fixed cross-section rho, one per h2/h1 ratio.
std::vector<SweepCell> cross_section(const SweepSpec& spec, int threads = 1);

/// CSV emission; floats at 9 significant digits, undefined fields empty.
void write_csv(std::ostream& out, const std::vector<SweepCell>& cells);

/// Values min, min+step, ..., max (inclusive, within rounding).
std::vector<double> range_values(const std::array<double, 3>& range);

}  // namespace mts2
