#include "mts2/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mts2 {

namespace {

using nlohmann::json;

std::array<double, 2> pair_field(const json& doc, const std::string& key) {
    if (!doc.contains(key)) {
        throw ConfigError("missing config key: " + key);
    }
    const json& node = doc.at(key);
    if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
        throw ConfigError("config key '" + key + "' must be an array of two numbers");
    }
    return {node[0].get<double>(), node[1].get<double>()};
}

json estimate_json(const Estimate& e) {
    if (!e.defined) return nullptr;
    return json{{"mean", e.mean}, {"half_width", e.half_width}};
}

json outcome_json(const EquilibriumOutcome& o) {
    json doc;
    doc["case"] = o.case_label;
    doc["residuals"] = o.residuals;
    if (o.kind == EquilibriumKind::unique) {
        doc["type"] = "unique";
        doc["q"] = o.profile.q;
    } else {
        doc["type"] = "continuum";
        doc["rate_sum"] = o.rate_sum;
        doc["endpoints"] = {o.endpoints[0].q, o.endpoints[1].q};
    }
    return doc;
}

json planner_json(const PlannerSolution& s) {
    return json{{"rates", s.rates.lambda},
                {"S", s.policy.target},
                {"subdomain", s.subdomain},
                {"welfare", s.welfare},
                {"tolls", s.tolls}};
}

json report_json(const PerformanceReport& r) {
    json per_type = json::array();
    for (const TypeMeasures& m : r.per_type) {
        per_type.push_back({{"expected_wait", m.expected_wait},
                            {"expected_inventory", m.expected_inventory},
                            {"expected_backlog", m.expected_backlog},
                            {"stockout_prob", m.stockout_prob}});
    }
    return json{{"per_type", per_type}, {"total_utilization", r.total_utilization}};
}

json estimates_json(const SimEstimates& s) {
    json per_type = json::array();
    for (const TypeEstimates& t : s.per_type) {
        per_type.push_back({{"mean_wait", estimate_json(t.mean_wait)},
                            {"time_avg_inventory", estimate_json(t.time_avg_inventory)},
                            {"time_avg_backlog", estimate_json(t.time_avg_backlog)},
                            {"stockout_fraction", estimate_json(t.stockout_fraction)}});
    }
    return json{{"per_type", per_type},
                {"realized_utilization", estimate_json(s.realized_utilization)},
                {"replications", s.replications},
                {"arrivals_per_rep", s.arrivals_per_rep},
                {"seed", s.seed}};
}

}  // namespace

MarketParams params_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const char* known[] = {"mu", "lambda_cap", "reward", "price", "wait_cost", "hold_cost"};
    for (const auto& item : doc.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw ConfigError("unknown config key: " + item.key());
    }
    if (!doc.contains("mu") || !doc.at("mu").is_number()) {
        throw ConfigError("missing or non-numeric config key: mu");
    }
    MarketParams p;
    p.mu = doc.at("mu").get<double>();
    p.lambda_cap = pair_field(doc, "lambda_cap");
    p.reward = pair_field(doc, "reward");
    p.price = pair_field(doc, "price");
    p.wait_cost = pair_field(doc, "wait_cost");
    p.hold_cost = pair_field(doc, "hold_cost");
    return p;
}

MarketParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

std::string to_json(const MarketParams& p) {
    return json{{"mu", p.mu},
                {"lambda_cap", p.lambda_cap},
                {"reward", p.reward},
                {"price", p.price},
                {"wait_cost", p.wait_cost},
                {"hold_cost", p.hold_cost}}
        .dump(2);
}

std::string to_json(const PerformanceReport& r) { return report_json(r).dump(2); }

std::string to_json(const EquilibriumOutcome& o) { return outcome_json(o).dump(2); }

std::string to_json(const ProducerSolution& s) {
    return json{{"S", s.policy.target},
                {"q", s.realized_profile.q},
                {"profit", s.profit},
                {"thresholds", s.thresholds},
                {"equilibrium", outcome_json(s.equilibrium)}}
        .dump(2);
}

std::string to_json(const PlannerSolution& s) { return planner_json(s).dump(2); }

std::string to_json(const SimEstimates& s) { return estimates_json(s).dump(2); }

std::string comparison_json(const SimEstimates& s, const PerformanceReport& r) {
    auto z = [](const Estimate& e, double exact) -> json {
        if (!e.defined) return nullptr;
        if (e.std_error == 0.0) return e.mean == exact ? json(0.0) : json(nullptr);
        return (e.mean - exact) / e.std_error;
    };
    json z_scores;
    for (const char* key : {"mean_wait", "time_avg_inventory", "time_avg_backlog",
                            "stockout_fraction"}) {
        z_scores[key] = json::array();
    }
    for (int i = 0; i < 2; ++i) {
        const TypeEstimates& t = s.per_type[i];
        const TypeMeasures& m = r.per_type[i];
        z_scores["mean_wait"].push_back(z(t.mean_wait, m.expected_wait));
        z_scores["time_avg_inventory"].push_back(z(t.time_avg_inventory, m.expected_inventory));
        z_scores["time_avg_backlog"].push_back(z(t.time_avg_backlog, m.expected_backlog));
        z_scores["stockout_fraction"].push_back(z(t.stockout_fraction, m.stockout_prob));
    }
    return json{{"simulation", estimates_json(s)},
                {"closed_form", report_json(r)},
                {"z_scores", z_scores}}
        .dump(2);
}

std::string tolls_json(const PlannerSolution& s, const TollCheck& check) {
    return json{{"planner", planner_json(s)},
                {"tolls", s.tolls},
                {"induced_rates", check.induced.lambda},
                {"max_rate_error", check.max_error},
                {"continuum", check.continuum}}
        .dump(2);
}

}  // namespace mts2
