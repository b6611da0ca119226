#include "mts2/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "mts2/equilibrium.hpp"
#include "mts2/parallel.hpp"
#include "mts2/performance.hpp"

namespace mts2 {

namespace {

constexpr double kGeomEps = 1e-9;  // geometric tolerance for region tests
constexpr double kTieEps = 1e-12;  // welfare tie window

double cost_fraction(int type, const MarketParams& p) {
    return p.hold_cost[type] / (p.hold_cost[type] + p.wait_cost[type]);
}

struct Point {
    double x = 0.0, y = 0.0;
};

HalfPlane normalized(double a, double b, double c) {
    const double norm = std::hypot(a, b);
    return HalfPlane{a / norm, b / norm, c / norm};
}

/// Convex polygon given as an intersection of normalized half-planes.
/// Vertices come from pairwise line intersections that satisfy the rest.
class ConvexRegion {
public:
    explicit ConvexRegion(std::vector<HalfPlane> planes) : planes_(std::move(planes)) {
        build_vertices();
    }

    bool empty() const { return vertices_.empty(); }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<HalfPlane>& planes() const { return planes_; }

    bool contains(const Point& p, double tol = kGeomEps) const {
        for (const HalfPlane& h : planes_) {
            if (h.a * p.x + h.b * p.y > h.c + tol) return false;
        }
        return true;
    }

    Point project(const Point& p) const {
        if (contains(p)) return p;
        if (vertices_.size() == 1) return vertices_[0];
        Point best = vertices_[0];
        double best_d2 = std::numeric_limits<double>::infinity();
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = vertices_[i];
            const Point& b = vertices_[(i + 1) % n];
            const double ex = b.x - a.x, ey = b.y - a.y;
            const double len2 = ex * ex + ey * ey;
            double t = 0.0;
            if (len2 > 0.0) {
                t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
            }
            const Point cand{a.x + t * ex, a.y + t * ey};
            const double d2 =
                (p.x - cand.x) * (p.x - cand.x) + (p.y - cand.y) * (p.y - cand.y);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = cand;
            }
        }
        return best;
    }

    Point centroid() const {
        Point c;
        for (const Point& v : vertices_) {
            c.x += v.x;
            c.y += v.y;
        }
        c.x /= static_cast<double>(vertices_.size());
        c.y /= static_cast<double>(vertices_.size());
        return c;
    }

    /// Feasible interval of one coordinate with the other held fixed.
    bool slice(int coord, double other, double& lo, double& hi) const {
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
        for (const HalfPlane& h : planes_) {
            const double along = coord == 0 ? h.a : h.b;
            const double cross = coord == 0 ? h.b : h.a;
            const double rhs = h.c - cross * other;
            if (std::abs(along) < 1e-14) {
                if (rhs < -kGeomEps) return false;
                continue;
            }
            if (along > 0.0) {
                hi = std::min(hi, rhs / along);
            } else {
                lo = std::max(lo, rhs / along);
            }
        }
        return lo <= hi + kGeomEps;
    }

private:
    void build_vertices() {
        const std::size_t n = planes_.size();
        std::vector<Point> found;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const HalfPlane& p = planes_[i];
                const HalfPlane& q = planes_[j];
                const double det = p.a * q.b - p.b * q.a;
                if (std::abs(det) < 1e-12) continue;
                Point w;
                w.x = (p.c * q.b - q.c * p.b) / det;
                w.y = (p.a * q.c - q.a * p.c) / det;
                if (!contains(w, 1e-7)) continue;
                bool duplicate = false;
                for (const Point& u : found) {
                    if (std::abs(u.x - w.x) < 1e-9 && std::abs(u.y - w.y) < 1e-9) {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate) found.push_back(w);
            }
        }
        if (found.size() > 2) {
            Point c;
            for (const Point& u : found) {
                c.x += u.x;
                c.y += u.y;
            }
            c.x /= static_cast<double>(found.size());
            c.y /= static_cast<double>(found.size());
            std::sort(found.begin(), found.end(), [&](const Point& l, const Point& r) {
                return std::atan2(l.y - c.y, l.x - c.x) < std::atan2(r.y - c.y, r.x - c.x);
            });
        }
        vertices_ = std::move(found);
    }

    std::vector<HalfPlane> planes_;
    std::vector<Point> vertices_;
};

/// Closure half-planes of one partition cell, intersected with the feasible
/// rate box and the stability region. The cell boundaries
/// lambda_i = beta^(1/s) * (mu - lambda_j) are straight lines.
std::vector<HalfPlane> cell_planes(int s1, int s2, const MarketParams& p) {
    std::vector<HalfPlane> planes;
    planes.push_back(normalized(-1.0, 0.0, 0.0));
    planes.push_back(normalized(0.0, -1.0, 0.0));
    planes.push_back(normalized(1.0, 0.0, p.lambda_cap[0]));
    planes.push_back(normalized(0.0, 1.0, p.lambda_cap[1]));
    planes.push_back(normalized(1.0, 1.0, stability_cap(p.mu)));
    const std::array<int, 2> s{s1, s2};
    for (int i = 0; i < 2; ++i) {
        const double beta = cost_fraction(i, p);
        const double upper = std::pow(beta, 1.0 / (s[i] + 1));
        // lambda_i <= upper * (mu - lambda_j)
        if (i == 0) {
            planes.push_back(normalized(1.0, upper, upper * p.mu));
        } else {
            planes.push_back(normalized(upper, 1.0, upper * p.mu));
        }
        if (s[i] >= 1) {
            const double lower = std::pow(beta, 1.0 / s[i]);
            // lambda_i >= lower * (mu - lambda_j)
            if (i == 0) {
                planes.push_back(normalized(-1.0, -lower, -lower * p.mu));
            } else {
                planes.push_back(normalized(-lower, -1.0, -lower * p.mu));
            }
        }
    }
    return planes;
}

/// Clamp a candidate point into the hard-feasible rate set; geometric
/// tolerances can leave projected points a hair outside it.
EffectiveRates sanitize_rates(const Point& pt, const MarketParams& p) {
    EffectiveRates rates;
    rates.lambda = {std::clamp(pt.x, 0.0, p.lambda_cap[0]),
                    std::clamp(pt.y, 0.0, p.lambda_cap[1])};
    const double cap = stability_cap(p.mu);
    const double total = rates.total();
    if (total > cap) {
        const double scale = cap / total;
        rates.lambda[0] *= scale;
        rates.lambda[1] *= scale;
    }
    return rates;
}

double welfare_at(const Point& pt, const InventoryPolicy& policy, const MarketParams& p) {
    return social_welfare(sanitize_rates(pt, p), policy, p);
}

std::array<double, 2> gradient_at(const Point& pt, const InventoryPolicy& policy,
                                  const MarketParams& p) {
    return sw_gradient(sanitize_rates(pt, p), policy, p);
}

/// Newton steps on the gradient root, restricted to the active boundary.
/// Value-comparison searches stall at position error ~sqrt(eps); root-finding
/// on the gradient recovers full double precision for interior and edge
/// optima. Vertices are exact already.
Point newton_polish(Point x, double value, const ConvexRegion& region,
                    const InventoryPolicy& policy, const MarketParams& params) {
    constexpr double kActiveTol = 1e-6;
    constexpr double kFdStep = 1e-7;

    for (int it = 0; it < 12; ++it) {
        std::vector<const HalfPlane*> active;
        for (const HalfPlane& h : region.planes()) {
            if (std::abs(h.a * x.x + h.b * x.y - h.c) < kActiveTol) active.push_back(&h);
        }
        if (active.size() >= 2) break;

        const auto g = gradient_at(x, policy, params);
        Point trial = x;
        if (active.size() == 1) {
            // slide along the active edge
            const Point dir{-active[0]->b, active[0]->a};
            const double gd = g[0] * dir.x + g[1] * dir.y;
            const Point ahead{x.x + kFdStep * dir.x, x.y + kFdStep * dir.y};
            const Point behind{x.x - kFdStep * dir.x, x.y - kFdStep * dir.y};
            const auto ga = gradient_at(ahead, policy, params);
            const auto gb = gradient_at(behind, policy, params);
            const double slope = ((ga[0] - gb[0]) * dir.x + (ga[1] - gb[1]) * dir.y) /
                                 (2.0 * kFdStep);
            if (!(std::abs(slope) > 0.0)) break;
            const double t = -gd / slope;
            trial = {x.x + t * dir.x, x.y + t * dir.y};
        } else {
            // full 2-D step with a finite-difference Jacobian of the gradient
            double jac[2][2];
            for (int k = 0; k < 2; ++k) {
                Point hi = x, lo = x;
                (k == 0 ? hi.x : hi.y) += kFdStep;
                (k == 0 ? lo.x : lo.y) -= kFdStep;
                const auto gh = gradient_at(hi, policy, params);
                const auto gl = gradient_at(lo, policy, params);
                jac[0][k] = (gh[0] - gl[0]) / (2.0 * kFdStep);
                jac[1][k] = (gh[1] - gl[1]) / (2.0 * kFdStep);
            }
            const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if (!(std::abs(det) > 1e-12)) break;
            const double dx = (-g[0] * jac[1][1] + g[1] * jac[0][1]) / det;
            const double dy = (-g[1] * jac[0][0] + g[0] * jac[1][0]) / det;
            trial = {x.x + dx, x.y + dy};
        }

        trial = region.project(trial);
        const double trial_value = welfare_at(trial, policy, params);
        if (trial_value < value - 1e-12 * std::max(1.0, std::abs(value))) break;
        const auto gt = gradient_at(trial, policy, params);
        const double step_size = std::abs(trial.x - x.x) + std::abs(trial.y - x.y);
        const bool hit_boundary = active.empty() && !region.contains(trial, -kActiveTol);
        x = trial;
        value = std::max(value, trial_value);
        if (std::hypot(gt[0], gt[1]) >= std::hypot(g[0], g[1]) || step_size < 1e-14 ||
            hit_boundary) {
            break;
        }
    }
    return x;
}

struct LocalOptimum {
    Point point;
    double value = -std::numeric_limits<double>::infinity();
};

/// Multi-start projected gradient ascent followed by coordinate-wise scans
/// with golden-section polish. Starts: polygon vertices, edge midpoints,
/// centroid and a few random interior points.
LocalOptimum maximize_over_region(const ConvexRegion& region, const InventoryPolicy& policy,
                                  const MarketParams& params, const PlannerOptions& options,
                                  std::uint64_t cell_seed) {
    const auto& verts = region.vertices();
    std::vector<Point> starts = verts;
    const std::size_t n = verts.size();
    if (n >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = verts[i];
            const Point& b = verts[(i + 1) % n];
            starts.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
        }
    }
    starts.push_back(region.centroid());

    std::uint64_t state = cell_seed * 6364136223846793005ull + 1442695040888963407ull;
    auto next01 = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    double min_x = verts[0].x, max_x = verts[0].x, min_y = verts[0].y, max_y = verts[0].y;
    for (const Point& v : verts) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    for (int k = 0; k < options.random_starts; ++k) {
        const Point cand{min_x + next01() * (max_x - min_x),
                         min_y + next01() * (max_y - min_y)};
        starts.push_back(region.project(cand));
    }

    auto ascend = [&](Point x) {
        double value = welfare_at(x, policy, params);

        double step = 0.25 * std::max(params.mu, 1.0);
        for (int it = 0; it < 400; ++it) {
            const auto grad = sw_gradient(sanitize_rates(x, params), policy, params);
            bool moved = false;
            while (step > 1e-14) {
                const Point trial =
                    region.project({x.x + step * grad[0], x.y + step * grad[1]});
                const double trial_value = welfare_at(trial, policy, params);
                if (trial_value > value) {
                    const double shift = std::abs(trial.x - x.x) + std::abs(trial.y - x.y);
                    x = trial;
                    value = trial_value;
                    moved = true;
                    step *= 1.6;
                    if (shift < 1e-13) it = 400;  // converged
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }

        constexpr double golden = 0.6180339887498949;
        for (int round = 0; round < 40; ++round) {
            bool improved = false;
            for (int coord = 0; coord < 2; ++coord) {
                double lo, hi;
                const double other = coord == 0 ? x.y : x.x;
                if (!region.slice(coord, other, lo, hi)) continue;
                auto eval = [&](double v) {
                    Point pt = x;
                    (coord == 0 ? pt.x : pt.y) = v;
                    return welfare_at(region.project(pt), policy, params);
                };
                double best_v = coord == 0 ? x.x : x.y;
                double best_f = value;
                constexpr int kScan = 24;
                for (int k = 0; k <= kScan; ++k) {
                    const double v = lo + (hi - lo) * k / kScan;
                    const double f = eval(v);
                    if (f > best_f) {
                        best_f = f;
                        best_v = v;
                    }
                }
                double a = std::max(lo, best_v - (hi - lo) / kScan);
                double b = std::min(hi, best_v + (hi - lo) / kScan);
                double m1 = b - golden * (b - a);
                double m2 = a + golden * (b - a);
                double f1 = eval(m1), f2 = eval(m2);
                for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
                    if (f1 < f2) {
                        a = m1;
                        m1 = m2;
                        f1 = f2;
                        m2 = a + golden * (b - a);
                        f2 = eval(m2);
                    } else {
                        b = m2;
                        m2 = m1;
                        f2 = f1;
                        m1 = b - golden * (b - a);
                        f1 = eval(m1);
                    }
                }
                const double mid = 0.5 * (a + b);
                const double fm = eval(mid);
                if (fm > best_f) {
                    best_f = fm;
                    best_v = mid;
                }
                if (best_f > value + 1e-15) {
                    (coord == 0 ? x.x : x.y) = best_v;
                    x = region.project(x);
                    value = best_f;
                    improved = true;
                }
            }
            if (!improved) break;
        }

        const Point polished = newton_polish(x, value, region, policy, params);
        const double polished_value = welfare_at(polished, policy, params);
        if (polished_value >= value) {
            return LocalOptimum{polished, polished_value};
        }
        return LocalOptimum{x, value};
    };

    LocalOptimum best;
    for (const Point& s : starts) {
        const LocalOptimum local = ascend(s);
        if (local.value > best.value + kTieEps ||
            (local.value > best.value - kTieEps &&
             std::pair{local.point.x, local.point.y} <
                 std::pair{best.point.x, best.point.y})) {
            best = local;
        }
    }
    return best;
}

}  // namespace

bool SubdomainRegion::contains(const EffectiveRates& rates, const MarketParams& params) const {
    if (rates.lambda[0] < 0.0 || rates.lambda[1] < 0.0 ||
        rates.lambda[0] > params.lambda_cap[0] || rates.lambda[1] > params.lambda_cap[1] ||
        rates.total() > stability_cap(params.mu)) {
        return false;
    }
    for (int i = 0; i < 2; ++i) {
        const double beta = cost_fraction(i, params);
        const double r = rates.lambda[i] / (params.mu - rates.lambda[1 - i]);
        if (!(pow_int(r, labels[i] + 1) <= beta)) return false;
        if (labels[i] >= 1 && !(beta < pow_int(r, labels[i]))) return false;
    }
    return true;
}

double total_cost(const EffectiveRates& rates, const InventoryPolicy& policy,
                  const MarketParams& params) {
    double cost = 0.0;
    for (int i = 0; i < 2; ++i) {
        cost += params.hold_cost[i] * expected_inventory(i, rates, policy, params.mu);
        cost += params.wait_cost[i] * rates.lambda[i] *
                expected_wait(i, rates, policy, params.mu);
    }
    return cost;
}

double social_welfare(const EffectiveRates& rates, const InventoryPolicy& policy,
                      const MarketParams& params) {
    const double reward =
        rates.lambda[0] * params.reward[0] + rates.lambda[1] * params.reward[1];
    return reward - total_cost(rates, policy, params);
}

InventoryPolicy optimal_inventory_for_rates(const EffectiveRates& rates,
                                            const MarketParams& params) {
    if (rates.total() > stability_cap(params.mu)) {
        throw StabilityViolation("rates outside the stable region");
    }
    InventoryPolicy policy;
    for (int i = 0; i < 2; ++i) {
        if (rates.lambda[i] <= 0.0) {
            policy.target[i] = 0;
            continue;
        }
        const double r = rates.lambda[i] / (params.mu - rates.lambda[1 - i]);
        const double ratio = std::log(cost_fraction(i, params)) / std::log(r);
        policy.target[i] = std::max(0, static_cast<int>(std::ceil(ratio)) - 1);
    }
    return policy;
}

int inventory_upper_bound(int type, const MarketParams& params) {
    if (params.lambda_cap[type] <= 0.0) return 0;
    const double ratio = std::log(cost_fraction(type, params)) /
                         std::log(params.lambda_cap[type] / params.mu);
    return std::max(0, static_cast<int>(std::ceil(ratio)));
}

SubdomainRegion subdomain_bounds(int s1, int s2, const MarketParams& params) {
    if (s1 < 0 || s2 < 0) {
        throw IndexOutOfRange("subdomain labels must be nonnegative");
    }
    SubdomainRegion region;
    region.labels = {s1, s2};
    region.closure = cell_planes(s1, s2, params);
    return region;
}

std::array<double, 2> sw_gradient(const EffectiveRates& rates, const InventoryPolicy& policy,
                                  const MarketParams& params) {
    const double mu = params.mu;
    if (rates.total() > stability_cap(mu)) {
        throw StabilityViolation("rates outside the stable region");
    }
    const double slack = mu - rates.total();
    std::array<double, 2> grad{};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double li = rates.lambda[i];
        const double lj = rates.lambda[j];
        const int si = policy.target[i];
        const int sj = policy.target[j];
        const double ri = li / (mu - lj);
        const double rj = lj / (mu - li);
        const double own = (params.wait_cost[i] + params.hold_cost[i]) *
                           (mu - lj + si * slack) * pow_int(ri, si);
        const double cross = (params.wait_cost[j] + params.hold_cost[j]) *
                             (mu - li + sj * slack) * pow_int(rj, sj + 1);
        grad[i] = params.reward[i] +
                  (params.hold_cost[i] * (mu - lj) + params.hold_cost[j] * lj - own - cross) /
                      (slack * slack);
    }
    return grad;
}

EffectiveRates optimize_rates_for_policy(const InventoryPolicy& policy,
                                         const MarketParams& params,
                                         const PlannerOptions& options) {
    validate(params);
    std::vector<HalfPlane> planes{
        normalized(-1.0, 0.0, 0.0),
        normalized(0.0, -1.0, 0.0),
        normalized(1.0, 0.0, params.lambda_cap[0]),
        normalized(0.0, 1.0, params.lambda_cap[1]),
        normalized(1.0, 1.0, stability_cap(params.mu)),
    };
    ConvexRegion region(std::move(planes));
    if (region.empty()) {
        throw EmptyFeasibleRegion("no feasible rates");
    }
    const LocalOptimum best =
        maximize_over_region(region, policy, params, options, options.seed);
    return sanitize_rates(best.point, params);
}

PlannerSolution optimize_welfare(const MarketParams& params, const PlannerOptions& options) {
    validate(params);
    if (params.lambda_cap[0] <= 0.0 && params.lambda_cap[1] <= 0.0) {
        throw EmptyFeasibleRegion("both demand caps are zero");
    }
    // Enumerate cells up to the cost-minimizing stock at full demand. The
    // congestion ratio is increasing in both rates, so no feasible point
    // needs a larger target than the box corner does.
    const InventoryPolicy at_caps = optimal_inventory_for_rates(
        sanitize_rates({params.lambda_cap[0], params.lambda_cap[1]}, params), params);
    const int n1 = at_caps.target[0] + 1;
    const int n2 = at_caps.target[1] + 1;

    struct CellResult {
        bool feasible = false;
        LocalOptimum best;
        std::array<int, 2> labels{};
    };
    std::vector<CellResult> cells(static_cast<std::size_t>(n1) * n2);

    parallel_for(n1 * n2, options.threads, [&](int idx) {
        const int s1 = idx / n2;
        const int s2 = idx % n2;
        ConvexRegion region(cell_planes(s1, s2, params));
        if (region.empty()) return;
        InventoryPolicy policy;
        policy.target = {s1, s2};
        cells[idx].feasible = true;
        cells[idx].labels = {s1, s2};
        cells[idx].best = maximize_over_region(region, policy, params, options,
                                               options.seed + static_cast<std::uint64_t>(idx));
    });

    const CellResult* winner = nullptr;
    for (const CellResult& cell : cells) {
        if (!cell.feasible) continue;
        if (winner == nullptr) {
            winner = &cell;
            continue;
        }
        const double tie = kTieEps * std::max(1.0, std::abs(winner->best.value));
        if (cell.best.value > winner->best.value + tie) {
            winner = &cell;
        } else if (cell.best.value > winner->best.value - tie) {
            const auto lhs = std::tuple{cell.labels[0], cell.labels[1], cell.best.point.x,
                                        cell.best.point.y};
            const auto rhs = std::tuple{winner->labels[0], winner->labels[1],
                                        winner->best.point.x, winner->best.point.y};
            if (lhs < rhs) winner = &cell;
        }
    }
    if (winner == nullptr) {
        throw EmptyFeasibleRegion("no nonempty subdomain");
    }

    PlannerSolution out;
    out.rates = sanitize_rates(winner->best.point, params);
    out.policy = optimal_inventory_for_rates(out.rates, params);
    out.subdomain = out.policy.target;
    out.welfare = social_welfare(out.rates, out.policy, params);
    out.tolls = compute_tolls(out.rates, params, out.policy);
    return out;
}

std::array<double, 2> compute_tolls(const EffectiveRates& rates_star,
                                    const MarketParams& params, const InventoryPolicy& policy) {
    std::array<double, 2> tolls{};
    for (int i = 0; i < 2; ++i) {
        tolls[i] = params.margin(i) -
                   params.wait_cost[i] * expected_wait(i, rates_star, policy, params.mu);
    }
    return tolls;
}

TollCheck verify_tolls(const MarketParams& params, const InventoryPolicy& policy,
                       const EffectiveRates& target, const std::array<double, 2>& tolls) {
    const EquilibriumOutcome outcome = solve_equilibrium(params, policy, tolls);
    TollCheck check;
    if (outcome.kind == EquilibriumKind::unique) {
        check.induced = effective_rates(outcome.profile, params);
        check.max_error = std::max(std::abs(check.induced.lambda[0] - target.lambda[0]),
                                   std::abs(check.induced.lambda[1] - target.lambda[1]));
    } else {
        // the tolled zero-inventory game is indifferent along a line; the
        // target is implemented when it lies on that line
        check.continuum = true;
        check.induced = target;
        check.max_error = std::abs(target.total() - outcome.rate_sum);
    }
    return check;
}

}  // namespace mts2
