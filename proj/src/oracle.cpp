#include "leogo/oracle.hpp"
#include "leogo/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace leogo::oracle {

using dispatch::UnitStatus;

LpResult solve_small_lp(const SmallLp& lp)
{
    const std::size_t n = lp.cost.size();
    if (lp.lower.size() != n || lp.upper.size() != n || lp.eq_row.size() != n ||
        lp.ge_row.size() != n) {
        throw std::invalid_argument("solve_small_lp: inconsistent dimensions");
    }
    // Standard form with a surplus column z >= 0 on the inequality row.
    const std::size_t m = n + 1;
    std::vector<double> c = lp.cost, lo = lp.lower, hi = lp.upper, a1 = lp.eq_row, a2 = lp.ge_row;
    c.push_back(0.0);
    lo.push_back(0.0);
    hi.push_back(std::numeric_limits<double>::infinity());
    a1.push_back(0.0);
    a2.push_back(-1.0);

    LpResult best;
    std::vector<double> x(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
            const double det = a1[j] * a2[k] - a1[k] * a2[j];
            if (std::abs(det) < 1e-12) continue;
            std::vector<std::size_t> free;
            for (std::size_t v = 0; v < m; ++v) {
                if (v != j && v != k && std::isfinite(hi[v])) free.push_back(v);
            }
            for (unsigned pick = 0; pick < (1u << free.size()); ++pick) {
                for (std::size_t v = 0; v < m; ++v) x[v] = lo[v];
                for (std::size_t f = 0; f < free.size(); ++f) {
                    if ((pick >> f) & 1u) x[free[f]] = hi[free[f]];
                }
                x[j] = 0.0;
                x[k] = 0.0;
                double r1 = lp.eq_rhs;
                double r2 = lp.ge_rhs;
                for (std::size_t v = 0; v < m; ++v) {
                    r1 -= a1[v] * x[v];
                    r2 -= a2[v] * x[v];
                }
                x[j] = (r1 * a2[k] - r2 * a1[k]) / det;
                x[k] = (a1[j] * r2 - a2[j] * r1) / det;
                const double tol = 1e-9;
                if (x[j] < lo[j] - tol || x[j] > hi[j] + tol) continue;
                if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) continue;
                double obj = 0.0;
                for (std::size_t v = 0; v < m; ++v) obj += c[v] * x[v];
                if (!best.feasible || obj < best.objective) {
                    best.feasible = true;
                    best.objective = obj;
                    best.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
                }
            }
        }
    }
    return best;
}

namespace {

// Unit state: -1 off, 0 on, k > 0 starting with k steps before delivery.
using Units = std::vector<int>;

struct Stage {
    const Scenario& s;
    const dispatch::DispatchOptions& opt;
    const dispatch::StepInput& in;
    std::map<std::tuple<unsigned, double, double>, double> memo;

    double cost(const Units& u, double battery_mw, double battery_reserve_mw)
    {
        unsigned mask = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] == 0) mask |= 1u << i;
        }
        const auto key = std::make_tuple(mask, battery_mw, battery_reserve_mw);
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        const double sm3_per_mw = opt.step_hours() * 3600.0 / s.fluid.gas_energy_value_mj_per_sm3;
        const double inf = std::numeric_limits<double>::infinity();
        SmallLp lp;
        double constant = 0.0;
        double cap_on = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] != 0) continue;
            const auto& g = s.gas_turbines[i];
            constant += g.fuel_intercept_mw * sm3_per_mw;
            cap_on += g.capacity_mw;
            lp.cost.push_back(g.fuel_slope * sm3_per_mw);
            lp.lower.push_back(g.min_load_mw);
            lp.upper.push_back(g.capacity_mw);
            lp.eq_row.push_back(1.0);
            lp.ge_row.push_back(-1.0);
        }
        auto add = [&](double c, double lo, double hi, double e, double g) {
            lp.cost.push_back(c);
            lp.lower.push_back(lo);
            lp.upper.push_back(hi);
            lp.eq_row.push_back(e);
            lp.ge_row.push_back(g);
        };
        add(0.0, 0.0, in.wind_available_mw, 1.0, 0.0);              // wind used
        add(opt.energy_penalty_sm3_per_mw, 0.0, inf, 1.0, 0.0);     // unserved energy
        add(opt.energy_penalty_sm3_per_mw, 0.0, inf, -1.0, 0.0);    // surplus
        add(opt.reserve_penalty_sm3_per_mw, 0.0, inf, 0.0, 1.0);    // missing reserve
        lp.eq_rhs = in.demand_mw - battery_mw;
        lp.ge_rhs = in.reserve_requirement_mw - cap_on - battery_reserve_mw;

        const auto r = solve_small_lp(lp);
        if (!r.feasible) throw std::logic_error("oracle: stage program infeasible");
        const double value = constant + r.objective;
        memo.emplace(key, value);
        return value;
    }
};

struct Successor {
    Units next;
    int starts;
};

std::vector<Successor> successors(const Units& u, const std::vector<int>& delay)
{
    std::vector<Successor> out{{Units{}, 0}};
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::vector<std::pair<int, int>> choices;
        if (u[i] == 0) {
            choices = {{0, 0}, {-1, 0}};
        } else if (u[i] < 0) {
            choices = {{-1, 0}, {delay[i] > 0 ? delay[i] : 0, 1}};
        } else {
            choices = {{u[i] - 1, 0}};
        }
        std::vector<Successor> grown;
        for (const auto& partial : out) {
            for (const auto& [code, st] : choices) {
                Successor n = partial;
                n.next.push_back(code);
                n.starts += st;
                grown.push_back(std::move(n));
            }
        }
        out = std::move(grown);
    }
    return out;
}

UnitStatus status_of(int code)
{
    return code == 0 ? UnitStatus::On : code < 0 ? UnitStatus::Off : UnitStatus::Starting;
}

} // namespace

OraclePlan brute_force_plan(const Scenario& s, const dispatch::CommitmentState& state,
                            std::span<const dispatch::StepInput> forecasts,
                            const dispatch::DispatchOptions& opt)
{
    if (forecasts.size() > kMaxHorizon) {
        throw GuardError("brute_force_plan: horizon exceeds " + std::to_string(kMaxHorizon));
    }
    if (s.gas_turbines.size() > kMaxTurbines || s.batteries.size() > 1) {
        throw GuardError("brute_force_plan: instance too large");
    }
    OraclePlan plan;
    if (forecasts.empty()) return plan;

    const double h = opt.step_hours();
    std::vector<int> delay;
    for (const auto& g : s.gas_turbines) {
        delay.push_back(static_cast<int>(std::ceil(g.startup_total_min() / opt.step_min - 1e-9)));
    }

    Units start;
    for (std::size_t i = 0; i < s.gas_turbines.size(); ++i) {
        const auto& us = state.units.at(i);
        if (us.status == UnitStatus::On) start.push_back(0);
        else if (us.status == UnitStatus::Off) start.push_back(-1);
        else start.push_back(std::max(1, static_cast<int>(std::ceil(us.remaining_min / opt.step_min - 1e-9))));
    }

    const BatterySpec* bat = s.batteries.empty() ? nullptr : &s.batteries.front();
    std::vector<double> levels{0.0};
    std::size_t soc0 = 0;
    if (bat) {
        levels.clear();
        for (int i = 0; i * opt.soc_grid_mwh <= bat->energy_capacity_mwh + 1e-9; ++i) {
            levels.push_back(std::min(i * opt.soc_grid_mwh, bat->energy_capacity_mwh));
        }
        if (bat->energy_capacity_mwh - levels.back() > 1e-9) levels.push_back(bat->energy_capacity_mwh);
        const double soc = state.soc_mwh.at(0);
        for (std::size_t i = 1; i < levels.size(); ++i) {
            if (std::abs(levels[i] - soc) < std::abs(levels[soc0] - soc)) soc0 = i;
        }
    }

    // Battery move between levels, verified against the storage model.
    struct Move {
        std::size_t to;
        double power;
        double reserve;
    };
    std::vector<std::vector<Move>> moves(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = 0; j < levels.size(); ++j) {
            if (!bat) {
                moves[i].push_back({j, 0.0, 0.0});
                continue;
            }
            const double de = levels[j] - levels[i];
            const double p = de >= 0.0 ? -de / (bat->charge_efficiency * h)
                                       : -de * bat->discharge_efficiency / h;
            if (std::abs(p) > bat->power_capacity_mw + 1e-9) continue;
            const double check = physics::battery_step(levels[i], p, h, *bat);
            if (std::abs(check - levels[j]) > 1e-9) throw std::logic_error("oracle: battery model mismatch");
            double reserve = 0.0;
            if (opt.battery_reserve) {
                reserve = std::max(0.0, std::min(bat->power_capacity_mw - p,
                                                 levels[j] * bat->discharge_efficiency / h));
            }
            moves[i].push_back({j, p, reserve});
        }
    }

    // Enumerate every reachable (units, soc) node per stage, then solve backwards.
    const std::size_t T = forecasts.size();
    using Node = std::pair<Units, std::size_t>;
    std::vector<std::vector<Node>> layer(T + 1);
    layer[0].push_back({start, soc0});
    for (std::size_t t = 0; t < T; ++t) {
        std::map<Node, bool> seen;
        for (const auto& [u, q] : layer[t]) {
            for (const auto& sc : successors(u, delay)) {
                for (const auto& mv : moves[q]) {
                    Node nx{sc.next, mv.to};
                    if (seen.emplace(nx, true).second) layer[t + 1].push_back(nx);
                }
            }
        }
    }

    std::vector<Stage> stages;
    for (std::size_t t = 0; t < T; ++t) stages.push_back(Stage{s, opt, forecasts[t], {}});

    std::map<Node, double> value_next;
    for (const auto& n : layer[T]) value_next[n] = 0.0;
    struct Choice {
        Node next;
        int starts;
    };
    std::vector<std::map<Node, Choice>> policy(T);
    for (std::size_t t = T; t-- > 0;) {
        std::map<Node, double> value;
        for (const auto& node : layer[t]) {
            const auto& [u, q] = node;
            double best = std::numeric_limits<double>::infinity();
            Choice pick{};
            for (const auto& sc : successors(u, delay)) {
                for (const auto& mv : moves[q]) {
                    const Node nx{sc.next, mv.to};
                    const double c = stages[t].cost(sc.next, mv.power, mv.reserve) +
                                     opt.startup_penalty_sm3 * sc.starts + value_next.at(nx);
                    if (c < best) {
                        best = c;
                        pick = {nx, sc.starts};
                    }
                }
            }
            value[node] = best;
            policy[t][node] = pick;
        }
        value_next = std::move(value);
    }

    Node cur{start, soc0};
    plan.objective = value_next.at(cur);
    for (std::size_t t = 0; t < T; ++t) {
        const auto& ch = policy[t].at(cur);
        std::vector<UnitStatus> st;
        for (int code : ch.next.first) st.push_back(status_of(code));
        plan.status.push_back(std::move(st));
        plan.soc_mwh.push_back(bat ? levels[ch.next.second] : 0.0);
        plan.starts.push_back(ch.starts);
        cur = ch.next;
    }
    return plan;
}

namespace {

double central(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double rel_error(double numeric, double analytic)
{
    const double scale = std::max(std::abs(analytic), 1e-300);
    return std::abs(numeric - analytic) / scale;
}

} // namespace

DerivativeCheck finite_difference_check(const std::function<double(double)>& f, double x,
                                        double step, double analytic)
{
    const double scale = std::max(1.0, std::abs(x));
    const double min_step = 1e-10 * scale;
    if (step > min_step && std::isfinite(step)) {
        const double d = central(f, x, step);
        return {d, rel_error(d, analytic), step};
    }
    DerivativeCheck best;
    best.relative_error = std::numeric_limits<double>::infinity();
    const double base = std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
    for (double h : {0.5 * base, base, 2.0 * base}) {
        const double richardson = (4.0 * central(f, x, h / 2.0) - central(f, x, h)) / 3.0;
        const double err = rel_error(richardson, analytic);
        if (err < best.relative_error) best = {richardson, err, h};
    }
    return best;
}

} // namespace leogo::oracle
