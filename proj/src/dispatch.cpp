#include "leogo/dispatch.hpp"
#include "leogo/physics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace leogo::dispatch {

CommitmentState CommitmentState::all_on(const Scenario& s)
{
    CommitmentState st;
    st.units.assign(s.gas_turbines.size(), UnitState{UnitStatus::On, 0.0});
    for (const auto& b : s.batteries) st.soc_mwh.push_back(0.5 * b.energy_capacity_mwh);
    return st;
}

double step_demand(const Scenario& s, double multiplier)
{
    if (multiplier < 0.0) throw std::domain_error("step_demand: negative multiplier");
    double flow = 0.0;
    double fixed = 0.0;
    for (const auto& l : s.loads) (l.flow_dependent ? flow : fixed) += l.nominal_mw;
    return multiplier * flow + fixed + s.consumption_deviation_mw + s.loss_allowance_mw;
}

namespace {

// Fills the committed units from their minimum up to total_mw in merit
// order of fuel slope. Within a group of equal slope the output level is
// equalised (water filling), so identical units share load evenly.
void allocate(std::span<const bool> on, std::span<const GasTurbineSpec> specs, double total_mw,
              std::vector<double>& out)
{
    out.assign(specs.size(), 0.0);
    std::vector<std::size_t> idx;
    double remaining = total_mw;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!on[i]) continue;
        idx.push_back(i);
        out[i] = specs[i].min_load_mw;
        remaining -= specs[i].min_load_mw;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return specs[a].fuel_slope < specs[b].fuel_slope;
    });
    std::size_t g = 0;
    while (g < idx.size() && remaining > 0.0) {
        std::size_t end = g;
        while (end < idx.size() && specs[idx[end]].fuel_slope == specs[idx[g]].fuel_slope) ++end;
        double group_room = 0.0;
        for (std::size_t k = g; k < end; ++k) {
            group_room += specs[idx[k]].capacity_mw - specs[idx[k]].min_load_mw;
        }
        const double target = std::min(remaining, group_room);
        // Bisection on the common level lambda: sum clamp(lambda) = base + target.
        double base = 0.0;
        double lo = std::numeric_limits<double>::max();
        double hi = 0.0;
        for (std::size_t k = g; k < end; ++k) {
            base += specs[idx[k]].min_load_mw;
            lo = std::min(lo, specs[idx[k]].min_load_mw);
            hi = std::max(hi, specs[idx[k]].capacity_mw);
        }
        auto level_sum = [&](double lambda) {
            double sum = 0.0;
            for (std::size_t k = g; k < end; ++k) {
                sum += std::clamp(lambda, specs[idx[k]].min_load_mw, specs[idx[k]].capacity_mw);
            }
            return sum;
        };
        bool uniform = true;
        for (std::size_t k = g + 1; k < end; ++k) {
            uniform = uniform && specs[idx[k]].min_load_mw == specs[idx[g]].min_load_mw &&
                      specs[idx[k]].capacity_mw == specs[idx[g]].capacity_mw;
        }
        if (uniform) {
            const double level = (base + target) / static_cast<double>(end - g);
            for (std::size_t k = g; k < end; ++k) out[idx[k]] = level;
        } else {
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                (level_sum(mid) < base + target ? lo : hi) = mid;
            }
            const double lambda = 0.5 * (lo + hi);
            for (std::size_t k = g; k < end; ++k) {
                out[idx[k]] =
                    std::clamp(lambda, specs[idx[k]].min_load_mw, specs[idx[k]].capacity_mw);
            }
        }
        remaining -= target;
        g = end;
    }
}

} // namespace

EconomicDispatch economic_dispatch(std::span<const bool> on, double demand_mw,
                                   double wind_available_mw, double reserve_requirement_mw,
                                   std::span<const GasTurbineSpec> specs, double battery_mw,
                                   double battery_reserve_mw)
{
    if (on.size() != specs.size()) throw std::invalid_argument("economic_dispatch: size mismatch");
    EconomicDispatch r;
    r.battery_mw = battery_mw;

    double min_sum = 0.0;
    double cap_sum = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!on[i]) continue;
        min_sum += specs[i].min_load_mw;
        cap_sum += specs[i].capacity_mw;
    }

    const double residual = demand_mw - battery_mw;
    // Wind is free, so thermal output is pushed as low as the committed
    // minimum allows; that also maximises spinning reserve.
    double thermal = std::clamp(residual - wind_available_mw, min_sum, cap_sum);
    double wind = residual - thermal;
    if (wind < 0.0) {
        r.surplus_mw = -wind;
        wind = 0.0;
    } else if (wind > wind_available_mw) {
        r.energy_deficit_mw = wind - wind_available_mw;
        wind = wind_available_mw;
    }
    r.wind_used_mw = wind;
    r.curtailed_mw = wind_available_mw - wind;

    allocate(on, specs, thermal, r.gt_mw);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (on[i]) r.fuel_mw += specs[i].fuel_intercept_mw + specs[i].fuel_slope * r.gt_mw[i];
    }
    r.reserve_mw = cap_sum - thermal + battery_reserve_mw;
    r.reserve_deficit_mw = std::max(0.0, reserve_requirement_mw - r.reserve_mw);
    for (double* v : {&r.energy_deficit_mw, &r.surplus_mw, &r.reserve_deficit_mw}) {
        if (*v < 1e-9) *v = 0.0;
    }
    return r;
}

double battery_reserve(const BatterySpec& b, double battery_mw, double soc_after_mwh,
                       double step_hours)
{
    const double power_room = b.power_capacity_mw - battery_mw;
    const double energy_room = soc_after_mwh * b.discharge_efficiency / step_hours;
    return std::max(0.0, std::min(power_room, energy_room));
}

EconomicDispatch economic_dispatch_balancing(std::span<const bool> on, double demand_mw,
                                             double wind_available_mw,
                                             double reserve_requirement_mw,
                                             std::span<const GasTurbineSpec> specs,
                                             const BatterySpec& battery, double soc_mwh,
                                             double step_hours, bool with_battery_reserve)
{
    double min_sum = 0.0;
    double cap_sum = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!on[i]) continue;
        min_sum += specs[i].min_load_mw;
        cap_sum += specs[i].capacity_mw;
    }
    const double max_discharge = std::min(battery.power_capacity_mw,
                                          soc_mwh * battery.discharge_efficiency / step_hours);
    const double max_charge =
        std::min(battery.power_capacity_mw,
                 (battery.energy_capacity_mwh - soc_mwh) / (battery.charge_efficiency * step_hours));

    double b = 0.0;
    const double net = demand_mw - wind_available_mw;
    if (net < min_sum) {
        // Absorb the excess by charging before any wind is curtailed.
        b = -std::min(max_charge, min_sum - net);
    } else if (net > cap_sum) {
        b = std::min(max_discharge, net - cap_sum);
    }
    const double soc_after = physics::battery_step(soc_mwh, b, step_hours, battery);
    const double br = with_battery_reserve ? battery_reserve(battery, b, soc_after, step_hours)
                                           : 0.0;
    return economic_dispatch(on, demand_mw, wind_available_mw, reserve_requirement_mw, specs, b,
                             br);
}

int DispatchStep::units_on() const
{
    return static_cast<int>(std::count(status.begin(), status.end(), UnitStatus::On));
}

double DispatchPlan::total_fuel_sm3() const
{
    double s = 0.0;
    for (const auto& st : steps) s += st.fuel_sm3;
    return s;
}

double DispatchPlan::total_co2_kg() const
{
    double s = 0.0;
    for (const auto& st : steps) s += st.co2_kg;
    return s;
}

int DispatchPlan::total_starts() const
{
    int s = 0;
    for (const auto& st : steps) s += st.starts;
    return s;
}

double DispatchPlan::curtailed_mwh(double step_hours) const
{
    double s = 0.0;
    for (const auto& st : steps) s += st.curtailed_mw * step_hours;
    return s;
}

double DispatchPlan::min_reserve_mw() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& st : steps) m = std::min(m, st.reserve_mw);
    return steps.empty() ? 0.0 : m;
}

int DispatchPlan::infeasible_steps() const
{
    return static_cast<int>(
        std::count_if(steps.begin(), steps.end(), [](const DispatchStep& s) { return !s.feasible; }));
}

namespace {

// Dense encoding of the joint unit state. Each unit has a code in
// [0, radix): 0 = off, 1..d = starting with that many steps before
// delivery, radix - 1 = on.
class UnitStateSpace {
public:
    UnitStateSpace(std::span<const GasTurbineSpec> specs, double step_min)
    {
        int max_delay = 0;
        for (const auto& g : specs) {
            const int d = static_cast<int>(std::ceil(g.startup_total_min() / step_min - 1e-9));
            delays_.push_back(std::max(0, d));
            max_delay = std::max(max_delay, delays_.back());
        }
        radix_ = max_delay + 2;
        count_ = 1;
        for (std::size_t i = 0; i < specs.size(); ++i) count_ *= radix_;
        build_transitions();
    }

    int count() const { return count_; }
    int on_code() const { return radix_ - 1; }
    std::size_t units() const { return delays_.size(); }

    int code(int state, std::size_t unit) const
    {
        for (std::size_t i = 0; i < unit; ++i) state /= radix_;
        return state % radix_;
    }

    int encode(const std::vector<int>& codes) const
    {
        int s = 0;
        for (std::size_t i = codes.size(); i-- > 0;) s = s * radix_ + codes[i];
        return s;
    }

    unsigned on_mask(int state) const
    {
        unsigned m = 0;
        for (std::size_t i = 0; i < units(); ++i) {
            if (code(state, i) == on_code()) m |= 1u << i;
        }
        return m;
    }

    int from_commitment(const CommitmentState& st, double step_min) const
    {
        std::vector<int> codes;
        for (std::size_t i = 0; i < units(); ++i) {
            const auto& u = st.units.at(i);
            switch (u.status) {
            case UnitStatus::Off: codes.push_back(0); break;
            case UnitStatus::On: codes.push_back(on_code()); break;
            case UnitStatus::Starting: {
                int k = static_cast<int>(std::ceil(u.remaining_min / step_min - 1e-9));
                k = std::clamp(k, 1, std::max(1, delays_[i]));
                codes.push_back(delays_[i] == 0 ? on_code() : k);
                break;
            }
            }
        }
        return encode(codes);
    }

    UnitState to_unit_state(int c, double step_min) const
    {
        if (c == 0) return {UnitStatus::Off, 0.0};
        if (c == on_code()) return {UnitStatus::On, 0.0};
        return {UnitStatus::Starting, c * step_min};
    }

    struct Transition {
        int next;
        int starts;
    };
    const std::vector<Transition>& transitions(int state) const { return transitions_[state]; }

private:
    void build_transitions()
    {
        transitions_.resize(static_cast<std::size_t>(count_));
        for (int s = 0; s < count_; ++s) {
            std::vector<std::vector<std::pair<int, int>>> options(units());
            bool valid = true;
            for (std::size_t i = 0; i < units(); ++i) {
                const int c = code(s, i);
                const int d = delays_[i];
                if (c == on_code()) {
                    options[i] = {{on_code(), 0}, {0, 0}};
                } else if (c == 0) {
                    options[i] = {{0, 0}, {d == 0 ? on_code() : d, 1}};
                } else if (c <= d) {
                    options[i] = {{c == 1 ? on_code() : c - 1, 0}};
                } else {
                    valid = false; // counter beyond this unit's delay
                }
            }
            if (!valid) continue;
            // Cartesian product of per-unit options.
            std::vector<std::size_t> pick(units(), 0);
            while (true) {
                std::vector<int> codes(units());
                int starts = 0;
                for (std::size_t i = 0; i < units(); ++i) {
                    codes[i] = options[i][pick[i]].first;
                    starts += options[i][pick[i]].second;
                }
                transitions_[static_cast<std::size_t>(s)].push_back({encode(codes), starts});
                std::size_t i = 0;
                while (i < units() && ++pick[i] == options[i].size()) pick[i++] = 0;
                if (i == units()) break;
            }
        }
    }

    std::vector<int> delays_;
    int radix_ = 2;
    int count_ = 1;
    std::vector<std::vector<Transition>> transitions_;
};

struct SocGrid {
    std::vector<double> levels;

    SocGrid(const BatterySpec* b, double grid)
    {
        if (!b) {
            levels = {0.0};
            return;
        }
        const int n = static_cast<int>(std::floor(b->energy_capacity_mwh / grid + 1e-9));
        for (int i = 0; i <= n; ++i) levels.push_back(std::min(i * grid, b->energy_capacity_mwh));
        if (b->energy_capacity_mwh - levels.back() > 1e-9) levels.push_back(b->energy_capacity_mwh);
    }

    int nearest(double soc) const
    {
        int best = 0;
        for (int i = 1; i < static_cast<int>(levels.size()); ++i) {
            if (std::abs(levels[i] - soc) < std::abs(levels[best] - soc)) best = i;
        }
        return best;
    }
};

// Battery power (positive = discharge) that moves the state of charge from
// level `from` to level `to` within one step, or nullopt if it exceeds the
// power capacity.
std::optional<double> transition_power(const BatterySpec& b, double from, double to, double hours)
{
    const double delta = to - from;
    double p = 0.0;
    if (delta > 0.0) p = -delta / (b.charge_efficiency * hours);
    else if (delta < 0.0) p = -delta * b.discharge_efficiency / hours;
    if (std::abs(p) > b.power_capacity_mw + 1e-9) return std::nullopt;
    return p;
}

void check_ramp_limits(std::span<const GasTurbineSpec> specs, double step_min)
{
    for (const auto& g : specs) {
        const double ramp = g.ramp_rate_per_min * g.capacity_mw * step_min;
        if (ramp + 1e-9 < g.capacity_mw - g.min_load_mw || ramp + 1e-9 < g.min_load_mw) {
            throw std::domain_error(fmt::format(
                "plan_horizon: ramp limit of {} binds at {} min steps; use a longer step", g.tag,
                step_min));
        }
    }
}

double step_cost(const EconomicDispatch& d, int starts, const Scenario& s,
                 const DispatchOptions& opt)
{
    return physics::fuel_volume_sm3(d.fuel_mw, opt.step_hours(), s.fluid) +
           opt.startup_penalty_sm3 * starts +
           opt.energy_penalty_sm3_per_mw * (d.energy_deficit_mw + d.surplus_mw) +
           opt.reserve_penalty_sm3_per_mw * d.reserve_deficit_mw;
}

void fill_accounting(DispatchStep& st, const EconomicDispatch& d, const Scenario& s,
                     const DispatchOptions& opt)
{
    st.gt_mw = d.gt_mw;
    st.wind_used_mw = d.wind_used_mw;
    st.curtailed_mw = d.curtailed_mw;
    st.battery_mw = d.battery_mw;
    st.reserve_mw = d.reserve_mw;
    st.fuel_mw = d.fuel_mw;
    st.fuel_sm3 = physics::fuel_volume_sm3(d.fuel_mw, opt.step_hours(), s.fluid);
    st.co2_kg = s.field.co2_content_kg_per_sm3 * st.fuel_sm3;
    st.energy_deficit_mw = d.energy_deficit_mw;
    st.surplus_mw = d.surplus_mw;
    st.reserve_deficit_mw = d.reserve_deficit_mw;
    st.feasible = d.feasible();
}

// std::vector<bool> cannot back a span, so keep a plain array.
class OnMask {
public:
    explicit OnMask(std::size_t n) : flags_(new bool[n]()), n_(n) {}
    bool& operator[](std::size_t i) { return flags_[i]; }
    std::span<const bool> view() const { return {flags_.get(), n_}; }
    std::span<const bool> set(unsigned mask)
    {
        for (std::size_t i = 0; i < n_; ++i) flags_[i] = (mask >> i) & 1u;
        return view();
    }

private:
    std::unique_ptr<bool[]> flags_;
    std::size_t n_;
};

} // namespace

DispatchPlan plan_horizon(const Scenario& s, const CommitmentState& state,
                          std::span<const StepInput> forecasts, const DispatchOptions& opt)
{
    if (s.gas_turbines.size() > 16) {
        throw std::invalid_argument("plan_horizon: too many gas turbines");
    }
    if (s.batteries.size() > 1) {
        throw std::invalid_argument("plan_horizon: at most one battery is supported");
    }
    if (state.units.size() != s.gas_turbines.size()) {
        throw std::invalid_argument("plan_horizon: commitment state does not match scenario");
    }
    DispatchPlan plan;
    plan.final_state = state;
    if (forecasts.empty()) return plan;

    const std::span<const GasTurbineSpec> specs(s.gas_turbines);
    check_ramp_limits(specs, opt.step_min);

    const BatterySpec* bat = s.batteries.empty() ? nullptr : &s.batteries.front();
    const UnitStateSpace space(specs, opt.step_min);
    const SocGrid soc(bat, opt.soc_grid_mwh);
    const int n_soc = static_cast<int>(soc.levels.size());
    const int n_states = space.count() * n_soc;
    const double hours = opt.step_hours();
    const std::size_t n_units = specs.size();

    // Feasible battery moves between grid levels.
    struct Move {
        int to;
        double power;
    };
    std::vector<std::vector<Move>> moves(static_cast<std::size_t>(n_soc));
    for (int i = 0; i < n_soc; ++i) {
        for (int j = 0; j < n_soc; ++j) {
            if (!bat) {
                moves[i].push_back({j, 0.0});
                continue;
            }
            if (auto p = transition_power(*bat, soc.levels[i], soc.levels[j], hours)) {
                moves[i].push_back({j, *p});
            }
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t horizon = forecasts.size();
    std::vector<std::vector<double>> cost(horizon + 1, std::vector<double>(n_states, inf));
    std::vector<std::vector<int>> parent(horizon + 1, std::vector<int>(n_states, -1));

    const int start_units = space.from_commitment(state, opt.step_min);
    const int start_soc = bat ? soc.nearest(state.soc_mwh.at(0)) : 0;
    cost[0][start_units * n_soc + start_soc] = 0.0;

    const unsigned n_masks = 1u << n_units;
    std::vector<double> stage(static_cast<std::size_t>(n_masks) * n_soc * n_soc, inf);
    OnMask on(n_units);

    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& in = forecasts[t];
        std::fill(stage.begin(), stage.end(), inf);
        auto stage_cost = [&](unsigned mask, int from, const Move& mv) {
            double& c = stage[(static_cast<std::size_t>(mask) * n_soc + from) * n_soc + mv.to];
            if (c == inf) {
                const double br =
                    bat && opt.battery_reserve
                        ? battery_reserve(*bat, mv.power, soc.levels[mv.to], hours)
                        : 0.0;
                const auto d = economic_dispatch(on.set(mask),
                                                 in.demand_mw, in.wind_available_mw,
                                                 in.reserve_requirement_mw, specs, mv.power, br);
                c = step_cost(d, 0, s, opt);
            }
            return c;
        };

        const auto& prev = cost[t];
        auto& next = cost[t + 1];
        auto& par = parent[t + 1];
        for (int u = 0; u < space.count(); ++u) {
            for (int q = 0; q < n_soc; ++q) {
                const int idx = u * n_soc + q;
                if (prev[idx] == inf) continue;
                for (const auto& tr : space.transitions(u)) {
                    const unsigned mask = space.on_mask(tr.next);
                    for (const auto& mv : moves[q]) {
                        const double c = prev[idx] + stage_cost(mask, q, mv) +
                                         opt.startup_penalty_sm3 * tr.starts;
                        const int nidx = tr.next * n_soc + mv.to;
                        if (c < next[nidx]) {
                            next[nidx] = c;
                            par[nidx] = idx;
                        }
                    }
                }
            }
        }
    }

    int best = -1;
    for (int i = 0; i < n_states; ++i) {
        if (cost[horizon][i] < inf && (best < 0 || cost[horizon][i] < cost[horizon][best])) best = i;
    }
    if (best < 0) throw std::logic_error("plan_horizon: no reachable end state");

    std::vector<int> path(horizon + 1);
    path[horizon] = best;
    for (std::size_t t = horizon; t > 0; --t) path[t - 1] = parent[t][path[t]];

    plan.objective = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const int from = path[t];
        const int to = path[t + 1];
        const int u_from = from / n_soc;
        const int u_to = to / n_soc;
        const int q_from = from % n_soc;
        const int q_to = to % n_soc;

        int starts = 0;
        for (const auto& tr : space.transitions(u_from)) {
            if (tr.next == u_to) {
                starts = tr.starts;
                break;
            }
        }
        double bp = 0.0;
        if (bat) bp = *transition_power(*bat, soc.levels[q_from], soc.levels[q_to], hours);
        const double br =
            bat && opt.battery_reserve ? battery_reserve(*bat, bp, soc.levels[q_to], hours) : 0.0;

        const auto& in = forecasts[t];
        const auto d = economic_dispatch(on.set(space.on_mask(u_to)), in.demand_mw,
                                         in.wind_available_mw, in.reserve_requirement_mw, specs,
                                         bp, br);

        DispatchStep st;
        st.t_min = static_cast<double>(t) * opt.step_min;
        for (std::size_t i = 0; i < n_units; ++i) {
            const auto us = space.to_unit_state(space.code(u_to, i), opt.step_min);
            st.status.push_back(us.status);
            st.start_remaining_min.push_back(us.remaining_min);
        }
        st.wind_available_mw = in.wind_available_mw;
        st.planned_wind_mw = in.wind_available_mw;
        st.demand_mw = in.demand_mw;
        st.soc_mwh = bat ? soc.levels[q_to] : 0.0;
        st.starts = starts;
        fill_accounting(st, d, s, opt);
        plan.objective += step_cost(d, starts, s, opt);
        plan.steps.push_back(std::move(st));
    }

    const int last_units = path[horizon] / n_soc;
    plan.final_state.units.clear();
    for (std::size_t i = 0; i < n_units; ++i) {
        plan.final_state.units.push_back(
            space.to_unit_state(space.code(last_units, i), opt.step_min));
    }
    if (bat) plan.final_state.soc_mwh = {soc.levels[path[horizon] % n_soc]};
    return plan;
}

DispatchPlan rolling_simulate(const Scenario& s, const TimeSeriesSet& profiles,
                              const RollingOptions& opt)
{
    const auto& dopt = opt.dispatch;
    DispatchPlan run;
    CommitmentState state = opt.initial_state.value_or(CommitmentState::all_on(s));
    run.final_state = state;

    const auto n_steps =
        static_cast<std::size_t>(std::llround(opt.duration_min / dopt.step_min));
    if (n_steps == 0) return run;
    if (dopt.horizon_steps < 1) throw std::invalid_argument("rolling_simulate: horizon < 1");

    const TimeSeriesSet ts = profiles::resample(profiles, dopt.step_min * 60.0);
    const std::size_t needed = n_steps + static_cast<std::size_t>(dopt.horizon_steps) - 1;
    if (ts.size() < needed) {
        throw std::invalid_argument(fmt::format(
            "rolling_simulate: profiles cover {} steps, run needs {}", ts.size(), needed));
    }

    const double wind_cap = s.wind_capacity_mw();
    if (wind_cap > 0.0 && ts.wind_power_norm.empty()) {
        throw std::invalid_argument("rolling_simulate: scenario has wind but profiles have none");
    }
    auto channel_or = [](const std::vector<double>& v, const std::vector<double>& fallback) {
        return v.empty() ? &fallback : &v;
    };
    const auto* actual = &ts.wind_power_norm;
    const auto* forecast = channel_or(ts.wind_forecast, ts.wind_power_norm);
    const auto* nowcast = channel_or(ts.wind_nowcast, *forecast);

    auto demand_at = [&](std::size_t i) {
        double m = ts.demand_multiplier.empty() ? 1.0 : ts.demand_multiplier[i];
        const double t = static_cast<double>(i) * dopt.step_min;
        if (opt.dip && t >= opt.dip->start_min && t < opt.dip->end_min) {
            m *= 1.0 - opt.dip->fraction;
        }
        return step_demand(s, m);
    };
    auto wind_at = [&](const std::vector<double>* ch, std::size_t i) {
        return wind_cap > 0.0 ? wind_cap * (*ch)[i] : 0.0;
    };

    const std::span<const GasTurbineSpec> specs(s.gas_turbines);
    const BatterySpec* bat = s.batteries.empty() ? nullptr : &s.batteries.front();
    std::vector<StepInput> inputs(static_cast<std::size_t>(dopt.horizon_steps));

    for (std::size_t k = 0; k < n_steps; ++k) {
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            const std::size_t i = k + j;
            const auto* ch = static_cast<int>(j) < dopt.nowcast_steps ? nowcast : forecast;
            inputs[j] = {demand_at(i), wind_at(ch, i), s.reserve_requirement_mw};
        }
        const DispatchPlan plan = plan_horizon(s, state, inputs, dopt);
        const DispatchStep& planned = plan.steps.front();

        // Commit the first step and re-dispatch it against measured wind.
        OnMask on(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) on[i] = planned.status[i] == UnitStatus::On;
        const double demand = demand_at(k);
        const double wind = wind_at(actual, k);
        // The battery follows its planned setpoint but also balances the
        // forecast error in real time, within its power and energy limits.
        auto realize = [&](double battery_mw, double& soc_after) {
            double br = 0.0;
            soc_after = 0.0;
            if (bat) {
                soc_after = physics::battery_step(state.soc_mwh.at(0), battery_mw,
                                                  dopt.step_hours(), *bat);
                if (dopt.battery_reserve) {
                    br = battery_reserve(*bat, battery_mw, soc_after, dopt.step_hours());
                }
            }
            return economic_dispatch(on.view(), demand, wind, s.reserve_requirement_mw, specs,
                                     battery_mw, br);
        };
        double soc_after = 0.0;
        double battery_mw = 0.0;
        if (bat) {
            const double soc_now = state.soc_mwh.at(0);
            const double hours = dopt.step_hours();
            const double max_discharge =
                std::min(bat->power_capacity_mw, soc_now * bat->discharge_efficiency / hours);
            const double max_charge =
                std::min(bat->power_capacity_mw, (bat->energy_capacity_mwh - soc_now) /
                                                     (bat->charge_efficiency * hours));
            battery_mw = std::clamp(planned.battery_mw, -max_charge, max_discharge);
            const auto first = realize(battery_mw, soc_after);
            if (first.energy_deficit_mw > 0.0) {
                battery_mw = std::min(max_discharge, battery_mw + first.energy_deficit_mw);
            } else if (first.surplus_mw > 0.0) {
                battery_mw = std::max(-max_charge, battery_mw - first.surplus_mw);
            }
        }
        const auto d = realize(battery_mw, soc_after);

        DispatchStep st;
        st.t_min = static_cast<double>(k) * dopt.step_min;
        st.status = planned.status;
        st.start_remaining_min = planned.start_remaining_min;
        st.wind_available_mw = wind;
        st.planned_wind_mw = planned.wind_available_mw;
        st.demand_mw = demand;
        st.soc_mwh = soc_after;
        st.starts = planned.starts;
        fill_accounting(st, d, s, dopt);
        run.objective += step_cost(d, planned.starts, s, dopt);
        run.steps.push_back(std::move(st));

        state.units.clear();
        for (std::size_t i = 0; i < specs.size(); ++i) {
            state.units.push_back({planned.status[i], planned.start_remaining_min[i]});
        }
        if (bat) state.soc_mwh = {soc_after};
    }
    run.final_state = state;
    return run;
}

void write_plan_csv(std::ostream& out, const DispatchPlan& plan)
{
    out << "t_min,gt1_mw,gt2_mw,gt3_mw,wind_mw,curtail_mw,batt_mw,soc_mwh,demand_mw,reserve_mw,"
           "fuel_sm3,co2_kg,feasible\n";
    for (const auto& st : plan.steps) {
        auto gt = [&](std::size_t i) { return i < st.gt_mw.size() ? st.gt_mw[i] : 0.0; };
        out << fmt::format("{:.1f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},"
                           "{:.3f},{:.3f},{}\n",
                           st.t_min, gt(0), gt(1), gt(2), st.wind_used_mw, st.curtailed_mw,
                           st.battery_mw, st.soc_mwh, st.demand_mw, st.reserve_mw, st.fuel_sm3,
                           st.co2_kg, st.feasible ? 1 : 0);
    }
}

std::vector<int> commitment_trajectory(const DispatchPlan& plan)
{
    std::vector<int> rle;
    for (const auto& st : plan.steps) {
        const int n = st.units_on();
        if (rle.empty() || rle.back() != n) rle.push_back(n);
    }
    return rle;
}

} // namespace leogo::dispatch
