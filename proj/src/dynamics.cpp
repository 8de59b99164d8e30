#include "leogo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <memory>
#include <ostream>

namespace leogo::dynamics {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTolerance = 1e-9;

} // namespace

DynamicState init_from_setpoints(const Scenario& s, std::span<const double> gt_mw,
                                 std::span<const bool> on, double wind_mw)
{
    if (gt_mw.size() != s.gas_turbines.size() || on.size() != s.gas_turbines.size()) {
        throw std::invalid_argument("init_from_setpoints: one setpoint per gas turbine expected");
    }
    DynamicState st;
    st.f0_hz = s.network.frequency_hz;
    st.wind_mw = wind_mw;
    bool any = false;
    for (std::size_t i = 0; i < gt_mw.size(); ++i) {
        const auto& g = s.gas_turbines[i];
        MachineState m;
        m.tag = g.tag;
        m.in_service = on[i];
        m.rated_mva = g.rated_mva;
        m.inertia_h_s = g.inertia_h_s;
        m.droop = g.droop;
        m.governor_time_constant_s = g.governor_time_constant_s;
        m.min_mw = g.min_load_mw;
        m.max_mw = g.capacity_mw;
        if (on[i]) {
            if (gt_mw[i] < g.min_load_mw - kTolerance || gt_mw[i] > g.capacity_mw + kTolerance) {
                throw EquilibriumError(fmt::format("{} setpoint {:.4f} MW outside [{}, {}]", g.tag,
                                                   gt_mw[i], g.min_load_mw, g.capacity_mw));
            }
            m.pm_mw = m.pref_mw = m.p0_mw = gt_mw[i];
            st.load_mw += gt_mw[i];
            any = true;
        }
        st.machines.push_back(m);
    }
    if (!any) throw EquilibriumError("no synchronous machine in service");
    st.load_mw += wind_mw;

    double weight = 0.0;
    double damping = 0.0;
    for (const auto& l : s.loads) {
        weight += l.nominal_mw;
        damping += l.nominal_mw * l.frequency_damping;
    }
    st.load_damping = weight > 0.0 ? damping / weight : 1.0;

    if (equilibrium_residual(st) > kTolerance) {
        throw EquilibriumError("initial state is not an equilibrium");
    }
    return st;
}

DynamicState init_from_dispatch(const Scenario& s, const dispatch::DispatchStep& step)
{
    if (!step.feasible) throw EquilibriumError("dispatch step is not feasible");
    std::unique_ptr<bool[]> on(new bool[s.gas_turbines.size()]);
    for (std::size_t i = 0; i < s.gas_turbines.size(); ++i) {
        on[i] = step.status.at(i) == dispatch::UnitStatus::On;
    }
    return init_from_setpoints(s, step.gt_mw, std::span<const bool>(on.get(), s.gas_turbines.size()),
                               step.wind_used_mw);
}

namespace {

// Right-hand side shared by RK4 stages. Layout per machine: angle, speed
// deviation (pu), mechanical power; the uniform model keeps angle and speed
// of all machines equal.
struct Model {
    const DynamicState& base;
    const SimulationOptions& opt;
    double load_step_mw = 0.0;

    std::size_t n() const { return base.machines.size(); }

    double governor(const MachineState& m, double pm, double df) const
    {
        const double k = m.droop_gain_mw_per_hz(base.f0_hz);
        double u = (m.pref_mw - k * df - pm) / m.governor_time_constant_s;
        if (pm >= m.max_mw && u > 0.0) u = 0.0;
        if (pm <= m.min_mw && u < 0.0) u = 0.0;
        return u;
    }

    double load(double df) const
    {
        return base.load_mw * (1.0 + base.load_damping * df / base.f0_hz) + load_step_mw;
    }

    double ks(const MachineState& m) const { return m.rated_mva / opt.transient_reactance_pu; }

    // Electrical power per machine and the frequency reported for the bus.
    void electrical(const std::vector<double>& y, std::vector<double>& pe, double& df_bus,
                    double& df_coi) const
    {
        const double f0 = base.f0_hz;
        pe.assign(n(), 0.0);
        if (!opt.multi_machine) {
            double m_sum = 0.0;
            double pm_sum = 0.0;
            double df = 0.0;
            for (std::size_t i = n(); i-- > 0;) {
                if (!base.machines[i].in_service) continue;
                m_sum += base.machines[i].inertia_mws_per_hz(f0);
                pm_sum += y[3 * i + 2];
                df = y[3 * i + 1] * f0;
            }
            const double ddf = (pm_sum + base.wind_mw - load(df)) / m_sum;
            for (std::size_t i = 0; i < n(); ++i) {
                if (!base.machines[i].in_service) continue;
                pe[i] = y[3 * i + 2] - base.machines[i].inertia_mws_per_hz(f0) * ddf;
            }
            df_bus = df_coi = df;
            return;
        }
        double m_sum = 0.0;
        double mdf = 0.0;
        double ks_sum = 0.0;
        double ks_delta = 0.0;
        double ks_df = 0.0;
        double p0 = 0.0;
        for (std::size_t i = 0; i < n(); ++i) {
            const auto& m = base.machines[i];
            if (!m.in_service) continue;
            const double mi = m.inertia_mws_per_hz(f0);
            m_sum += mi;
            mdf += mi * y[3 * i + 1] * f0;
            ks_sum += ks(m);
            ks_delta += ks(m) * y[3 * i];
            ks_df += ks(m) * y[3 * i + 1] * f0;
            p0 += m.p0_mw;
        }
        df_coi = mdf / m_sum;
        const double theta = (ks_delta + p0 + base.wind_mw - load(df_coi)) / ks_sum;
        for (std::size_t i = 0; i < n(); ++i) {
            const auto& m = base.machines[i];
            if (!m.in_service) continue;
            pe[i] = m.p0_mw + ks(m) * (y[3 * i] - theta);
        }
        df_bus = ks_df / ks_sum;
    }

    void rhs(const std::vector<double>& y, std::vector<double>& dy) const
    {
        const double f0 = base.f0_hz;
        std::vector<double> pe;
        double df_bus = 0.0;
        double df_coi = 0.0;
        electrical(y, pe, df_bus, df_coi);
        dy.assign(y.size(), 0.0);
        for (std::size_t i = 0; i < n(); ++i) {
            const auto& m = base.machines[i];
            if (!m.in_service) continue;
            const double mi = m.inertia_mws_per_hz(f0);
            const double df_i = y[3 * i + 1] * f0;
            double accel = y[3 * i + 2] - pe[i];
            if (opt.multi_machine) {
                accel -= opt.machine_damping_pu * m.rated_mva / f0 * (df_i - df_coi);
            }
            dy[3 * i] = 2.0 * kPi * df_i;
            dy[3 * i + 1] = accel / mi / f0;
            dy[3 * i + 2] = governor(m, y[3 * i + 2], opt.multi_machine ? df_i : df_coi);
        }
    }
};

std::vector<double> pack(const DynamicState& st)
{
    std::vector<double> y;
    for (const auto& m : st.machines) {
        y.push_back(m.delta_rad);
        y.push_back(m.dw_pu);
        y.push_back(m.pm_mw);
    }
    return y;
}

void unpack(const std::vector<double>& y, DynamicState& st)
{
    for (std::size_t i = 0; i < st.machines.size(); ++i) {
        st.machines[i].delta_rad = y[3 * i];
        st.machines[i].dw_pu = y[3 * i + 1];
        st.machines[i].pm_mw = y[3 * i + 2];
    }
}

} // namespace

double equilibrium_residual(const DynamicState& st)
{
    SimulationOptions opt;
    Model model{st, opt, 0.0};
    std::vector<double> dy;
    model.rhs(pack(st), dy);
    double worst = 0.0;
    for (std::size_t i = 0; i < st.machines.size(); ++i) {
        const auto& m = st.machines[i];
        if (!m.in_service) continue;
        worst = std::max(worst, std::abs(dy[3 * i + 1] * m.inertia_mws_per_hz(st.f0_hz) * st.f0_hz));
        worst = std::max(worst, std::abs(dy[3 * i + 2] * m.governor_time_constant_s));
    }
    return worst;
}

double kinetic_energy_mj(const DynamicState& st)
{
    double e = 0.0;
    for (const auto& m : st.machines) {
        if (!m.in_service) continue;
        const double r = 1.0 + m.dw_pu;
        e += m.inertia_h_s * m.rated_mva * r * r;
    }
    return e;
}

double Trajectory::nadir_hz() const
{
    double lo = samples.empty() ? 0.0 : samples.front().f_hz;
    for (const auto& s : samples) lo = std::min(lo, s.f_hz);
    return lo;
}

Trajectory simulate(const DynamicState& initial, std::vector<Event> events, double duration_s,
                    const SimulationOptions& opt)
{
    if (!(opt.dt_s > 0.0) || opt.dt_s > 0.01 + 1e-15) {
        throw std::invalid_argument("simulate: time step must be in (0, 10 ms]");
    }
    if (duration_s < 0.0) throw std::invalid_argument("simulate: negative duration");
    for (const auto& e : events) {
        if (e.time_s < 0.0 || e.time_s > duration_s) {
            throw std::invalid_argument("simulate: event outside the simulated interval");
        }
        if (e.kind == EventKind::Trip && e.machine >= initial.machines.size()) {
            throw std::invalid_argument("simulate: trip of unknown machine");
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time_s < b.time_s; });

    DynamicState st = initial;
    if (!opt.multi_machine) {
        // One frequency: align every machine on the centre of inertia.
        for (auto& m : st.machines) m.dw_pu = st.df_hz / st.f0_hz;
    }
    Model model{st, opt, 0.0};
    std::vector<double> y = pack(st);
    const std::size_t steps = static_cast<std::size_t>(std::llround(duration_s / opt.dt_s));
    const double h = opt.dt_s;

    Trajectory tr;
    double ke_ref = kinetic_energy_mj(st);
    std::size_t next_event = 0;

    std::vector<double> pe;
    auto sample = [&](double t) {
        double df_bus = 0.0;
        double df_coi = 0.0;
        model.electrical(y, pe, df_bus, df_coi);
        Sample s;
        s.t_s = t;
        s.f_hz = st.f0_hz + df_bus;
        s.pe_mw = pe;
        for (std::size_t i = 0; i < st.machines.size(); ++i) {
            s.pm_mw.push_back(st.machines[i].in_service ? y[3 * i + 2] : 0.0);
            s.dw_pu.push_back(y[3 * i + 1]);
        }
        s.wind_mw = st.wind_mw;
        return s;
    };
    auto imbalance = [&]() {
        double df_bus = 0.0;
        double df_coi = 0.0;
        model.electrical(y, pe, df_bus, df_coi);
        double sum = 0.0;
        for (std::size_t i = 0; i < st.machines.size(); ++i) {
            if (st.machines[i].in_service) sum += y[3 * i + 2] - pe[i];
        }
        return sum;
    };
    auto apply_events = [&](double t) {
        while (next_event < events.size() && events[next_event].time_s <= t + 0.5 * h) {
            const auto& e = events[next_event++];
            if (e.kind == EventKind::Trip) {
                auto& m = st.machines[e.machine];
                if (m.in_service) {
                    const double r = 1.0 + y[3 * e.machine + 1];
                    ke_ref -= m.inertia_h_s * m.rated_mva * r * r;
                    m.in_service = false;
                    y[3 * e.machine + 2] = 0.0;
                }
                bool any = false;
                for (const auto& mm : st.machines) any = any || mm.in_service;
                if (!any) throw InstabilityError(fmt::format("t = {:.3f} s: last machine tripped", t));
            } else {
                model.load_step_mw += e.delta_mw;
            }
        }
    };

    apply_events(0.0);
    tr.samples.push_back(sample(0.0));
    std::vector<double> k1, k2, k3, k4, tmp(y.size());
    const int every = std::max(1, opt.record_every);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        if (k > 0) apply_events(t);
        const double p_start = imbalance();

        model.rhs(y, k1);
        for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        model.rhs(tmp, k2);
        for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        model.rhs(tmp, k3);
        for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + h * k3[j];
        model.rhs(tmp, k4);
        for (std::size_t j = 0; j < y.size(); ++j) {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        for (std::size_t i = 0; i < st.machines.size(); ++i) {
            const auto& m = st.machines[i];
            if (m.in_service) y[3 * i + 2] = std::clamp(y[3 * i + 2], m.min_mw, m.max_mw);
        }
        tr.energy_imbalance_mj += 0.5 * h * (p_start + imbalance());

        const double t_next = static_cast<double>(k + 1) * h;
        for (std::size_t i = 0; i < st.machines.size(); ++i) {
            if (!st.machines[i].in_service) continue;
            const double df = y[3 * i + 1] * st.f0_hz;
            if (!std::isfinite(df) || std::abs(df) > opt.abort_df_hz) {
                throw InstabilityError(fmt::format(
                    "t = {:.3f} s: frequency deviation of {} reached {:.3f} Hz", t_next,
                    st.machines[i].tag, df));
            }
        }
        if ((k + 1) % static_cast<std::size_t>(every) == 0 || k + 1 == steps) {
            tr.samples.push_back(sample(t_next));
        }
    }

    unpack(y, st);
    st.t_s = initial.t_s + static_cast<double>(steps) * h;
    double df_bus = 0.0;
    double df_coi = 0.0;
    model.electrical(y, pe, df_bus, df_coi);
    st.df_hz = df_coi;
    st.load_mw += model.load_step_mw;
    tr.kinetic_energy_change_mj = kinetic_energy_mj(st) - ke_ref;
    tr.final_state = st;
    return tr;
}

double steady_state_frequency(double delta_p_mw, std::span<const MachineState> remaining,
                              double load_mw, double load_damping, double f0_hz)
{
    double k = 0.0;
    bool headroom = false;
    for (const auto& m : remaining) {
        if (!m.in_service) continue;
        k += m.droop_gain_mw_per_hz(f0_hz);
        headroom = headroom || m.pm_mw < m.max_mw;
    }
    if (!headroom && delta_p_mw > 0.0) {
        throw std::domain_error("steady_state_frequency: no machine with governor headroom");
    }
    const double d = load_damping * load_mw / f0_hz;
    if (k + d <= 0.0) throw std::domain_error("steady_state_frequency: no frequency response");
    return -delta_p_mw / (k + d);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr)
{
    out << "t_s,f_hz,gt1_mw,gt2_mw,gt3_mw,wind_mw\n";
    for (const auto& s : tr.samples) {
        auto pe = [&](std::size_t i) { return i < s.pe_mw.size() ? s.pe_mw[i] : 0.0; };
        out << fmt::format("{:.4f},{:.6f},{:.4f},{:.4f},{:.4f},{:.4f}\n", s.t_s, s.f_hz, pe(0),
                           pe(1), pe(2), s.wind_mw);
    }
}

} // namespace leogo::dynamics
