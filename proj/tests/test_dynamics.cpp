#include "leogo/dynamics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace leogo;
using namespace leogo::dynamics;

namespace {

DynamicState setpoints(const Scenario& s, std::vector<double> gt, double wind = 0.0)
{
    bool on[3];
    for (std::size_t i = 0; i < 3; ++i) on[i] = gt[i] > 0.0;
    return init_from_setpoints(s, gt, on, wind);
}

const Scenario& base()
{
    static const Scenario s = build_canonical_scenario(CaseVariation::Base);
    return s;
}

const Scenario& wind_case()
{
    static const Scenario s = build_canonical_scenario(CaseVariation::A);
    return s;
}

std::vector<MachineState> in_service(const DynamicState& st)
{
    std::vector<MachineState> out;
    for (const auto& m : st.machines) {
        if (m.in_service) out.push_back(m);
    }
    return out;
}

double analytic_offset(const DynamicState& init, const Trajectory& tr, double lost_mw)
{
    return steady_state_frequency(lost_mw, in_service(tr.final_state), init.load_mw,
                                  init.load_damping, init.f0_hz);
}

} // namespace

TEST(Dynamics, EquilibriumFromDispatch)
{
    dispatch::DispatchStep step;
    step.status.assign(3, dispatch::UnitStatus::On);
    step.gt_mw = {14.39, 14.39, 14.39};
    const auto st = init_from_dispatch(base(), step);
    EXPECT_DOUBLE_EQ(st.frequency_hz(), 50.0);
    EXPECT_LT(equilibrium_residual(st), 1e-9);
    EXPECT_NEAR(st.load_mw, 3 * 14.39, 1e-9);
}

TEST(Dynamics, EquilibriumWithWind)
{
    const auto st = setpoints(wind_case(), {8.3, 8.3, 0.0}, 24.0);
    EXPECT_LT(equilibrium_residual(st), 1e-9);
    EXPECT_FALSE(st.machines[2].in_service);
}

TEST(Dynamics, SingleMachineAtMinimumLoad)
{
    const auto st = setpoints(base(), {3.5, 0.0, 0.0});
    EXPECT_LT(equilibrium_residual(st), 1e-9);
    EXPECT_THROW(setpoints(base(), {2.0, 0.0, 0.0}), EquilibriumError);
    EXPECT_THROW(setpoints(base(), {0.0, 0.0, 0.0}), EquilibriumError);
}

TEST(Dynamics, FlatWithoutEvents)
{
    const auto init = setpoints(base(), {14.39, 14.39, 14.39});
    for (bool multi : {false, true}) {
        SimulationOptions opt;
        opt.multi_machine = multi;
        const auto tr = simulate(init, {}, 30.0, opt);
        double worst = 0.0;
        for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.f_hz - 50.0));
        EXPECT_LT(worst, 1e-6);
    }
}

TEST(Dynamics, SteadyStateFormula)
{
    const auto init = setpoints(base(), {14.39, 14.39, 14.39});
    std::vector<MachineState> two(init.machines.begin(), init.machines.begin() + 2);
    EXPECT_DOUBLE_EQ(steady_state_frequency(0.0, two, 40.0, 1.0), 0.0);
    const double k = two[0].droop_gain_mw_per_hz(50.0);
    EXPECT_NEAR(steady_state_frequency(13.5, two, 40.0, 1.0), -13.5 / (2 * k + 40.0 / 50.0),
                1e-12);

    auto stiff = two;
    for (auto& m : stiff) m.droop /= 2.0;
    EXPECT_NEAR(steady_state_frequency(13.5, stiff, 0.0, 0.0) /
                    steady_state_frequency(13.5, two, 0.0, 0.0),
                0.5, 1e-12);
}

TEST(Dynamics, BaseTripSharedByDroop)
{
    const auto init = setpoints(base(), {13.5, 13.5, 13.5});
    const auto tr = simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 30.0);
    const double ss = analytic_offset(init, tr, 13.5);
    const double sim = tr.samples.back().f_hz - 50.0;
    EXPECT_NEAR(sim / ss, 1.0, 0.01);
    EXPECT_LT(tr.nadir_hz(), 50.0 + ss);

    const auto& last = tr.samples.back();
    EXPECT_DOUBLE_EQ(last.pe_mw[0], 0.0);
    const double k = init.machines[1].droop_gain_mw_per_hz(50.0);
    for (std::size_t i : {1u, 2u}) {
        const double rise = last.pe_mw[i] - 13.5;
        EXPECT_GT(rise, 0.0);
        EXPECT_NEAR(rise / (-k * ss), 1.0, 0.02);
    }
}

TEST(Dynamics, WindCaseTripLeavesOneMachine)
{
    const auto init = setpoints(wind_case(), {8.3, 8.3, 0.0}, 24.0);
    const auto tr = simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 30.0);
    const double ss = analytic_offset(init, tr, 8.3);
    EXPECT_NEAR((tr.samples.back().f_hz - 50.0) / ss, 1.0, 0.01);
    EXPECT_LT(tr.nadir_hz(), 50.0 + ss);
    EXPECT_GT(tr.samples.back().pe_mw[1], 8.3 + 7.0);
    EXPECT_DOUBLE_EQ(tr.samples.back().wind_mw, 24.0);
}

TEST(Dynamics, GovernorClamp)
{
    const auto init = setpoints(base(), {20.0, 20.0, 0.0});
    const auto tr = simulate(init, {{0.5, EventKind::LoadStep, 0, 6.0}}, 20.0);
    double peak = 0.0;
    for (const auto& s : tr.samples) {
        for (std::size_t i : {0u, 1u}) {
            EXPECT_LE(s.pm_mw[i], 21.8 + 1e-9);
            EXPECT_GE(s.pm_mw[i], 3.5 - 1e-9);
            peak = std::max(peak, s.pm_mw[i]);
        }
    }
    EXPECT_NEAR(peak, 21.8, 1e-9);

    // Load falls below both minimum loads; only load relief restores balance.
    const auto down = simulate(setpoints(base(), {5.0, 5.0, 0.0}),
                               {{0.5, EventKind::LoadStep, 0, -3.5}}, 20.0);
    double low = 1e9;
    for (const auto& s : down.samples) low = std::min(low, s.pm_mw[0]);
    EXPECT_NEAR(low, 3.5, 1e-9);
}

TEST(Dynamics, OscillationsDecayAfterNadir)
{
    const auto init = setpoints(base(), {13.5, 13.5, 13.5});
    const auto tr = simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 30.0);
    const double ss = 50.0 + analytic_offset(init, tr, 13.5);
    const auto nadir = std::min_element(tr.samples.begin(), tr.samples.end(),
                                        [](const Sample& a, const Sample& b) { return a.f_hz < b.f_hz; });
    // Peaks of |f - f_ss| after the nadir never grow.
    double last_peak = std::abs(nadir->f_hz - ss);
    for (auto it = nadir + 1; it + 1 != tr.samples.end(); ++it) {
        const double e = std::abs(it->f_hz - ss);
        if (e >= std::abs((it - 1)->f_hz - ss) && e >= std::abs((it + 1)->f_hz - ss)) {
            EXPECT_LE(e, last_peak + 1e-12);
            last_peak = e;
        }
    }
}

TEST(Dynamics, EnergyBalance)
{
    for (bool multi : {false, true}) {
        SimulationOptions opt;
        opt.multi_machine = multi;
        const auto init = setpoints(base(), {13.5, 13.5, 13.5});
        const auto tr = simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 20.0, opt);
        EXPECT_NEAR(tr.energy_imbalance_mj / tr.kinetic_energy_change_mj, 1.0, 0.01);
    }
}

TEST(Dynamics, MultiMachineAgreesOnSteadyState)
{
    const auto init = setpoints(base(), {13.5, 13.5, 13.5});
    SimulationOptions opt;
    opt.multi_machine = true;
    const auto tr = simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 30.0, opt);
    const double ss = analytic_offset(init, tr, 13.5);
    EXPECT_NEAR((tr.samples.back().f_hz - 50.0) / ss, 1.0, 0.01);
}

TEST(Dynamics, LosingLastMachineIsUnstable)
{
    const auto init = setpoints(base(), {5.0, 0.0, 0.0});
    EXPECT_THROW(simulate(init, {{1.0, EventKind::Trip, 0, 0.0}}, 5.0), InstabilityError);
}

TEST(Dynamics, TrajectoryCsv)
{
    const auto init = setpoints(base(), {14.39, 14.39, 14.39});
    SimulationOptions opt;
    opt.record_every = 100;
    const auto tr = simulate(init, {}, 1.0, opt);
    std::ostringstream out;
    write_trajectory_csv(out, tr);
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t_s,f_hz,gt1_mw,gt2_mw,gt3_mw,wind_mw");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
}
