#include "leogo/dispatch.hpp"
#include "leogo/physics.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace leogo;
using namespace leogo::dispatch;

namespace {

const Scenario& scenario(CaseVariation c)
{
    static const Scenario s[] = {build_canonical_scenario(CaseVariation::Base),
                                 build_canonical_scenario(CaseVariation::A),
                                 build_canonical_scenario(CaseVariation::B)};
    return s[static_cast<int>(c)];
}

std::vector<StepInput> constant(double demand, double wind, std::size_t n)
{
    return std::vector<StepInput>(n, StepInput{demand, wind, 5.0});
}

// One-minute profile with a fixed normalised wind and demand multiplier.
TimeSeriesSet flat_profile(double minutes, double wind_norm, double demand = 1.0)
{
    TimeSeriesSet ts;
    ts.grid.step_s = 60.0;
    ts.grid.length = static_cast<std::size_t>(minutes);
    ts.demand_multiplier.assign(ts.grid.length, demand);
    ts.wind_speed.assign(ts.grid.length, 15.0);
    ts.wind_power_norm.assign(ts.grid.length, wind_norm);
    ts.wind_forecast.assign(ts.grid.length, wind_norm);
    ts.wind_nowcast.assign(ts.grid.length, wind_norm);
    return ts;
}

void expect_plan_invariants(const Scenario& s, const DispatchPlan& plan, double step_min)
{
    const std::size_t n = s.gas_turbines.size();
    std::vector<int> starting_steps(n, 0);
    for (std::size_t t = 0; t < plan.steps.size(); ++t) {
        const auto& st = plan.steps[t];
        const double supply = std::accumulate(st.gt_mw.begin(), st.gt_mw.end(), 0.0) +
                              st.wind_used_mw + st.battery_mw;
        EXPECT_NEAR(supply + st.energy_deficit_mw - st.surplus_mw, st.demand_mw, 1e-6)
            << "t=" << st.t_min;
        if (st.feasible) {
            EXPECT_GE(st.reserve_mw, s.reserve_requirement_mw - 1e-6) << "t=" << st.t_min;
        } else {
            EXPECT_TRUE(st.energy_deficit_mw > 0 || st.surplus_mw > 0 || st.reserve_deficit_mw > 0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double p = st.gt_mw[i];
            EXPECT_TRUE(p == 0.0 || p >= s.gas_turbines[i].min_load_mw - 1e-9) << p;
            if (st.status[i] == UnitStatus::Starting) {
                EXPECT_EQ(p, 0.0);
                ++starting_steps[i];
            } else if (st.status[i] == UnitStatus::On && starting_steps[i] > 0) {
                EXPECT_GE(starting_steps[i] * step_min, 30.0 - 1e-9);
                starting_steps[i] = 0;
            } else if (st.status[i] == UnitStatus::Off) {
                EXPECT_EQ(p, 0.0);
            }
        }
        const double co2 = st.fuel_sm3 * s.field.co2_content_kg_per_sm3;
        EXPECT_NEAR(st.co2_kg, co2, 1e-9 * std::max(1.0, co2));
    }
}

} // namespace

TEST(Dispatch, StepDemand)
{
    const auto& s = scenario(CaseVariation::Base);
    EXPECT_NEAR(step_demand(s, 1.0), 43.18, 1e-9);
    EXPECT_NEAR(step_demand(s, 0.8), 0.8 * 38.25 + 4.93, 1e-9);
    EXPECT_NEAR(step_demand(s, 0.8), 35.5, 0.05);
    EXPECT_NEAR(step_demand(s, 0.0), 4.93, 1e-9);
}

TEST(Dispatch, EconomicDispatchThreeOn)
{
    const auto& s = scenario(CaseVariation::Base);
    const bool on[] = {true, true, true};
    const auto ed = economic_dispatch(on, 43.18, 0.0, 5.0, s.gas_turbines);
    ASSERT_TRUE(ed.feasible());
    for (double p : ed.gt_mw) EXPECT_NEAR(p, 14.3933, 1e-4);
    EXPECT_NEAR(ed.reserve_mw, 3 * 21.8 - 43.18, 1e-9);
}

TEST(Dispatch, TwoOnLacksReserve)
{
    const auto& s = scenario(CaseVariation::Base);
    const bool on[] = {true, true, false};
    const auto ed = economic_dispatch(on, 43.18, 0.0, 5.0, s.gas_turbines);
    EXPECT_FALSE(ed.feasible());
    EXPECT_NEAR(ed.reserve_mw, 0.42, 1e-9);
    EXPECT_NEAR(ed.reserve_deficit_mw, 4.58, 1e-9);
    EXPECT_DOUBLE_EQ(ed.energy_deficit_mw, 0.0);
}

TEST(Dispatch, BelowMinimumLoadIsFlaggedNotClipped)
{
    const auto& s = scenario(CaseVariation::Base);
    const bool on[] = {true, false, false};
    const auto ed = economic_dispatch(on, 2.0, 0.0, 5.0, s.gas_turbines);
    EXPECT_DOUBLE_EQ(ed.gt_mw[0], s.gas_turbines[0].min_load_mw);
    EXPECT_NEAR(ed.surplus_mw, 1.5, 1e-12);
    EXPECT_FALSE(ed.feasible());
}

TEST(Dispatch, SurplusGoesToBatteryFirst)
{
    const auto& s = scenario(CaseVariation::B);
    const bool on[] = {true, false, false};
    const auto ed = economic_dispatch_balancing(on, 2.0, 0.0, 0.0, s.gas_turbines,
                                                s.batteries[0], 2.0, 5.0 / 60.0);
    EXPECT_NEAR(ed.battery_mw, -1.5, 1e-12);
    EXPECT_DOUBLE_EQ(ed.surplus_mw, 0.0);

    // With wind the surplus is curtailed once the battery cannot take more.
    const auto full = economic_dispatch_balancing(on, 2.0, 3.0, 0.0, s.gas_turbines,
                                                  s.batteries[0], 4.0, 5.0 / 60.0);
    EXPECT_DOUBLE_EQ(full.battery_mw, 0.0);
    EXPECT_NEAR(full.curtailed_mw, 3.0, 1e-12);
    EXPECT_NEAR(full.surplus_mw, 1.5, 1e-12);
}

TEST(Dispatch, BatteryReserveLimits)
{
    const auto& b = scenario(CaseVariation::B).batteries[0];
    EXPECT_NEAR(battery_reserve(b, 1.0, 4.0, 5.0 / 60.0), 3.0, 1e-12);
    EXPECT_NEAR(battery_reserve(b, 0.0, 0.1, 5.0 / 60.0), 0.1 * b.discharge_efficiency * 12.0,
                1e-12);
}

TEST(Dispatch, ConstantNominalDemandKeepsAllOn)
{
    const auto& s = scenario(CaseVariation::Base);
    DispatchOptions opt;
    const auto plan = plan_horizon(s, CommitmentState::all_on(s), constant(43.18, 0.0, 12), opt);
    ASSERT_EQ(plan.steps.size(), 12u);
    for (const auto& st : plan.steps) {
        EXPECT_EQ(st.units_on(), 3);
        for (double p : st.gt_mw) EXPECT_NEAR(p, 14.39, 0.01);
    }
    EXPECT_EQ(plan.total_starts(), 0);
}

TEST(Dispatch, DemandDropShutsOneTurbine)
{
    const auto& s = scenario(CaseVariation::Base);
    auto f = constant(43.18, 0.0, 12);
    for (std::size_t t = 3; t < f.size(); ++t) f[t].demand_mw = step_demand(s, 0.8);
    const auto plan = plan_horizon(s, CommitmentState::all_on(s), f, DispatchOptions{});
    EXPECT_EQ(plan.steps.front().units_on(), 3);
    EXPECT_EQ(plan.steps.back().units_on(), 2);
    EXPECT_EQ(plan.infeasible_steps(), 0);
    expect_plan_invariants(s, plan, 5.0);
}

TEST(Dispatch, StartIsScheduledAheadOfNeed)
{
    const auto& s = scenario(CaseVariation::Base);
    CommitmentState two = CommitmentState::all_on(s);
    two.units[2].status = UnitStatus::Off;
    auto f = constant(step_demand(s, 0.8), 0.0, 16);
    const std::size_t need = 10;
    for (std::size_t t = need; t < f.size(); ++t) f[t].demand_mw = 43.18;
    const auto plan = plan_horizon(s, two, f, DispatchOptions{});
    EXPECT_EQ(plan.infeasible_steps(), 0);
    EXPECT_EQ(plan.steps[need].units_on(), 3);
    std::size_t first_start = plan.steps.size();
    for (std::size_t t = 0; t < plan.steps.size(); ++t) {
        if (plan.steps[t].status[2] == UnitStatus::Starting) {
            first_start = std::min(first_start, t);
        }
    }
    ASSERT_LT(first_start, need);
    EXPECT_GE(need - first_start, 6u);
    expect_plan_invariants(s, plan, 5.0);
}

TEST(Dispatch, EmptyHorizon)
{
    const auto& s = scenario(CaseVariation::Base);
    const auto plan = plan_horizon(s, CommitmentState::all_on(s), {}, DispatchOptions{});
    EXPECT_TRUE(plan.steps.empty());
    EXPECT_DOUBLE_EQ(plan.objective, 0.0);
}

TEST(Dispatch, ZeroLengthRollingRun)
{
    const auto& s = scenario(CaseVariation::Base);
    RollingOptions opt;
    opt.duration_min = 0.0;
    const auto plan = rolling_simulate(s, flat_profile(200, 0.0), opt);
    EXPECT_TRUE(plan.steps.empty());
    std::ostringstream out;
    write_plan_csv(out, plan);
    EXPECT_EQ(out.str(),
              "t_min,gt1_mw,gt2_mw,gt3_mw,wind_mw,curtail_mw,batt_mw,soc_mwh,demand_mw,"
              "reserve_mw,fuel_sm3,co2_kg,feasible\n");
}

TEST(Dispatch, FullWindNeedsExactlyTwoTurbines)
{
    const auto& s = scenario(CaseVariation::A);
    RollingOptions opt;
    opt.duration_min = 120.0;
    const auto plan = rolling_simulate(s, flat_profile(240, 1.0), opt);
    ASSERT_FALSE(plan.steps.empty());
    for (const auto& st : plan.steps) EXPECT_LE(st.units_on(), 2);
    EXPECT_EQ(plan.steps.back().units_on(), 2);
    EXPECT_EQ(plan.infeasible_steps(), 0);
    expect_plan_invariants(s, plan, 5.0);
}

TEST(Dispatch, RollingRunsKeepInvariants)
{
    for (auto c : {CaseVariation::Base, CaseVariation::A, CaseVariation::B}) {
        const auto& s = scenario(c);
        RollingOptions opt;
        opt.duration_min = 300.0;
        opt.dip = DemandDip{0.2, 100.0, 200.0};
        const auto plan = rolling_simulate(s, profiles::canonical_profiles(s, 500.0), opt);
        EXPECT_EQ(plan.steps.size(), 60u);
        expect_plan_invariants(s, plan, 5.0);
        double co2 = 0.0;
        for (const auto& st : plan.steps) co2 += st.fuel_sm3 * s.field.co2_content_kg_per_sm3;
        EXPECT_NEAR(plan.total_co2_kg(), co2, 1e-9 * co2);
    }
}

TEST(Dispatch, CommitmentTrajectory)
{
    DispatchPlan plan;
    for (int n : {3, 3, 2, 2, 3}) {
        DispatchStep st;
        st.status.assign(3, UnitStatus::Off);
        for (int i = 0; i < n; ++i) st.status[static_cast<std::size_t>(i)] = UnitStatus::On;
        plan.steps.push_back(st);
    }
    EXPECT_EQ(commitment_trajectory(plan), (std::vector<int>{3, 2, 3}));
}
