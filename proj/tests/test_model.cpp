#include "leogo/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace leogo;

TEST(Model, BaseHasThreeTurbinesAndNoWind)
{
    const auto s = build_canonical_scenario(CaseVariation::Base);
    ASSERT_EQ(s.gas_turbines.size(), 3u);
    for (const auto& gt : s.gas_turbines) EXPECT_DOUBLE_EQ(gt.capacity_mw, 21.8);
    EXPECT_TRUE(s.wind_turbines.empty());
    EXPECT_TRUE(s.batteries.empty());
    EXPECT_DOUBLE_EQ(s.reserve_requirement_mw, 5.0);
}

TEST(Model, VariationAAddsThreeWindTurbines)
{
    const auto s = build_canonical_scenario(CaseVariation::A);
    ASSERT_EQ(s.wind_turbines.size(), 3u);
    for (const auto& wt : s.wind_turbines) EXPECT_DOUBLE_EQ(wt.capacity_mw, 8.0);
    EXPECT_TRUE(s.batteries.empty());
    EXPECT_DOUBLE_EQ(s.wind_capacity_mw(), 24.0);
}

TEST(Model, VariationBAddsBattery)
{
    const auto s = build_canonical_scenario(CaseVariation::B);
    EXPECT_EQ(s.wind_turbines.size(), 3u);
    ASSERT_EQ(s.batteries.size(), 1u);
    EXPECT_DOUBLE_EQ(s.batteries[0].power_capacity_mw, 4.0);
    EXPECT_DOUBLE_EQ(s.batteries[0].energy_capacity_mwh, 4.0);
    EXPECT_NEAR(s.batteries[0].charge_efficiency * s.batteries[0].discharge_efficiency, 0.9,
                1e-15);
}

TEST(Model, CanonicalScenariosValidate)
{
    for (auto c : {CaseVariation::Base, CaseVariation::A, CaseVariation::B}) {
        EXPECT_TRUE(validate(build_canonical_scenario(c)).empty()) << to_string(c);
    }
}

TEST(Model, WaterCutOutOfRangeNamed)
{
    auto s = build_canonical_scenario(CaseVariation::Base);
    s.field.water_cut = 1.3;
    const auto v = validate(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].field.find("water_cut"), std::string::npos);
}

TEST(Model, MinLoadAboveCapacityNamed)
{
    auto s = build_canonical_scenario(CaseVariation::Base);
    s.gas_turbines[0].min_load_mw = 25.0;
    const auto v = validate(s);
    ASSERT_FALSE(v.empty());
    bool named = false;
    for (const auto& x : v) named |= x.message == "min_load < capacity";
    EXPECT_TRUE(named);
}

TEST(Model, NominalDemand)
{
    const auto s = build_canonical_scenario(CaseVariation::Base);
    EXPECT_NEAR(total_nominal_demand(s, DemandTerms::LoadsOnly), 42.25, 1e-9);
    EXPECT_NEAR(total_nominal_demand(s), 43.18, 1e-9);

    auto off = s;
    for (auto& l : off.loads) l.nominal_mw = 0.0;
    EXPECT_DOUBLE_EQ(total_nominal_demand(off), 0.0);
}

TEST(Model, SidesFollowTagParity)
{
    const auto s = build_canonical_scenario(CaseVariation::Base);
    EXPECT_EQ(s.gas_turbines[0].side, BusSide::A);
    EXPECT_EQ(s.gas_turbines[1].side, BusSide::B);
    EXPECT_EQ(s.gas_turbines[2].side, BusSide::A);
    EXPECT_EQ(s.find_load("GEX2")->side, BusSide::B);
}

TEST(Model, FuelCurveFit)
{
    GasTurbineSpec gt;
    fit_fuel_curve(gt);
    EXPECT_NEAR(gt.fuel_intercept_mw, 11.543948, 1e-6);
    EXPECT_NEAR(gt.fuel_slope, 2.352305, 1e-6);
}

TEST(Model, CaseNames)
{
    EXPECT_EQ(parse_case("base"), CaseVariation::Base);
    EXPECT_EQ(parse_case("B"), CaseVariation::B);
    EXPECT_FALSE(parse_case("C").has_value());
}

TEST(Model, OilRateNoteIsNotAViolation)
{
    const auto s = build_canonical_scenario(CaseVariation::Base);
    EXPECT_FALSE(consistency_notes(s).empty());
}

TEST(Model, FuelCurvePassesThroughEfficiencyPoints)
{
    const auto& gt = build_canonical_scenario(CaseVariation::Base).gas_turbines[0];
    const double full = gt.capacity_mw / gt.eff_full_load;
    const double part = 0.2 * gt.capacity_mw / gt.eff_at_20pct;
    EXPECT_NEAR((gt.fuel_intercept_mw + gt.fuel_slope * gt.capacity_mw) / full, 1.0, 1e-9);
    EXPECT_NEAR((gt.fuel_intercept_mw + gt.fuel_slope * 0.2 * gt.capacity_mw) / part, 1.0, 1e-9);
}

TEST(Model, LoadTableValues)
{
    const auto s = build_canonical_scenario(CaseVariation::Base);
    const struct {
        const char* tag;
        double capacity;
        double loading;
    } rows[] = {{"SWL1", 0.75, 0.45}, {"ACO2", 1.3, 0.5}, {"GEX3", 8.2, 8.07}, {"OEX1", 1.5, 0.39},
                {"WIN2", 4.8, 3.0},   {"REC1", 1.5, 1.27}, {"ASM1", 0.25, 0.2}, {"LOD1", 2.75, 1.05},
                {"LOD4", 0.5, 0.25},  {"DRL6", 0.8, 0.0}};
    for (const auto& r : rows) {
        const auto* l = s.find_load(r.tag);
        ASSERT_NE(l, nullptr) << r.tag;
        EXPECT_EQ(l->capacity_mw, r.capacity) << r.tag;
        EXPECT_EQ(l->nominal_mw, r.loading) << r.tag;
    }
}

TEST(Model, VariationsOnlyAddDevices)
{
    const auto b = build_canonical_scenario(CaseVariation::Base);
    const auto a = build_canonical_scenario(CaseVariation::A);
    const auto c = build_canonical_scenario(CaseVariation::B);
    const auto tags = [](const Scenario& s) {
        std::vector<std::string> t;
        for (const auto& g : s.gas_turbines) t.push_back(g.tag);
        for (const auto& w : s.wind_turbines) t.push_back(w.tag);
        for (const auto& x : s.batteries) t.push_back(x.tag);
        for (const auto& l : s.loads) t.push_back(l.tag);
        std::sort(t.begin(), t.end());
        return t;
    };
    const auto tb = tags(b);
    const auto ta = tags(a);
    const auto tc = tags(c);
    EXPECT_TRUE(std::includes(ta.begin(), ta.end(), tb.begin(), tb.end()));
    EXPECT_TRUE(std::includes(tc.begin(), tc.end(), ta.begin(), ta.end()));
    EXPECT_LT(tb.size(), ta.size());
    EXPECT_LT(ta.size(), tc.size());
}
