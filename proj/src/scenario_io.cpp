#include "leogo/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <utility>
#include <vector>

namespace leogo {

NLOHMANN_JSON_SERIALIZE_ENUM(CaseVariation, {{CaseVariation::Base, "base"},
                                             {CaseVariation::A, "A"},
                                             {CaseVariation::B, "B"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BusSide, {{BusSide::A, "A"}, {BusSide::B, "B"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LoadKind, {{LoadKind::InductionMotor, "induction_motor"},
                                        {LoadKind::Vsd, "vsd"},
                                        {LoadKind::General, "general"},
                                        {LoadKind::DrillingDc, "drilling_dc"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    FluidProperties, gas_compressibility, gas_energy_value_mj_per_sm3, gas_heat_capacity_ratio,
    gas_individual_constant_j_per_kg_k, gas_gravity, gas_density_kg_per_sm3,
    oil_density_kg_per_m3, oil_viscosity_kg_per_m_s, oil_darcy_friction,
    water_density_kg_per_m3, water_darcy_friction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    FieldState, oil_rate_sm3_per_day, gas_rate_sm3_per_day, water_rate_sm3_per_day,
    separator_inlet_pressure_mpa, gas_export_pressure_mpa, oil_export_pressure_mpa,
    gas_oil_ratio, water_cut, co2_content_kg_per_sm3, separation_stages)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    GasTurbineSpec, tag, side, capacity_mw, rated_mva, min_load_mw, ramp_rate_per_min,
    startup_prep_min, startup_sync_min, eff_full_load, eff_at_20pct, fuel_intercept_mw,
    fuel_slope, heat_recovery_fraction, inertia_h_s, droop, governor_time_constant_s)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PowerCurvePoint, wind_speed_mps, power_mw)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(WindTurbineSpec, tag, side, capacity_mw,
                                                cut_in_mps, rated_speed_mps, cut_out_mps,
                                                power_curve, rated_power_factor, generator_kv)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BatterySpec, tag, side, power_capacity_mw,
                                                energy_capacity_mwh, round_trip_efficiency,
                                                charge_efficiency, discharge_efficiency)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ZipComposition, motor, constant_power,
                                                constant_current, constant_impedance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LoadSpec, tag, description, kind, capacity_mw,
                                                nominal_mw, flow_dependent, power_factor, zip,
                                                side, voltage_kv, frequency_damping)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PumpSpec, tag, efficiency, inlet_pa, outlet_pa,
                                                nominal_flow_sm3ps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CompressorSpec, tag, efficiency, inlet_pa,
                                                outlet_pa, nominal_flow_sm3ps,
                                                inlet_temperature_k)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HeatDemand, separation_mw, utility_mw)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    NetworkSettings, base_mva, frequency_hz, platform_cable_m, gt_cable_m, wind_cable_m,
    gt_parallel_cables, converter_efficiency, tie_breaker_11kv_closed, wt_transformer_mva,
    wt_transformer_uk, wt_transformer_losses, collector_transformer_mva,
    collector_transformer_uk, collector_transformer_losses)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ProfileSettings, seed, demand_amplitude,
                                                demand_period_min, forecast_block_min,
                                                forecast_noise_sigma_mps, nowcast_ratio)

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T& field)
{
    if (auto it = j.find(key); it != j.end()) it->get_to(field);
}

// The enum macros map unknown strings to the first value; refuse them instead.
void check_enums(const json& j, const std::string& path)
{
    static const std::pair<const char*, std::vector<std::string>> enums[] = {
        {"case", {"base", "A", "B"}},
        {"side", {"A", "B"}},
        {"kind", {"induction_motor", "vsd", "general", "drilling_dc"}}};
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_enums(j[i], path + "[" + std::to_string(i) + "]");
        return;
    }
    if (!j.is_object()) return;
    for (const auto& item : j.items()) {
        for (const auto& [key, allowed] : enums) {
            if (item.key() != key) continue;
            if (!item.value().is_string() ||
                std::find(allowed.begin(), allowed.end(), item.value().get<std::string>()) ==
                    allowed.end()) {
                throw ScenarioFormatError("invalid value of " + path + item.key());
            }
        }
        check_enums(item.value(), path + item.key() + ".");
    }
}

} // namespace

std::string scenario_to_json(const Scenario& s, int indent)
{
    json j;
    j["name"] = s.name;
    j["case"] = s.case_variation;
    j["fluid"] = s.fluid;
    j["field"] = s.field;
    j["gas_turbines"] = s.gas_turbines;
    j["wind_turbines"] = s.wind_turbines;
    j["batteries"] = s.batteries;
    j["loads"] = s.loads;
    j["pumps"] = s.pumps;
    j["compressors"] = s.compressors;
    j["reserve_requirement_mw"] = s.reserve_requirement_mw;
    j["heat"] = s.heat;
    j["consumption_deviation_mw"] = s.consumption_deviation_mw;
    j["loss_allowance_mw"] = s.loss_allowance_mw;
    j["network"] = s.network;
    j["profiles"] = s.profiles;
    return j.dump(indent);
}

Scenario scenario_from_json(const std::string& text)
{
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ScenarioFormatError("scenario document must be a JSON object");
        check_enums(j, "");
        CaseVariation c = CaseVariation::Base;
        read_if(j, "case", c);
        Scenario s = build_canonical_scenario(c);
        static const char* known[] = {"name", "case", "fluid", "field", "gas_turbines",
                                      "wind_turbines", "batteries", "loads", "pumps",
                                      "compressors", "reserve_requirement_mw", "heat",
                                      "consumption_deviation_mw", "loss_allowance_mw",
                                      "network", "profiles"};
        for (const auto& item : j.items()) {
            if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
                throw ScenarioFormatError("unknown key '" + item.key() + "'");
            }
        }
        read_if(j, "name", s.name);
        read_if(j, "fluid", s.fluid);
        read_if(j, "field", s.field);
        if (j.contains("gas_turbines")) {
            s.gas_turbines.clear();
            for (const auto& g : j.at("gas_turbines")) {
                GasTurbineSpec gt = g.get<GasTurbineSpec>();
                if (!g.contains("fuel_intercept_mw") && !g.contains("fuel_slope")) fit_fuel_curve(gt);
                s.gas_turbines.push_back(gt);
            }
        }
        read_if(j, "wind_turbines", s.wind_turbines);
        if (j.contains("batteries")) {
            s.batteries.clear();
            for (const auto& b : j.at("batteries")) {
                BatterySpec spec = b.get<BatterySpec>();
                if (!b.contains("charge_efficiency") && !b.contains("discharge_efficiency")) {
                    spec = make_battery(spec.tag, spec.power_capacity_mw, spec.energy_capacity_mwh,
                                        spec.round_trip_efficiency);
                    spec.side = b.value("side", BusSide::A);
                }
                s.batteries.push_back(spec);
            }
        }
        read_if(j, "loads", s.loads);
        read_if(j, "pumps", s.pumps);
        read_if(j, "compressors", s.compressors);
        read_if(j, "reserve_requirement_mw", s.reserve_requirement_mw);
        read_if(j, "heat", s.heat);
        read_if(j, "consumption_deviation_mw", s.consumption_deviation_mw);
        read_if(j, "loss_allowance_mw", s.loss_allowance_mw);
        read_if(j, "network", s.network);
        read_if(j, "profiles", s.profiles);
        return s;
    } catch (const json::exception& e) {
        throw ScenarioFormatError(e.what());
    }
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioFormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

} // namespace leogo
