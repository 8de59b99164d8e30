#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leogo {

enum class CaseVariation { Base, A, B };

std::string_view to_string(CaseVariation c);
std::optional<CaseVariation> parse_case(std::string_view s);

/// Half of a split busbar system.
enum class BusSide { A, B };

std::string_view to_string(BusSide s);

struct FluidProperties {
    double gas_compressibility = 0.9;
    double gas_energy_value_mj_per_sm3 = 40.0;
    double gas_heat_capacity_ratio = 1.27;
    double gas_individual_constant_j_per_kg_k = 500.0;
    double gas_gravity = 0.6;
    double gas_density_kg_per_sm3 = 0.84;
    double oil_density_kg_per_m3 = 900.0;
    double oil_viscosity_kg_per_m_s = 0.0026;
    double oil_darcy_friction = 0.02;
    double water_density_kg_per_m3 = 1000.0;
    double water_darcy_friction = 0.01;

    /// Isentropic exponent (k - 1) / k.
    double adiabatic_exponent() const
    {
        return (gas_heat_capacity_ratio - 1.0) / gas_heat_capacity_ratio;
    }
};

struct FieldState {
    double oil_rate_sm3_per_day = 8600.0;
    double gas_rate_sm3_per_day = 4.3e6;
    double water_rate_sm3_per_day = 13000.0;
    double separator_inlet_pressure_mpa = 2.0;
    double gas_export_pressure_mpa = 20.0;
    double oil_export_pressure_mpa = 3.0;
    double gas_oil_ratio = 500.0;
    double water_cut = 0.6;
    double co2_content_kg_per_sm3 = 2.34;
    int separation_stages = 3;
};

struct GasTurbineSpec {
    std::string tag;
    BusSide side = BusSide::A;
    double capacity_mw = 21.8;
    double rated_mva = 28.0;
    double min_load_mw = 3.5;
    double ramp_rate_per_min = 1.0; // fraction of capacity
    double startup_prep_min = 15.0;
    double startup_sync_min = 15.0;
    double eff_full_load = 0.347;
    double eff_at_20pct = 0.20;
    // Linear fuel curve: fuel = intercept + slope * P_el (all MW).
    double fuel_intercept_mw = 0.0;
    double fuel_slope = 0.0;
    double heat_recovery_fraction = 0.4903;
    double inertia_h_s = 2.5; // on rated_mva
    double droop = 0.04;      // per-unit on rated_mva
    double governor_time_constant_s = 0.5;

    double startup_total_min() const { return startup_prep_min + startup_sync_min; }
};

/// Solves the fuel-curve intercept and slope through the two efficiency
/// endpoints (full load and 20 % load) and stores them in gt.
void fit_fuel_curve(GasTurbineSpec& gt);

struct PowerCurvePoint {
    double wind_speed_mps;
    double power_mw;
};

struct WindTurbineSpec {
    std::string tag;
    BusSide side = BusSide::A;
    double capacity_mw = 8.0;
    double cut_in_mps = 4.0;
    double rated_speed_mps = 12.5;
    double cut_out_mps = 25.0;
    std::vector<PowerCurvePoint> power_curve;
    double rated_power_factor = 0.9;
    double generator_kv = 0.69;
};

/// Node table of the generic 8 MW direct-drive curve used by the canonical
/// scenario (cut-in 4 m/s, rated 12.5 m/s, cut-out 25 m/s).
std::vector<PowerCurvePoint> canonical_power_curve();

struct BatterySpec {
    std::string tag;
    BusSide side = BusSide::A;
    double power_capacity_mw = 4.0;
    double energy_capacity_mwh = 4.0;
    double round_trip_efficiency = 0.9;
    double charge_efficiency = 0.0;
    double discharge_efficiency = 0.0;
};

/// Splits the round-trip efficiency evenly (square root) between directions.
BatterySpec make_battery(std::string tag, double power_mw, double energy_mwh,
                         double round_trip);

struct ZipComposition {
    double motor = 0.0;
    double constant_power = 1.0;
    double constant_current = 0.0;
    double constant_impedance = 0.0;

    double sum() const
    {
        return motor + constant_power + constant_current + constant_impedance;
    }
};

enum class LoadKind {
    InductionMotor, ///< directly connected, constant PQ at rated power factor
    Vsd,            ///< converter-fed drive, ideal DC load behind the front end
    General,        ///< aggregated LV load with a ZIP composition
    DrillingDc,     ///< common DC drilling bus fed by rectifiers
};

std::string_view to_string(LoadKind k);

struct LoadSpec {
    std::string tag;
    std::string description;
    LoadKind kind = LoadKind::General;
    double capacity_mw = 0.0;
    double nominal_mw = 0.0;
    bool flow_dependent = false;
    double power_factor = 1.0;
    ZipComposition zip;
    BusSide side = BusSide::A;
    double voltage_kv = 11.0;
    double frequency_damping = 1.0; ///< % load change per % frequency change
};

struct PumpSpec {
    std::string tag;
    double efficiency = 0.75;
    double inlet_pa = 0.0;
    double outlet_pa = 0.0;
    double nominal_flow_sm3ps = 0.0;
};

struct CompressorSpec {
    std::string tag;
    double efficiency = 0.75;
    double inlet_pa = 0.0;
    double outlet_pa = 0.0;
    double nominal_flow_sm3ps = 0.0;
    double inlet_temperature_k = 300.0;
};

struct HeatDemand {
    double separation_mw = 5.0;
    double utility_mw = 3.0;
    double total() const { return separation_mw + utility_mw; }
};

/// Electrical-model parameters that the grid builder needs but the platform
/// description does not publish.
struct NetworkSettings {
    double base_mva = 100.0;
    double frequency_hz = 50.0;
    double platform_cable_m = 150.0;
    double gt_cable_m = 400.0;
    double wind_cable_m = 2500.0;
    int gt_parallel_cables = 4;
    double converter_efficiency = 0.98;
    bool tie_breaker_11kv_closed = true;
    // Transformers whose data is not in the platform description.
    double wt_transformer_mva = 9.0;
    double wt_transformer_uk = 0.08;
    double wt_transformer_losses = 0.008;
    double collector_transformer_mva = 30.0;
    double collector_transformer_uk = 0.10;
    double collector_transformer_losses = 0.005;
};

/// Parameters of the synthetic demand and wind channels.
struct ProfileSettings {
    std::uint64_t seed = 20200301;
    double demand_amplitude = 0.04;
    double demand_period_min = 25.0;
    double forecast_block_min = 30.0;
    double forecast_noise_sigma_mps = 3.3333; // calibrated to 3.3 m/s RMSE over one week
    double nowcast_ratio = 0.3;
};

struct Scenario {
    std::string name;
    CaseVariation case_variation = CaseVariation::Base;
    FluidProperties fluid;
    FieldState field;
    std::vector<GasTurbineSpec> gas_turbines;
    std::vector<WindTurbineSpec> wind_turbines;
    std::vector<BatterySpec> batteries;
    std::vector<LoadSpec> loads;
    std::vector<PumpSpec> pumps;
    std::vector<CompressorSpec> compressors;
    double reserve_requirement_mw = 5.0;
    HeatDemand heat;
    double consumption_deviation_mw = 0.12;
    double loss_allowance_mw = 0.81;
    NetworkSettings network;
    ProfileSettings profiles;

    const LoadSpec* find_load(std::string_view tag) const;
    LoadSpec* find_load(std::string_view tag);
    const GasTurbineSpec* find_gas_turbine(std::string_view tag) const;
    const PumpSpec* find_pump(std::string_view tag) const;
    const CompressorSpec* find_compressor(std::string_view tag) const;

    double wind_capacity_mw() const;
};

Scenario build_canonical_scenario(CaseVariation c);

struct Violation {
    std::string field;
    std::string message;
};

/// Checks every type invariant. An empty result means the scenario is valid.
std::vector<Violation> validate(const Scenario& s);

/// Known inconsistencies in the published data that do not invalidate a
/// scenario (e.g. oil rate of the field table versus the export pump flow).
std::vector<Violation> consistency_notes(const Scenario& s);

enum class DemandTerms { LoadsOnly, WithDeviationAndLosses };

double total_nominal_demand(const Scenario& s,
                            DemandTerms terms = DemandTerms::WithDeviationAndLosses);

} // namespace leogo
