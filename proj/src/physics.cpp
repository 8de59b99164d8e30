#include "leogo/physics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace leogo::physics {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStandardTemperatureK = 288.15;
constexpr double kStandardPressurePa = 101325.0;
constexpr double kTolerance = 1e-9;

} // namespace

double pump_power(double q_sm3ps, double p1_pa, double p2_pa, double efficiency)
{
    if (!(efficiency > 0.0)) throw std::domain_error("pump_power: efficiency must be > 0");
    if (p2_pa < p1_pa) throw std::domain_error("pump_power: outlet pressure below inlet");
    if (q_sm3ps < 0.0) throw std::domain_error("pump_power: negative flow");
    return q_sm3ps * (p2_pa - p1_pa) / efficiency * 1e-6;
}

namespace {

double compressor_prefactor(double inlet_temperature_k, const FluidProperties& fluid,
                            double efficiency)
{
    return fluid.gas_density_kg_per_sm3 * fluid.gas_compressibility *
           fluid.gas_individual_constant_j_per_kg_k * inlet_temperature_k /
           (fluid.gas_heat_capacity_ratio - 1.0) / efficiency;
}

void check_compressor_domain(double q, double p1, double p2, double efficiency)
{
    if (!(p1 > 0.0)) throw std::domain_error("compressor_power: inlet pressure must be > 0");
    if (p2 < p1) throw std::domain_error("compressor_power: outlet pressure below inlet");
    if (!(efficiency > 0.0)) throw std::domain_error("compressor_power: efficiency must be > 0");
    if (q < 0.0) throw std::domain_error("compressor_power: negative flow");
}

} // namespace

double compressor_power(double q_sm3ps, double p1_pa, double p2_pa, double inlet_temperature_k,
                        const FluidProperties& fluid, double efficiency)
{
    check_compressor_domain(q_sm3ps, p1_pa, p2_pa, efficiency);
    const double a = fluid.adiabatic_exponent();
    const double ratio_term = std::pow(p2_pa / p1_pa, a) - 1.0;
    return compressor_prefactor(inlet_temperature_k, fluid, efficiency) * q_sm3ps * ratio_term *
           1e-6;
}

double compressor_power_dp2(double q_sm3ps, double p1_pa, double p2_pa,
                            double inlet_temperature_k, const FluidProperties& fluid,
                            double efficiency)
{
    check_compressor_domain(q_sm3ps, p1_pa, p2_pa, efficiency);
    const double a = fluid.adiabatic_exponent();
    const double d_ratio = a * std::pow(p2_pa / p1_pa, a - 1.0) / p1_pa;
    return compressor_prefactor(inlet_temperature_k, fluid, efficiency) * q_sm3ps * d_ratio *
           1e-6;
}

double pump_power(const PumpSpec& pump, double flow_multiplier)
{
    return pump_power(pump.nominal_flow_sm3ps * flow_multiplier, pump.inlet_pa, pump.outlet_pa,
                      pump.efficiency);
}

double compressor_power(const CompressorSpec& comp, const FluidProperties& fluid,
                        double flow_multiplier)
{
    return compressor_power(comp.nominal_flow_sm3ps * flow_multiplier, comp.inlet_pa,
                            comp.outlet_pa, comp.inlet_temperature_k, fluid, comp.efficiency);
}

double gt_fuel(double p_el_mw, const GasTurbineSpec& spec)
{
    if (p_el_mw == 0.0) return 0.0;
    if (p_el_mw < spec.min_load_mw - kTolerance || p_el_mw > spec.capacity_mw + kTolerance) {
        throw std::range_error(fmt::format("gt_fuel: {} output {:.6f} MW outside off or [{}, {}]",
                                           spec.tag, p_el_mw, spec.min_load_mw,
                                           spec.capacity_mw));
    }
    return spec.fuel_intercept_mw + spec.fuel_slope * p_el_mw;
}

double gt_efficiency(double p_el_mw, const GasTurbineSpec& spec)
{
    const double fuel = gt_fuel(p_el_mw, spec);
    return fuel > 0.0 ? p_el_mw / fuel : 0.0;
}

double gt_heat(double p_el_mw, const GasTurbineSpec& spec)
{
    return spec.heat_recovery_fraction * (gt_fuel(p_el_mw, spec) - p_el_mw);
}

double gt_co2_rate(double p_el_mw, const GasTurbineSpec& spec, const FieldState& field,
                   const FluidProperties& fluid)
{
    // MW = MJ/s, divided by MJ/Sm3 gives Sm3/s of fuel gas.
    return field.co2_content_kg_per_sm3 * gt_fuel(p_el_mw, spec) /
           fluid.gas_energy_value_mj_per_sm3;
}

double fuel_volume_sm3(double fuel_mw, double hours, const FluidProperties& fluid)
{
    return fuel_mw * hours * 3600.0 / fluid.gas_energy_value_mj_per_sm3;
}

double weymouth_constant()
{
    // Field-unit Weymouth coefficient 3.7435e-3 (Q in m3/day, p in kPa,
    // L in km, D in mm) rescaled to Sm3/s, Pa, m. The kPa scaling cancels
    // between T_b/p_b and the pressure term.
    const double per_second = 1.0 / 86400.0;
    const double km_per_m = 1e-3;
    const double mm_per_m = 1e3;
    return 3.7435e-3 * per_second / std::sqrt(km_per_m) * std::pow(mm_per_m, 8.0 / 3.0);
}

namespace {

void check_pipe(double diameter_m, double length_m)
{
    if (!(diameter_m > 0.0) || !(length_m > 0.0)) {
        throw std::domain_error("pipeline geometry must be positive");
    }
}

double weymouth_coefficient(double diameter_m, double length_m, const FluidProperties& fluid,
                            double temperature_k)
{
    return weymouth_constant() * (kStandardTemperatureK / kStandardPressurePa) *
           std::pow(diameter_m, 8.0 / 3.0) /
           std::sqrt(fluid.gas_gravity * temperature_k * length_m * fluid.gas_compressibility);
}

} // namespace

double weymouth_flow(double p1_pa, double p2_pa, double diameter_m, double length_m,
                     const FluidProperties& fluid, double temperature_k)
{
    check_pipe(diameter_m, length_m);
    if (p2_pa > p1_pa) throw std::domain_error("weymouth_flow: outlet pressure above inlet");
    if (!(p2_pa > 0.0)) throw std::domain_error("weymouth_flow: outlet pressure must be > 0");
    return weymouth_coefficient(diameter_m, length_m, fluid, temperature_k) *
           std::sqrt(p1_pa * p1_pa - p2_pa * p2_pa);
}

double weymouth_outlet_pressure(double p1_pa, double q_sm3ps, double diameter_m,
                                double length_m, const FluidProperties& fluid,
                                double temperature_k)
{
    check_pipe(diameter_m, length_m);
    if (q_sm3ps < 0.0) throw std::domain_error("weymouth_outlet_pressure: negative flow");
    const double drop = q_sm3ps / weymouth_coefficient(diameter_m, length_m, fluid, temperature_k);
    const double p2_sq = p1_pa * p1_pa - drop * drop;
    if (!(p2_sq > 0.0)) {
        throw std::domain_error("weymouth_outlet_pressure: flow exceeds pipeline capacity");
    }
    return std::sqrt(p2_sq);
}

double darcy_pressure_drop(double q_m3ps, double diameter_m, double length_m,
                           double density_kg_per_m3, double friction)
{
    check_pipe(diameter_m, length_m);
    const double area = kPi * diameter_m * diameter_m / 4.0;
    const double v = q_m3ps / area;
    return friction * (length_m / diameter_m) * density_kg_per_m3 * v * v / 2.0;
}

double wind_power(double wind_speed_mps, const WindTurbineSpec& spec)
{
    if (wind_speed_mps < 0.0) throw std::domain_error("wind_power: negative wind speed");
    const auto& curve = spec.power_curve;
    if (curve.empty() || wind_speed_mps >= spec.cut_out_mps) return 0.0;
    if (wind_speed_mps <= curve.front().wind_speed_mps) return 0.0;
    if (wind_speed_mps >= curve.back().wind_speed_mps) {
        return std::clamp(curve.back().power_mw, 0.0, spec.capacity_mw);
    }
    auto hi = std::upper_bound(curve.begin(), curve.end(), wind_speed_mps,
                               [](double v, const PowerCurvePoint& p) { return v < p.wind_speed_mps; });
    auto lo = hi - 1;
    const double w = (wind_speed_mps - lo->wind_speed_mps) / (hi->wind_speed_mps - lo->wind_speed_mps);
    return std::clamp(lo->power_mw + w * (hi->power_mw - lo->power_mw), 0.0, spec.capacity_mw);
}

double battery_step(double soc_mwh, double power_mw, double hours, const BatterySpec& spec)
{
    if (std::abs(power_mw) > spec.power_capacity_mw + kTolerance) {
        throw CapacityError(fmt::format("battery {}: |{:.6f}| MW exceeds power capacity {} MW",
                                        spec.tag, power_mw, spec.power_capacity_mw));
    }
    double next = soc_mwh;
    if (power_mw < 0.0) {
        next += spec.charge_efficiency * (-power_mw) * hours;
    } else if (power_mw > 0.0) {
        next -= power_mw * hours / spec.discharge_efficiency;
    }
    if (next < -kTolerance || next > spec.energy_capacity_mwh + kTolerance) {
        throw CapacityError(fmt::format("battery {}: state of charge {:.6f} MWh outside [0, {}]",
                                        spec.tag, next, spec.energy_capacity_mwh));
    }
    return std::clamp(next, 0.0, spec.energy_capacity_mwh);
}

} // namespace leogo::physics
