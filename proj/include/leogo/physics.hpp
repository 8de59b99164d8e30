#pragma once

#include "leogo/model.hpp"

#include <stdexcept>

// Closed-form device physics. Pressures are in Pa, flows in Sm3/s unless
// noted, powers in MW.
namespace leogo::physics {

/// Thrown when a battery step would leave the state-of-charge bounds.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hydraulic pump power q * (p2 - p1) / eta.
double pump_power(double q_sm3ps, double p1_pa, double p2_pa, double efficiency);

/// Adiabatic ideal-gas compressor power
///   (1/eta) * rho Z R T / (k - 1) * q * ((p2/p1)^a - 1),  a = (k - 1)/k.
double compressor_power(double q_sm3ps, double p1_pa, double p2_pa, double inlet_temperature_k,
                        const FluidProperties& fluid, double efficiency);

/// Analytic d(compressor_power)/d(p2) in MW/Pa.
double compressor_power_dp2(double q_sm3ps, double p1_pa, double p2_pa,
                            double inlet_temperature_k, const FluidProperties& fluid,
                            double efficiency);

double pump_power(const PumpSpec& pump, double flow_multiplier = 1.0);
double compressor_power(const CompressorSpec& comp, const FluidProperties& fluid,
                        double flow_multiplier = 1.0);

/// Fuel power (MW) of a gas turbine producing p_el_mw; zero when off.
/// Throws std::range_error for 0 < P < min_load or P > capacity.
double gt_fuel(double p_el_mw, const GasTurbineSpec& spec);
double gt_efficiency(double p_el_mw, const GasTurbineSpec& spec);
/// Recovered heat kappa * (fuel - P_el).
double gt_heat(double p_el_mw, const GasTurbineSpec& spec);
/// CO2 emission rate in kg/s.
double gt_co2_rate(double p_el_mw, const GasTurbineSpec& spec, const FieldState& field,
                   const FluidProperties& fluid);

/// Standard volume of fuel gas (Sm3) burnt at fuel_mw for the given hours.
double fuel_volume_sm3(double fuel_mw, double hours, const FluidProperties& fluid);

/// Weymouth constant in SI base units (Sm3/s, Pa, m, K), efficiency 1.0.
double weymouth_constant();

/// Standard gas flow through a pipeline by the Weymouth relation
///   Q = C * (T_b/p_b) * D^(8/3) * sqrt((p1^2 - p2^2) / (G T L Z)).
double weymouth_flow(double p1_pa, double p2_pa, double diameter_m, double length_m,
                     const FluidProperties& fluid, double temperature_k);

/// Inverse of weymouth_flow for the outlet pressure.
double weymouth_outlet_pressure(double p1_pa, double q_sm3ps, double diameter_m,
                                double length_m, const FluidProperties& fluid,
                                double temperature_k);

/// Darcy-Weisbach pressure drop f * (L/D) * rho * v^2 / 2 in Pa.
double darcy_pressure_drop(double q_m3ps, double diameter_m, double length_m,
                           double density_kg_per_m3, double friction);

/// Power curve lookup, piecewise linear, zero outside [cut-in, cut-out).
double wind_power(double wind_speed_mps, const WindTurbineSpec& spec);

/// New state of charge after holding power_mw (positive = discharge) for
/// hours. Throws CapacityError when the step leaves [0, energy_capacity].
double battery_step(double soc_mwh, double power_mw, double hours, const BatterySpec& spec);

} // namespace leogo::physics
