#pragma once

#include "leogo/model.hpp"
#include "leogo/profiles.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

// Rolling-horizon unit commitment and economic dispatch of gas turbines,
// wind and battery under a spinning-reserve requirement.
namespace leogo::dispatch {

enum class UnitStatus { Off, Starting, On };

struct UnitState {
    UnitStatus status = UnitStatus::On;
    double remaining_min = 0.0; ///< time left before delivery, Starting only
};

struct CommitmentState {
    std::vector<UnitState> units; ///< one per gas turbine, scenario order
    std::vector<double> soc_mwh;  ///< one per battery

    /// All turbines on, batteries half full.
    static CommitmentState all_on(const Scenario& s);
};

struct DispatchOptions {
    double step_min = 5.0;
    int horizon_steps = 18;
    double startup_penalty_sm3 = 50.0;
    bool battery_reserve = true;
    double soc_grid_mwh = 0.1;
    int nowcast_steps = 6;
    // Penalties (Sm3 per MW per step) that price infeasibility. Unserved or
    // surplus energy is weighted above missing reserve so that, when both
    // cannot be met, generation is maximised before reserve is restored.
    double energy_penalty_sm3_per_mw = 1e5;
    double reserve_penalty_sm3_per_mw = 1e4;

    double step_hours() const { return step_min / 60.0; }
};

/// Forecast inputs for one step of a planning horizon.
struct StepInput {
    double demand_mw = 0.0;
    double wind_available_mw = 0.0;
    double reserve_requirement_mw = 0.0;
};

/// Electric demand including loss allowance; flow-dependent loads scale by
/// multiplier, all other terms are constant.
double step_demand(const Scenario& s, double multiplier);

struct EconomicDispatch {
    std::vector<double> gt_mw; ///< zero for units not on
    double wind_used_mw = 0.0;
    double curtailed_mw = 0.0;
    double battery_mw = 0.0; ///< positive = discharge
    double reserve_mw = 0.0;
    double fuel_mw = 0.0;
    double energy_deficit_mw = 0.0;
    double surplus_mw = 0.0;
    double reserve_deficit_mw = 0.0;

    bool feasible() const
    {
        return energy_deficit_mw <= 1e-9 && surplus_mw <= 1e-9 && reserve_deficit_mw <= 1e-9;
    }
};

/// Least-fuel dispatch of the committed units. battery_mw is a fixed
/// storage setpoint and battery_reserve_mw the reserve it contributes.
/// Units with equal fuel slope share load equally.
EconomicDispatch economic_dispatch(std::span<const bool> on, double demand_mw,
                                   double wind_available_mw, double reserve_requirement_mw,
                                   std::span<const GasTurbineSpec> specs, double battery_mw = 0.0,
                                   double battery_reserve_mw = 0.0);

/// Single-step variant for a battery at a known state of charge: surplus
/// below the committed minimum load is absorbed by charging before wind is
/// curtailed, and shortfalls are covered by discharging.
EconomicDispatch economic_dispatch_balancing(std::span<const bool> on, double demand_mw,
                                             double wind_available_mw,
                                             double reserve_requirement_mw,
                                             std::span<const GasTurbineSpec> specs,
                                             const BatterySpec& battery, double soc_mwh,
                                             double step_hours, bool battery_reserve = true);

/// Reserve a battery can offer after a step: limited by the unused power
/// capacity and by the energy left at soc_after_mwh over one more step.
double battery_reserve(const BatterySpec& b, double battery_mw, double soc_after_mwh,
                       double step_hours);

struct DispatchStep {
    double t_min = 0.0;
    std::vector<UnitStatus> status;
    std::vector<double> start_remaining_min; ///< per unit, nonzero while Starting
    std::vector<double> gt_mw;
    double wind_available_mw = 0.0;
    double wind_used_mw = 0.0;
    double curtailed_mw = 0.0;
    double battery_mw = 0.0;
    double soc_mwh = 0.0; ///< state of charge at the end of the step
    double demand_mw = 0.0;
    double reserve_mw = 0.0;
    double fuel_mw = 0.0;
    double fuel_sm3 = 0.0;
    double co2_kg = 0.0;
    int starts = 0;
    double energy_deficit_mw = 0.0;
    double surplus_mw = 0.0;
    double reserve_deficit_mw = 0.0;
    double planned_wind_mw = 0.0; ///< wind the plan assumed for this step
    bool feasible = true;

    int units_on() const;
};

struct DispatchPlan {
    std::vector<DispatchStep> steps;
    double objective = 0.0; ///< fuel Sm3 + startup and infeasibility penalties
    CommitmentState final_state;

    double total_fuel_sm3() const;
    double total_co2_kg() const;
    int total_starts() const;
    double curtailed_mwh(double step_hours) const;
    double min_reserve_mw() const;
    int infeasible_steps() const;
};

/// Optimal commitment and dispatch over forecasts.size() steps by a forward
/// dynamic program over unit states (off, starting with k steps left, on)
/// and, with a battery, a state-of-charge grid. A unit activated at step t
/// delivers from t + ceil(startup time / step).
DispatchPlan plan_horizon(const Scenario& s, const CommitmentState& state,
                          std::span<const StepInput> forecasts, const DispatchOptions& opt);

struct DemandDip {
    double fraction = 0.0;
    double start_min = 0.0;
    double end_min = 0.0;
};

struct RollingOptions {
    DispatchOptions dispatch;
    double duration_min = 1000.0;
    std::optional<DemandDip> dip;
    std::optional<CommitmentState> initial_state;
};

/// Receding-horizon run: plan with the nowcast for the first steps and the
/// forecast beyond, commit the first step against measured wind, advance.
DispatchPlan rolling_simulate(const Scenario& s, const TimeSeriesSet& profiles,
                              const RollingOptions& opt);

/// Per-step CSV with header
/// t_min,gt1_mw,gt2_mw,gt3_mw,wind_mw,curtail_mw,batt_mw,soc_mwh,demand_mw,
/// reserve_mw,fuel_sm3,co2_kg,feasible
void write_plan_csv(std::ostream& out, const DispatchPlan& plan);

/// Run-length encoding of the number of online turbines, e.g. {3, 2, 3}.
std::vector<int> commitment_trajectory(const DispatchPlan& plan);

} // namespace leogo::dispatch
