#pragma once

#include "leogo/dispatch.hpp"
#include "leogo/model.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Electromechanical (RMS) response of the turbine-generators to power
// imbalances: swing equations, droop governors, frequency-dependent load.
namespace leogo::dynamics {

struct MachineState {
    std::string tag;
    bool in_service = true;
    double rated_mva = 28.0;
    double inertia_h_s = 2.5;
    double droop = 0.04;
    double governor_time_constant_s = 0.5;
    double min_mw = 3.5;
    double max_mw = 21.8;
    double delta_rad = 0.0;  ///< rotor angle relative to the initial equilibrium
    double dw_pu = 0.0;      ///< speed deviation
    double pm_mw = 0.0;      ///< mechanical power, also the governor state
    double pref_mw = 0.0;    ///< load reference set at initialisation
    double p0_mw = 0.0;      ///< electrical output at the initial equilibrium

    /// Governor gain S / (R f0) in MW/Hz.
    double droop_gain_mw_per_hz(double f0) const { return rated_mva / (droop * f0); }
    /// 2 H S / f0 in MW s/Hz.
    double inertia_mws_per_hz(double f0) const { return 2.0 * inertia_h_s * rated_mva / f0; }
};

struct DynamicState {
    double t_s = 0.0;
    double f0_hz = 50.0;
    double df_hz = 0.0;          ///< system (centre-of-inertia) frequency deviation
    std::vector<MachineState> machines;
    double load_mw = 0.0;        ///< electrical load at nominal frequency
    double load_damping = 1.0;   ///< pu load change per pu frequency change
    double wind_mw = 0.0;        ///< constant, no frequency response

    double frequency_hz() const { return f0_hz + df_hz; }
};

class EquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Steady state with the given turbine outputs (zero = not in service unless
/// on is set) and constant wind. Load equals generation so that the state
/// is an equilibrium; throws EquilibriumError if a setpoint is outside the
/// unit's range.
DynamicState init_from_setpoints(const Scenario& s, std::span<const double> gt_mw,
                                 std::span<const bool> on, double wind_mw);

/// As init_from_setpoints, from one committed dispatch step.
DynamicState init_from_dispatch(const Scenario& s, const dispatch::DispatchStep& step);

/// Largest |dP/dt| residual over the state's equations, MW.
double equilibrium_residual(const DynamicState& st);

enum class EventKind { Trip, LoadStep };

struct Event {
    double time_s = 0.0;
    EventKind kind = EventKind::Trip;
    std::size_t machine = 0; ///< trip
    double delta_mw = 0.0;   ///< load step, positive = more load
};

struct SimulationOptions {
    double dt_s = 0.001;
    int record_every = 1;
    bool multi_machine = false;
    double transient_reactance_pu = 0.25; ///< on machine base, multi-machine only
    double machine_damping_pu = 2.0;      ///< on machine base, multi-machine only
    double abort_df_hz = 5.0;
};

struct Sample {
    double t_s = 0.0;
    double f_hz = 0.0;
    std::vector<double> pe_mw;
    std::vector<double> pm_mw;
    std::vector<double> dw_pu;
    double wind_mw = 0.0;
};

struct Trajectory {
    std::vector<Sample> samples;
    DynamicState final_state;
    double energy_imbalance_mj = 0.0;      ///< integral of sum (Pm - Pe) over machines
    double kinetic_energy_change_mj = 0.0; ///< of the machines still in service

    double nadir_hz() const;
};

/// Fixed-step RK4. The uniform model integrates one frequency for the whole
/// island; the multi-machine model adds rotor angles coupled through
/// linearised synchronising power to a common load bus.
Trajectory simulate(const DynamicState& initial, std::vector<Event> events, double duration_s,
                    const SimulationOptions& opt = {});

/// Stored rotational energy sum H S (f/f0)^2 over in-service machines, MJ.
double kinetic_energy_mj(const DynamicState& st);

/// Analytic post-disturbance offset -dP / (sum K_i + D P_load / f0), Hz.
double steady_state_frequency(double delta_p_mw, std::span<const MachineState> remaining,
                              double load_mw, double load_damping, double f0_hz = 50.0);

/// t_s,f_hz,gt1_mw,gt2_mw,gt3_mw,wind_mw
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

} // namespace leogo::dynamics
