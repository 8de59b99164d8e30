#pragma once

#include "leogo/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

// Positive-sequence per-unit model of the platform grid and a Newton-Raphson
// AC power flow.
namespace leogo::network {

struct CableType {
    std::string name;
    double kv;
    double r_ohm_per_km;
    double x_ohm_per_km;
    double c_uf_per_km;
    double rated_a;
};

/// XLPE cable data used by the canonical grid.
const CableType& cable_33kv_240();
const CableType& cable_11kv_120();
const CableType& cable_11kv_240();

struct Bus {
    std::string id;
    double kv = 11.0;
    BusSide side = BusSide::A;
};

enum class BranchKind { Cable, Transformer, Switch };

std::string_view to_string(BranchKind k);

struct Branch {
    std::string id;
    BranchKind kind = BranchKind::Cable;
    std::size_t from = 0;
    std::size_t to = 0;
    // Series impedance and total shunt susceptance of one circuit, per unit
    // on the system base. Parallel circuits divide z and multiply b.
    double r_pu = 0.0;
    double x_pu = 0.0;
    double b_pu = 0.0;
    int parallel = 1;
    double rated_a = 0.0;   ///< per circuit, cables
    double rated_mva = 0.0; ///< transformers
    std::string type;       ///< cable type or transformer vector group
    bool closed = true;     ///< switches only
};

struct Generator {
    std::string tag;
    std::size_t bus = 0;
    double voltage_setpoint_pu = 1.0;
};

enum class LoadModel {
    ConstantPq, ///< motors and the constant-power share
    Converter,  ///< constant active power drawn through a lossy front end, unity pf
    Zip,        ///< general loads with a voltage-dependent composition
};

struct GridLoad {
    std::string tag;
    std::size_t bus = 0;
    LoadModel model = LoadModel::ConstantPq;
    double p_mw = 0.0;   ///< consumption at 1 pu (converter: output side)
    double q_mvar = 0.0; ///< at 1 pu
    bool flow_dependent = false;
    // ZIP shares of p and q: constant power (incl. motor), current, impedance.
    double share_p = 1.0;
    double share_i = 0.0;
    double share_z = 0.0;
    double efficiency = 1.0; ///< converter front end
};

struct WindInjection {
    std::string tag;
    std::size_t bus = 0;
};

struct GridModel {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators; ///< scenario order; generators[0] is the slack
    std::vector<GridLoad> loads;
    std::vector<WindInjection> wind;

    std::size_t bus_index(std::string_view id) const;
    std::size_t branch_index(std::string_view id) const;
};

/// Platform grid for the scenario's case: generator, load and transformer
/// buses on 11, 0.69 and 0.4 kV and, with wind, the 33 kV collection system.
GridModel build_canonical_grid(const Scenario& s);

/// Every branch turned into a closed switch and lossless converters.
GridModel copper_plate(const GridModel& g);

struct Injections {
    std::vector<double> gt_mw;      ///< setpoints; the slack entry is ignored
    std::vector<bool> gt_in_service; ///< empty = all in service
    std::vector<double> wind_mw;    ///< per wind injection, unity power factor
    double load_multiplier = 1.0;   ///< applied to flow-dependent loads
};

/// All turbines in service sharing the expected load equally.
Injections nominal_injections(const Scenario& s, const GridModel& g, double load_multiplier = 1.0);

struct SolverOptions {
    double tolerance_pu = 1e-8;
    int max_iterations = 50;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double mismatch)
        : std::runtime_error(what), mismatch_(mismatch)
    {
    }
    double mismatch() const { return mismatch_; }

private:
    double mismatch_;
};

struct BusResult {
    double v_pu = 1.0;
    double angle_rad = 0.0;
};

struct BranchFlow {
    double p_from_mw = 0.0;
    double q_from_mvar = 0.0;
    double p_to_mw = 0.0;
    double q_to_mvar = 0.0;
    double current_a = 0.0; ///< larger of the two terminal currents
    double s_mva = 0.0;     ///< larger of the two terminal apparent powers
    double loss_mw = 0.0;
    bool solved = false;    ///< false for switches and out-of-service circuits
};

struct PowerFlowResult {
    int iterations = 0;
    double max_mismatch_pu = 0.0;
    std::vector<BusResult> buses;
    std::vector<BranchFlow> branches;
    std::vector<double> gt_mw;   ///< solved output, slack included
    std::vector<double> gt_mvar;
    std::vector<double> load_mw; ///< drawn from the grid at solved voltage
    double generation_mw = 0.0;  ///< turbines plus wind
    double load_output_mw = 0.0; ///< consumption seen by the processes
    double branch_losses_mw = 0.0;
    double converter_losses_mw = 0.0;

    double total_losses_mw() const { return branch_losses_mw + converter_losses_mw; }
};

/// Newton-Raphson in polar coordinates. The first in-service generator of
/// each island is its slack; others are PV at their setpoint. Closed
/// switches merge buses.
PowerFlowResult solve_power_flow(const GridModel& g, const Injections& inj,
                                 const SolverOptions& opt = {});

/// Series-branch losses rebuilt from terminal voltages as |I|^2 R.
double reconstruct_branch_losses(const GridModel& g, const PowerFlowResult& r);

struct Overload {
    std::string branch;
    BranchKind kind;
    double value = 0.0; ///< A for cables, MVA for transformers
    double limit = 0.0;
    double loading_pct = 0.0;
};

std::vector<Overload> check_ratings(const GridModel& g, const PowerFlowResult& r);

/// Loading in percent of a solved branch against its rating, 0 when unrated.
double loading_pct(const Branch& b, const BranchFlow& f);

/// id,kv,v_pu,angle_deg
void write_bus_csv(std::ostream& out, const GridModel& g, const PowerFlowResult& r);
/// from,to,p_mw,q_mvar,i_a,loading_pct (closed switches are omitted)
void write_branch_csv(std::ostream& out, const GridModel& g, const PowerFlowResult& r);

} // namespace leogo::network
