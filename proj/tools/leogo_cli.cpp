// leogo: command-line runs of the platform energy system models.

#include "leogo/dispatch.hpp"
#include "leogo/dynamics.hpp"
#include "leogo/network.hpp"
#include "leogo/profiles.hpp"
#include "leogo/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace leogo;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kFailed = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string case_name = "base";
    std::string scenario_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--case", c.case_name, "Case variation: base, A or B")
        ->check(CLI::IsMember({"base", "A", "B", "a", "b"}));
    cmd->add_option("--scenario", c.scenario_file, "Scenario JSON (overrides --case)");
    cmd->add_option("--seed", c.seed, "Seed of the synthetic profiles");
    cmd->add_option("--out", c.out_dir, "Output directory");
}

Scenario load(const Common& c, bool check = true)
{
    Scenario s;
    if (!c.scenario_file.empty()) {
        s = load_scenario_file(c.scenario_file);
    } else {
        std::string name = c.case_name;
        if (name.size() == 1) name[0] = static_cast<char>(std::toupper(name[0]));
        s = build_canonical_scenario(*parse_case(name));
    }
    if (c.seed) s.profiles.seed = *c.seed;
    if (check) {
        const auto v = validate(s);
        if (!v.empty()) {
            throw UsageError(fmt::format("scenario is invalid ({}: {}), run validate for the full list",
                                         v.front().field, v.front().message));
        }
    }
    return s;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& flags,
                    const Scenario& s, const std::vector<std::string>& outputs)
{
    json m;
    m["tool"] = "leogo";
    m["version"] = kVersion;
    m["command"] = command;
    m["flags"] = flags;
    m["seed"] = s.profiles.seed;
    m["scenario"] = {{"name", s.name},
                     {"case", std::string(to_string(s.case_variation))},
                     {"fingerprint", fmt::format("{:016x}", fnv1a(scenario_to_json(s)))},
                     {"forecast_noise_sigma_mps", s.profiles.forecast_noise_sigma_mps},
                     {"reserve_requirement_mw", s.reserve_requirement_mw}};
    m["outputs"] = outputs;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

dispatch::DemandDip parse_dip(const std::string& text)
{
    dispatch::DemandDip dip;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(text);
    if (!(in >> dip.fraction >> c1 >> dip.start_min >> c2 >> dip.end_min) || c1 != ':' ||
        c2 != ':' || !(in >> std::ws).eof()) {
        throw UsageError("--demand-dip expects frac:start:end, got '" + text + "'");
    }
    if (dip.fraction < 0.0 || dip.fraction >= 1.0 || dip.start_min >= dip.end_min) {
        throw UsageError("--demand-dip needs 0 <= frac < 1 and start < end");
    }
    return dip;
}

// ---------------------------------------------------------------- dispatch

struct DispatchArgs {
    Common common;
    double duration_min = 1000.0;
    double step_min = 5.0;
    int horizon = 18;
    std::string wind_profile;
    std::string demand_dip;
};

int run_dispatch(const DispatchArgs& a)
{
    const Scenario s = load(a.common);
    dispatch::RollingOptions opt;
    opt.dispatch.step_min = a.step_min;
    opt.dispatch.horizon_steps = a.horizon;
    opt.duration_min = a.duration_min;
    if (!a.demand_dip.empty()) opt.dip = parse_dip(a.demand_dip);
    if (a.step_min <= 0.0 || a.horizon < 1 || a.duration_min < 0.0) {
        throw UsageError("--step and --horizon must be positive, --duration non-negative");
    }

    const double cover_min = a.duration_min + a.horizon * a.step_min;
    TimeSeriesSet profiles;
    if (!a.wind_profile.empty()) {
        profiles = profiles::ingest_csv_file(a.wind_profile);
        if (profiles.demand_multiplier.empty()) {
            profiles.demand_multiplier = profiles::synth_demand_multiplier(
                static_cast<double>(profiles.size()) * profiles.grid.step_s, profiles.grid.step_s,
                s.profiles.demand_amplitude, s.profiles.demand_period_min * 60.0);
        }
        if (static_cast<double>(profiles.size()) * profiles.grid.step_s < cover_min * 60.0 - 1e-9) {
            throw UsageError(fmt::format("{} covers {:.0f} min, the run needs {:.0f} min",
                                         a.wind_profile,
                                         profiles.size() * profiles.grid.step_s / 60.0, cover_min));
        }
    } else {
        profiles = profiles::canonical_profiles(s, cover_min);
    }

    const auto plan = dispatch::rolling_simulate(s, profiles, opt);

    const fs::path dir = a.common.out_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    dispatch::write_plan_csv(csv, plan);
    write_file(dir / "dispatch.csv", csv.str());

    json summary;
    summary["steps"] = plan.steps.size();
    summary["fuel_sm3"] = plan.total_fuel_sm3();
    summary["co2_kg"] = plan.total_co2_kg();
    summary["gt_starts"] = plan.total_starts();
    summary["curtailed_mwh"] = plan.curtailed_mwh(opt.dispatch.step_hours());
    summary["min_reserve_mw"] = plan.min_reserve_mw();
    summary["infeasible_steps"] = plan.infeasible_steps();
    summary["objective"] = plan.objective;
    summary["commitment_trajectory"] = dispatch::commitment_trajectory(plan);
    json deficits = json::array();
    for (const auto& st : plan.steps) {
        if (st.feasible) continue;
        deficits.push_back({{"t_min", st.t_min},
                            {"energy_deficit_mw", st.energy_deficit_mw},
                            {"surplus_mw", st.surplus_mw},
                            {"reserve_deficit_mw", st.reserve_deficit_mw}});
    }
    summary["deficits"] = deficits;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    json flags = {{"case", std::string(to_string(s.case_variation))},
                  {"duration", a.duration_min},
                  {"step", a.step_min},
                  {"horizon", a.horizon},
                  {"wind_profile", a.wind_profile},
                  {"demand_dip", a.demand_dip},
                  {"scenario", a.common.scenario_file}};
    write_manifest(dir, "dispatch", flags, s, {"dispatch.csv", "summary.json"});

    fmt::print("dispatch: {} steps, fuel {:.1f} Sm3, CO2 {:.1f} kg, {} starts, GTs online",
               plan.steps.size(), plan.total_fuel_sm3(), plan.total_co2_kg(), plan.total_starts());
    for (int n : dispatch::commitment_trajectory(plan)) fmt::print(" {}", n);
    fmt::print("\n");
    if (plan.infeasible_steps() > 0) {
        fmt::print(stderr, "dispatch: {} infeasible steps, see summary.json\n",
                   plan.infeasible_steps());
        return kFailed;
    }
    return kOk;
}

// ---------------------------------------------------------------- dynamics

struct DynamicsArgs {
    Common common;
    double duration_s = 20.0;
    double dt_ms = 1.0;
    std::string trip;
    double trip_at_s = 1.0;
    std::vector<double> setpoints;
    std::optional<double> wind_mw;
    bool multi_machine = false;
};

int run_dynamics(const DynamicsArgs& a)
{
    const Scenario s = load(a.common);
    const std::size_t n = s.gas_turbines.size();
    std::vector<double> gt = a.setpoints;
    double wind = a.wind_mw.value_or(0.0);
    if (gt.empty()) {
        // Reference operating points of the frequency study.
        if (s.wind_turbines.empty()) {
            gt.assign(n, 13.5);
        } else {
            gt.assign(n, 0.0);
            for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) gt[i] = 8.3;
            if (!a.wind_mw) wind = s.wind_capacity_mw();
        }
    }
    if (gt.size() != n) throw UsageError(fmt::format("--setpoints needs {} values", n));
    std::unique_ptr<bool[]> on(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) on[i] = gt[i] > 0.0;
    const auto init = dynamics::init_from_setpoints(s, gt, std::span<const bool>(on.get(), n), wind);

    std::vector<dynamics::Event> events;
    std::optional<std::size_t> tripped;
    if (!a.trip.empty() && a.trip != "none") {
        for (std::size_t i = 0; i < n; ++i) {
            std::string tag = s.gas_turbines[i].tag;
            std::string want = a.trip;
            std::transform(tag.begin(), tag.end(), tag.begin(), ::tolower);
            std::transform(want.begin(), want.end(), want.begin(), ::tolower);
            if (tag == want) tripped = i;
        }
        if (!tripped) throw UsageError("--trip: unknown machine '" + a.trip + "'");
        if (!on[*tripped]) throw UsageError("--trip: " + a.trip + " is not in service");
        if (a.trip_at_s < 0.0 || a.trip_at_s > a.duration_s) {
            throw UsageError("--at must lie within the simulated duration");
        }
        events.push_back({a.trip_at_s, dynamics::EventKind::Trip, *tripped, 0.0});
    }

    dynamics::SimulationOptions opt;
    opt.dt_s = a.dt_ms / 1000.0;
    if (!(opt.dt_s > 0.0) || opt.dt_s > 0.01) throw UsageError("--dt must lie in (0, 10] ms");
    opt.record_every = std::max(1, static_cast<int>(std::lround(0.01 / opt.dt_s)));
    opt.multi_machine = a.multi_machine;

    const auto tr = dynamics::simulate(init, events, a.duration_s, opt);

    const fs::path dir = a.common.out_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    dynamics::write_trajectory_csv(csv, tr);
    write_file(dir / "trajectory.csv", csv.str());

    json summary;
    summary["nadir_hz"] = tr.nadir_hz();
    summary["final_frequency_hz"] = tr.samples.back().f_hz;
    if (tripped) {
        std::vector<dynamics::MachineState> rest;
        for (const auto& m : tr.final_state.machines) {
            if (m.in_service) rest.push_back(m);
        }
        summary["steady_state_analytic_hz"] =
            init.f0_hz + dynamics::steady_state_frequency(gt[*tripped], rest, init.load_mw,
                                                          init.load_damping, init.f0_hz);
    }
    json machines = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        machines.push_back({{"tag", s.gas_turbines[i].tag},
                            {"initial_mw", on[i] ? gt[i] : 0.0},
                            {"final_mw", tr.samples.back().pe_mw[i]}});
    }
    summary["machines"] = machines;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    json flags = {{"case", std::string(to_string(s.case_variation))},
                  {"duration", a.duration_s},
                  {"dt", a.dt_ms},
                  {"trip", a.trip},
                  {"at", a.trip_at_s},
                  {"setpoints", gt},
                  {"wind", wind},
                  {"multi_machine", a.multi_machine},
                  {"scenario", a.common.scenario_file}};
    write_manifest(dir, "dynamics", flags, s, {"trajectory.csv", "summary.json"});
    fmt::print("dynamics: nadir {:.4f} Hz, final {:.4f} Hz\n", tr.nadir_hz(),
               tr.samples.back().f_hz);
    return kOk;
}

// --------------------------------------------------------------- powerflow

int run_powerflow(const Common& c, double multiplier)
{
    const Scenario s = load(c);
    const auto grid = network::build_canonical_grid(s);
    auto inj = network::nominal_injections(s, grid, multiplier);
    if (!s.wind_turbines.empty() && s.gas_turbines.size() > 2) {
        // Two turbines carry the load next to full wind, as in the wind cases.
        double load = 0.0;
        for (double p : inj.gt_mw) load += p;
        double wind = 0.0;
        for (std::size_t w = 0; w < grid.wind.size(); ++w) {
            inj.wind_mw[w] = s.wind_turbines[w].capacity_mw;
            wind += inj.wind_mw[w];
        }
        inj.gt_in_service.assign(grid.generators.size(), false);
        inj.gt_in_service[0] = inj.gt_in_service[1] = true;
        inj.gt_mw.assign(grid.generators.size(), 0.0);
        inj.gt_mw[0] = inj.gt_mw[1] = std::max(0.0, load - wind) / 2.0;
    }
    network::PowerFlowResult r;
    try {
        r = network::solve_power_flow(grid, inj);
    } catch (const network::ConvergenceError& e) {
        fmt::print(stderr, "powerflow: {}\n", e.what());
        return kFailed;
    }
    const auto overloads = network::check_ratings(grid, r);

    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    std::ostringstream buses;
    std::ostringstream branches;
    network::write_bus_csv(buses, grid, r);
    network::write_branch_csv(branches, grid, r);
    write_file(dir / "buses.csv", buses.str());
    write_file(dir / "branches.csv", branches.str());

    json summary;
    summary["converged"] = true;
    summary["iterations"] = r.iterations;
    summary["max_mismatch_pu"] = r.max_mismatch_pu;
    summary["generation_mw"] = r.generation_mw;
    summary["load_mw"] = r.load_output_mw;
    summary["branch_losses_mw"] = r.branch_losses_mw;
    summary["converter_losses_mw"] = r.converter_losses_mw;
    summary["total_losses_mw"] = r.total_losses_mw();
    json ov = json::array();
    for (const auto& o : overloads) ov.push_back({{"branch", o.branch}, {"loading_pct", o.loading_pct}});
    summary["overloads"] = ov;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    json flags = {{"case", std::string(to_string(s.case_variation))},
                  {"load_multiplier", multiplier},
                  {"scenario", c.scenario_file}};
    write_manifest(dir, "powerflow", flags, s, {"buses.csv", "branches.csv", "summary.json"});
    fmt::print("powerflow: converged in {} iterations, mismatch {:.2e} pu, losses {:.3f} MW "
               "(branches {:.3f}, converters {:.3f}), {} overloads\n",
               r.iterations, r.max_mismatch_pu, r.total_losses_mw(), r.branch_losses_mw,
               r.converter_losses_mw, overloads.size());
    return kOk;
}

// ---------------------------------------------------------------- validate

int run_validate(const Common& c, const std::string& profile)
{
    int problems = 0;
    Scenario s;
    try {
        s = load(c, false);
    } catch (const ScenarioFormatError& e) {
        fmt::print("error: scenario: {}\n", e.what());
        return kFailed;
    }
    for (const auto& v : validate(s)) {
        fmt::print("violation: {}: {}\n", v.field, v.message);
        ++problems;
    }
    for (const auto& v : consistency_notes(s)) fmt::print("note: {}: {}\n", v.field, v.message);
    if (!profile.empty()) {
        try {
            const auto ts = profiles::ingest_csv_file(profile);
            fmt::print("profile: {} rows at {:g} s\n", ts.size(), ts.grid.step_s);
        } catch (const profiles::ParseError& e) {
            fmt::print("violation: profile line {}: {}\n", e.line(), e.what());
            ++problems;
        }
    }
    if (problems == 0) fmt::print("valid: {}\n", s.name);
    return problems == 0 ? kOk : kFailed;
}

// ---------------------------------------------------------------- profiles

int run_profiles(const Common& c, double duration_min)
{
    const Scenario s = load(c);
    if (duration_min <= 0.0) throw UsageError("--duration must be positive");
    const auto ts = profiles::canonical_profiles(s, duration_min);
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    profiles::write_csv(csv, ts);
    write_file(dir / "profiles.csv", csv.str());
    json flags = {{"case", std::string(to_string(s.case_variation))}, {"duration", duration_min}};
    write_manifest(dir, "profiles", flags, s, {"profiles.csv"});
    fmt::print("profiles: {} rows written\n", ts.size());
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Offshore platform energy system: dispatch, power flow and frequency dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    DispatchArgs da;
    auto* dcmd = app.add_subcommand("dispatch", "Rolling-horizon unit commitment run");
    add_common(dcmd, da.common);
    dcmd->add_option("--duration", da.duration_min, "Simulated time in minutes");
    dcmd->add_option("--step", da.step_min, "Step length in minutes");
    dcmd->add_option("--horizon", da.horizon, "Planning horizon in steps");
    dcmd->add_option("--wind-profile", da.wind_profile, "Profile CSV")->check(CLI::ExistingFile);
    dcmd->add_option("--demand-dip", da.demand_dip, "Wellstream reduction frac:start:end");

    DynamicsArgs ya;
    auto* ycmd = app.add_subcommand("dynamics", "Frequency response to a turbine trip");
    add_common(ycmd, ya.common);
    ycmd->add_option("--duration", ya.duration_s, "Simulated time in seconds");
    ycmd->add_option("--dt", ya.dt_ms, "Integration step in milliseconds");
    auto* trip = ycmd->add_option("--trip", ya.trip, "Machine to trip, e.g. gt1");
    ycmd->add_option("--at", ya.trip_at_s, "Trip time in seconds")->needs(trip);
    ycmd->add_option("--setpoints", ya.setpoints, "Turbine outputs in MW, 0 = off")->delimiter(',');
    ycmd->add_option("--wind", ya.wind_mw, "Wind infeed in MW");
    ycmd->add_flag("--multi-machine", ya.multi_machine, "Per-machine rotor angles");

    Common pc;
    double multiplier = 1.0;
    auto* pcmd = app.add_subcommand("powerflow", "AC power flow of the platform grid");
    add_common(pcmd, pc);
    pcmd->add_option("--load-multiplier", multiplier, "Scale of flow-dependent loads");

    Common vc;
    std::string profile;
    auto* vcmd = app.add_subcommand("validate", "Check a scenario and optional profile CSV");
    add_common(vcmd, vc);
    vcmd->add_option("--profile", profile, "Profile CSV to check");

    Common gc;
    double gen_minutes = 7.0 * 1440.0;
    auto* gcmd = app.add_subcommand("profiles", "Write the synthetic reference profiles");
    add_common(gcmd, gc);
    gcmd->add_option("--duration", gen_minutes, "Length in minutes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*dcmd) return run_dispatch(da);
        if (*ycmd) return run_dynamics(ya);
        if (*pcmd) return run_powerflow(pc, multiplier);
        if (*vcmd) return run_validate(vc, profile);
        if (*gcmd) return run_profiles(gc, gen_minutes);
    } catch (const UsageError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUsage;
    } catch (const ScenarioFormatError& e) {
        fmt::print(stderr, "error: scenario: {}\n", e.what());
        return kUsage;
    } catch (const profiles::ParseError& e) {
        fmt::print(stderr, "error: profile: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kFailed;
    }
    return kUsage;
}
