// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "leogo/dispatch.hpp"
#include "leogo/dynamics.hpp"
#include "leogo/network.hpp"
#include "leogo/oracle.hpp"
#include "leogo/physics.hpp"
#include "leogo/profiles.hpp"
#include "../random_instances.hpp"

#include <fmt/format.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

using namespace leogo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body)
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.note(fmt::format("exception: {}", e.what()));
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(elapsed < budget_s, fmt::format("runtime {:.2f} s over {:.0f} s budget", elapsed, budget_s));
    if (!out.pass) ++failures;
    fmt::print("{} {:2d} {} ({:.2f} s): {}\n", out.pass ? "PASS" : "FAIL", id, title, elapsed,
               out.detail);
    std::fflush(stdout);
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Every step short of reserve or energy must carry the infeasible flag.
bool no_silent_violation(const Scenario& s, const dispatch::DispatchPlan& plan)
{
    for (const auto& st : plan.steps) {
        const double supply = std::accumulate(st.gt_mw.begin(), st.gt_mw.end(), 0.0) +
                              st.wind_used_mw + st.battery_mw;
        const bool short_energy = std::abs(supply - st.demand_mw) > 1e-6;
        const bool short_reserve = st.reserve_mw < s.reserve_requirement_mw - 1e-6;
        if ((short_energy || short_reserve) && st.feasible) return false;
    }
    return true;
}

} // namespace

int main()
{
    const Scenario base = build_canonical_scenario(CaseVariation::Base);
    const Scenario var_a = build_canonical_scenario(CaseVariation::A);
    const Scenario var_b = build_canonical_scenario(CaseVariation::B);
    const auto& gt = base.gas_turbines[0];

    criterion(1, "formula regression", 1.0, [&](Outcome& o) {
        const double wi = physics::pump_power(0.277, 0.7e6, 25e6, 0.75);
        const double oil = physics::pump_power(0.098, 0.3e6, 5e6, 0.6);
        const double gex = physics::compressor_power(68.3, 2e6, 20e6, 300.0, base.fluid, 0.75);
        const double rec = physics::compressor_power(70.8, 1.3e6, 2e6, 300.0, base.fluid, 0.75);
        o.require(near(wi, 8.97, 0.01), "water injection pump");
        o.require(std::abs(oil / 0.79 - 1.0) <= 0.03, "oil export pump");
        o.require(near(gex, 24.2, 0.1), "gas export compressor");
        o.require(near(rec, 3.8, 0.05), "re-compressor");
        o.note(fmt::format("pumps {:.4f} / {:.4f} MW, compressors {:.4f} / {:.4f} MW", wi, oil, gex, rec));
    });

    criterion(2, "fuel-curve endpoints", 1.0, [&](Outcome& o) {
        const double hi = physics::gt_efficiency(21.8, gt);
        const double lo = physics::gt_efficiency(4.36, gt);
        o.require(near(hi, 0.347, 1e-6), "efficiency at 21.8 MW");
        o.require(near(lo, 0.200, 1e-6), "efficiency at 4.36 MW");
        double prev = 0.0;
        bool increasing = true;
        for (int k = 0; k <= 1830; ++k) {
            const double e = physics::gt_efficiency(3.5 + 0.01 * k, gt);
            increasing &= e > prev;
            prev = e;
        }
        o.require(increasing, "strictly increasing on [3.5, 21.8]");
        o.note(fmt::format("eta(21.8) = {:.9f}, eta(4.36) = {:.9f}", hi, lo));
    });

    criterion(3, "nominal operating state", 1.0, [&](Outcome& o) {
        const double demand = dispatch::step_demand(base, 1.0);
        const bool all[] = {true, true, true};
        const bool two[] = {true, true, false};
        const auto ed3 = dispatch::economic_dispatch(all, demand, 0.0, 5.0, base.gas_turbines);
        const auto ed2 = dispatch::economic_dispatch(two, demand, 0.0, 5.0, base.gas_turbines);
        o.require(near(demand, 43.18, 0.05), "total demand");
        o.require(ed3.feasible(), "three-GT commitment feasible");
        for (double p : ed3.gt_mw) o.require(near(p, 14.39, 0.05), "GT loading");
        o.require(!ed2.feasible() && ed2.reserve_deficit_mw > 0.0, "two-GT commitment infeasible");
        o.note(fmt::format("demand {:.2f} MW, GTs {:.3f} MW each, two-GT reserve {:.2f} MW", demand,
                           ed3.gt_mw[0], ed2.reserve_mw));
    });

    criterion(4, "heat balance", 1.0, [&](Outcome& o) {
        const double per_gt = physics::gt_heat(14.39, gt);
        const double supply = 3.0 * per_gt;
        o.require(near(per_gt, 15.2, 0.05), "recovered heat per GT");
        o.require(near(supply, 45.6, 0.15), "total heat supply");
        o.require(supply >= base.heat.total() && near(base.heat.total(), 8.0, 1e-12), "supply covers demand");
        o.note(fmt::format("{:.3f} MW per GT, {:.2f} MW total vs {:.1f} MW demand", per_gt, supply,
                           base.heat.total()));
    });

    criterion(5, "experiment 1: wellstream dip", 10.0, [&](Outcome& o) {
        dispatch::RollingOptions opt;
        opt.duration_min = 1000.0;
        opt.dip = dispatch::DemandDip{0.2, 500.0, 750.0};
        const double cover = opt.duration_min + opt.dispatch.horizon_steps * opt.dispatch.step_min;
        const auto plan = dispatch::rolling_simulate(base, profiles::canonical_profiles(base, cover), opt);
        const auto traj = dispatch::commitment_trajectory(plan);
        o.require(traj == std::vector<int>{3, 2, 3}, "GT-count trajectory 3-2-3");
        double min_reserve = 1e9;
        for (const auto& st : plan.steps) {
            if (st.feasible) min_reserve = std::min(min_reserve, st.reserve_mw);
        }
        o.require(min_reserve >= 5.0 - 1e-9, "reserve at feasible steps");
        o.require(no_silent_violation(base, plan), "violations flagged");
        o.note(fmt::format("trajectory {}, min reserve {:.2f} MW, {} infeasible steps",
                           fmt::join(traj, "-"), min_reserve, plan.infeasible_steps()));
    });

    criterion(6, "experiment 2: wind variation", 10.0, [&](Outcome& o) {
        dispatch::RollingOptions opt;
        opt.duration_min = 1000.0;
        const double cover = opt.duration_min + opt.dispatch.horizon_steps * opt.dispatch.step_min;
        const auto plan = dispatch::rolling_simulate(var_a, profiles::canonical_profiles(var_a, cover), opt);
        int starts = 0;
        int stops = 0;
        for (std::size_t t = 1; t < plan.steps.size(); ++t) {
            const int a = plan.steps[t - 1].units_on();
            const int b = plan.steps[t].units_on();
            starts += a == 2 && b == 3;
            stops += a == 3 && b == 2;
        }
        o.require(starts >= 1 && stops >= 1, "third-GT start and stop");
        o.require(no_silent_violation(var_a, plan), "reserve never silently violated");
        o.note(fmt::format("trajectory {}, third-GT starts {}, stops {}, {} infeasible steps",
                           fmt::join(dispatch::commitment_trajectory(plan), "-"), starts, stops,
                           plan.infeasible_steps()));
    });

    criterion(7, "optimizer optimality", 60.0, [&](Outcome& o) {
        dispatch::DispatchOptions opt;
        double worst = 0.0;
        int battery = 0;
        const auto instances = fixtures::random_instances(200, 20240607);
        for (const auto& in : instances) {
            const auto fast = dispatch::plan_horizon(in.scenario, in.state, in.forecasts, opt);
            const auto slow = oracle::brute_force_plan(in.scenario, in.state, in.forecasts, opt);
            worst = std::max(worst, std::abs(fast.objective - slow.objective) /
                                        std::max(1.0, std::abs(slow.objective)));
            battery += !in.scenario.batteries.empty();
        }
        o.require(worst <= 1e-6, "relative objective gap");
        o.note(fmt::format("{} instances ({} with battery), worst relative gap {:.2e}",
                           instances.size(), battery, worst));
    });

    criterion(8, "battery round trip", 1.0, [&](Outcome& o) {
        const auto& b = var_b.batteries.at(0);
        const double stored = physics::battery_step(0.0, -b.power_capacity_mw, 1.0, b);
        const double hours = stored * b.discharge_efficiency / b.power_capacity_mw;
        const double left = physics::battery_step(stored, b.power_capacity_mw, hours, b);
        const double recovered = b.power_capacity_mw * hours / (b.power_capacity_mw * 1.0);
        o.require(near(left, 0.0, 1e-9), "battery emptied");
        o.require(near(recovered, 0.9, 1e-9), "90 % recovered");
        o.note(fmt::format("stored {:.6f} MWh, recovered fraction {:.12f}", stored, recovered));
    });

    criterion(9, "forecast calibration", 5.0, [&](Outcome& o) {
        const auto week = profiles::canonical_profiles(var_a, 7 * 1440.0);
        const auto& cfg = var_a.profiles;
        const auto fc = profiles::synth_wind_forecast(week.wind_speed, 60.0, cfg.forecast_block_min * 60.0,
                                                      cfg.forecast_noise_sigma_mps, cfg.seed + 1,
                                                      cfg.nowcast_ratio);
        const double e = profiles::rmse(fc.forecast_mps, week.wind_speed);
        // 15 s sampling lands on the quarter periods of the 25 min sine.
        const auto m = profiles::synth_demand_multiplier(7 * 86400.0, 15.0, cfg.demand_amplitude,
                                                         cfg.demand_period_min * 60.0);
        const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
        o.require(near(e, 3.3, 0.3), "forecast RMSE");
        o.require(near(*hi, 1.04, 1e-9) && near(*lo, 0.96, 1e-9), "demand multiplier extrema");
        o.note(fmt::format("RMSE {:.4f} m/s, demand multiplier in [{:.6f}, {:.6f}]", e, *lo, *hi));
    });

    criterion(10, "power flow", 1.0, [&](Outcome& o) {
        const auto g = network::build_canonical_grid(base);
        const auto r = network::solve_power_flow(g, network::nominal_injections(base, g));
        const double balance = r.generation_mw - r.load_output_mw - r.total_losses_mw();
        const auto overloads = network::check_ratings(g, r);
        o.require(r.max_mismatch_pu < 1e-8, "mismatch");
        o.require(r.total_losses_mw() >= 0.2 && r.total_losses_mw() <= 2.0, "losses in [0.2, 2.0] MW");
        o.require(std::abs(balance) <= 1e-6, "generation = load + losses");
        o.require(overloads.empty(), "no overloads");
        o.note(fmt::format("{} iterations, mismatch {:.1e} pu, losses {:.4f} MW, balance {:.1e} MW",
                           r.iterations, r.max_mismatch_pu, r.total_losses_mw(), balance));
    });

    criterion(11, "frequency dynamics", 10.0, [&](Outcome& o) {
        struct Case {
            const Scenario* s;
            std::vector<double> gt;
            double wind;
            double lost;
        };
        const Case cases[] = {{&base, {13.5, 13.5, 13.5}, 0.0, 13.5},
                              {&var_a, {8.3, 8.3, 0.0}, 24.0, 8.3}};
        for (const auto& c : cases) {
            const auto t0 = std::chrono::steady_clock::now();
            bool on[3];
            for (int i = 0; i < 3; ++i) on[i] = c.gt[i] > 0.0;
            const auto init = dynamics::init_from_setpoints(*c.s, c.gt, on, c.wind);
            const auto tr = dynamics::simulate(init, {{1.0, dynamics::EventKind::Trip, 0, 0.0}}, 30.0);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            std::vector<dynamics::MachineState> rest;
            double gain = 0.0;
            for (const auto& m : tr.final_state.machines) {
                if (!m.in_service) continue;
                rest.push_back(m);
                gain += m.droop_gain_mw_per_hz(init.f0_hz);
            }
            const double ss = dynamics::steady_state_frequency(c.lost, rest, init.load_mw,
                                                               init.load_damping, init.f0_hz);
            const double sim = tr.samples.back().f_hz - init.f0_hz;
            o.require(std::abs(sim / ss - 1.0) <= 0.01, "steady state vs droop formula");
            o.require(tr.nadir_hz() < init.f0_hz + ss, "nadir below steady state");
            // Generation lost minus the load relief is picked up in proportion to droop gain.
            const double relief = -init.load_damping * init.load_mw * sim / init.f0_hz;
            double worst = 0.0;
            for (std::size_t i = 1; i < 3; ++i) {
                if (!tr.final_state.machines[i].in_service) continue;
                const double k = tr.final_state.machines[i].droop_gain_mw_per_hz(init.f0_hz);
                const double share = (c.lost - relief) * k / gain;
                const double rise = tr.samples.back().pe_mw[i] - c.gt[i];
                worst = std::max(worst, std::abs(rise / share - 1.0));
            }
            o.require(worst <= 0.02, "droop sharing");
            o.require(secs < 5.0, "runtime per event");
            o.note(fmt::format("{:.1f} MW trip: ss {:.5f} Hz (analytic {:.5f}), nadir {:.4f} Hz, "
                               "sharing error {:.2e}, {:.3f} s",
                               c.lost, sim, ss, tr.nadir_hz(), worst, secs));
        }
    });

    criterion(12, "determinism", 20.0, [&](Outcome& o) {
        const auto root = fs::temp_directory_path() / "leogo_acceptance";
        fs::remove_all(root);
        std::vector<std::string> csv;
        for (const char* run : {"a", "b"}) {
            const auto dir = root / run;
            const std::string cmd = fmt::format(
                "{} dispatch --case A --duration 1000 --step 5 --seed 7 --out {} > {} 2>&1",
                LEOGO_CLI_PATH, dir.string(), (root / (std::string(run) + ".log")).string());
            fs::create_directories(dir);
            const int status = std::system(cmd.c_str());
            // Exit 2 (flagged infeasible steps) is a completed run as well.
            o.require(WIFEXITED(status) && WEXITSTATUS(status) != 1, "CLI exit status");
            csv.push_back(slurp(dir / "dispatch.csv"));
        }
        o.require(!csv[0].empty() && csv[0] == csv[1], "byte-identical CSV");
        o.note(fmt::format("{} bytes, identical: {}", csv[0].size(), csv[0] == csv[1]));
    });

    fmt::print("{} of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
