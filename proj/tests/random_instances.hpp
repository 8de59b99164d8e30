#pragma once

#include "leogo/dispatch.hpp"

#include <random>
#include <vector>

namespace leogo::fixtures {

struct Instance {
    Scenario scenario;
    dispatch::CommitmentState state;
    std::vector<dispatch::StepInput> forecasts;
};

// Small commitment problems: demand in [20, 60] MW, wind in [0, 24] MW,
// horizons of 4 to 12 steps, mixed initial unit states. Every
// battery_every-th instance uses the battery case with a SoC on the grid.
inline std::vector<Instance> random_instances(std::size_t count, std::uint64_t seed,
                                              std::size_t battery_every = 5)
{
    static const Scenario wind = build_canonical_scenario(CaseVariation::A);
    static const Scenario battery = build_canonical_scenario(CaseVariation::B);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> demand(20.0, 60.0);
    std::uniform_real_distribution<double> wind_mw(0.0, 24.0);
    std::uniform_int_distribution<int> horizon(4, 12);
    std::uniform_int_distribution<int> status(0, 3);
    std::uniform_int_distribution<int> soc_level(0, 40);

    std::vector<Instance> out;
    for (std::size_t k = 0; k < count; ++k) {
        Instance in;
        const bool with_battery = battery_every > 0 && k % battery_every == battery_every - 1;
        in.scenario = with_battery ? battery : wind;
        for (std::size_t i = 0; i < in.scenario.gas_turbines.size(); ++i) {
            switch (status(rng)) {
            case 0:
                in.state.units.push_back({dispatch::UnitStatus::Off, 0.0});
                break;
            case 1:
                in.state.units.push_back({dispatch::UnitStatus::Starting, 5.0 * (1 + k % 5)});
                break;
            default:
                in.state.units.push_back({dispatch::UnitStatus::On, 0.0});
            }
        }
        if (with_battery) in.state.soc_mwh.push_back(0.1 * soc_level(rng));
        const int n = horizon(rng);
        for (int t = 0; t < n; ++t) {
            in.forecasts.push_back({demand(rng), wind_mw(rng), in.scenario.reserve_requirement_mw});
        }
        out.push_back(std::move(in));
    }
    return out;
}

} // namespace leogo::fixtures
