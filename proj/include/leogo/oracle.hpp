#pragma once

#include "leogo/dispatch.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

// Slow, independent reference implementations used by the test suites.
namespace leogo::oracle {

class GuardError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxHorizon = 12;
inline constexpr std::size_t kMaxTurbines = 3;

struct OraclePlan {
    double objective = 0.0;
    std::vector<std::vector<dispatch::UnitStatus>> status; ///< per step, per unit
    std::vector<double> soc_mwh;                           ///< per step, end of step
    std::vector<int> starts;                               ///< per step
};

/// Exhaustive backward dynamic program over every unit-state combination and
/// state-of-charge level. Each stage is priced by a generic linear program
/// solved by vertex enumeration, so no dispatch shortcut is shared with the
/// planner. Throws GuardError beyond kMaxHorizon steps or kMaxTurbines units.
OraclePlan brute_force_plan(const Scenario& s, const dispatch::CommitmentState& state,
                            std::span<const dispatch::StepInput> forecasts,
                            const dispatch::DispatchOptions& opt);

/// Minimum of sum c_j x_j subject to one equality row, one "greater or equal"
/// row and box bounds, by enumerating basic solutions. Bounds may be infinite
/// on the upper side only.
struct SmallLp {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> eq_row;
    double eq_rhs = 0.0;
    std::vector<double> ge_row;
    double ge_rhs = 0.0;
};

struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

LpResult solve_small_lp(const SmallLp& lp);

struct DerivativeCheck {
    double numeric = 0.0;
    double relative_error = 0.0;
    double step = 0.0;
};

/// Central-difference derivative of f at x compared with analytic. A step
/// that is non-positive or too small to resolve falls back to the best of
/// three automatically scaled steps, each refined by Richardson extrapolation.
DerivativeCheck finite_difference_check(const std::function<double(double)>& f, double x,
                                        double step, double analytic);

} // namespace leogo::oracle
