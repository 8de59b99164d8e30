#pragma once

#include "leogo/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leogo {

struct TimeGrid {
    std::int64_t start_epoch_s = 0;
    double step_s = 60.0;
    std::size_t length = 0;

    double time_s(std::size_t i) const { return step_s * static_cast<double>(i); }
};

/// Channels on a common fixed grid. A channel may be empty when the source
/// did not provide it; a non-empty channel always has grid.length values.
struct TimeSeriesSet {
    TimeGrid grid;
    std::vector<double> demand_multiplier;
    std::vector<double> wind_speed;      // m/s
    std::vector<double> wind_power_norm; // fraction of installed capacity
    std::vector<double> wind_forecast;   // fraction
    std::vector<double> wind_nowcast;    // fraction

    std::size_t size() const { return grid.length; }
};

} // namespace leogo

namespace leogo::profiles {

/// Parse failure; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MonotonicityError : public ParseError {
public:
    using ParseError::ParseError;
};

inline constexpr const char* kCsvHeader =
    "time_iso8601,wind_speed_mps,wind_power_norm,demand_norm,wind_forecast_norm,"
    "wind_nowcast_norm";

/// Reads the profile CSV. When target_step_s > 0 the channels are resampled
/// to that step (mean when coarsening, linear interpolation when refining).
TimeSeriesSet ingest_csv(std::istream& in, double target_step_s = 0.0);
TimeSeriesSet ingest_csv_file(const std::string& path, double target_step_s = 0.0);

/// Writes every non-empty channel in the ingest_csv schema.
void write_csv(std::ostream& out, const TimeSeriesSet& ts);

std::string format_iso8601(std::int64_t epoch_s);
std::int64_t parse_iso8601(std::string_view text);

/// Mean over aligned windows; to_step must be an integer multiple of from_step.
std::vector<double> downsample_mean(std::span<const double> values, double from_step_s,
                                    double to_step_s);
/// Linear interpolation onto a finer grid; from_step must be a multiple of to_step.
std::vector<double> upsample_linear(std::span<const double> values, double from_step_s,
                                    double to_step_s);
TimeSeriesSet resample(const TimeSeriesSet& ts, double target_step_s);

/// m(t) = 1 + amplitude * sin(2 pi t / period), sampled at k * step.
std::vector<double> synth_demand_multiplier(double duration_s, double step_s,
                                            double amplitude = 0.04, double period_s = 25.0 * 60.0);

/// Synthetic measured wind speed at step_s resolution: a slow mean-reverting
/// weather component plus fast turbulence, seeded and deterministic.
std::vector<double> synth_wind_speed(double duration_s, double step_s, std::uint64_t seed);

struct ForecastChannels {
    std::vector<double> forecast_mps;
    std::vector<double> nowcast_mps;
};

/// Block-mean resampling to block_s with seeded Gaussian noise per block, held
/// constant within the block. The nowcast reuses the same draws scaled by
/// nowcast_ratio, so its error never exceeds the forecast error.
ForecastChannels synth_wind_forecast(std::span<const double> wind_speed_mps, double step_s,
                                     double block_s, double noise_sigma_mps, std::uint64_t seed,
                                     double nowcast_ratio = 0.3);

double rmse(std::span<const double> a, std::span<const double> b);

/// Bisection on the noise standard deviation so the forecast RMSE against
/// the input series matches target_rmse.
double calibrate_forecast_sigma(std::span<const double> wind_speed_mps, double step_s,
                                double block_s, double target_rmse, std::uint64_t seed);

/// Pointwise power curve divided by capacity.
std::vector<double> wind_power_channel(std::span<const double> wind_speed_mps,
                                       const WindTurbineSpec& spec);

inline constexpr std::int64_t kCanonicalStartEpoch = 1583020800; // 2020-03-01T00:00:00Z

/// Reference one-minute data set: synthetic wind, its forecast and nowcast,
/// and the demand multiplier, all driven by the scenario's profile settings.
TimeSeriesSet canonical_profiles(const Scenario& scenario, double duration_min);

} // namespace leogo::profiles
