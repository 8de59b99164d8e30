#include "leogo/profiles.hpp"
#include "leogo/physics.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace leogo::profiles {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line)
{
}

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& v)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    return ec == std::errc() && ptr == end;
}

std::size_t ratio_of(double coarse, double fine)
{
    const double r = coarse / fine;
    const double rounded = std::round(r);
    if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * rounded) return 0;
    return static_cast<std::size_t>(rounded);
}

enum class Column { Time, WindSpeed, WindPower, Demand, Forecast, Nowcast };

std::vector<double>& channel(TimeSeriesSet& ts, Column c)
{
    switch (c) {
    case Column::WindSpeed: return ts.wind_speed;
    case Column::WindPower: return ts.wind_power_norm;
    case Column::Demand: return ts.demand_multiplier;
    case Column::Forecast: return ts.wind_forecast;
    case Column::Nowcast: return ts.wind_nowcast;
    case Column::Time: break;
    }
    throw std::logic_error("time column has no channel");
}

} // namespace

std::int64_t parse_iso8601(std::string_view text)
{
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    const std::string s(text);
    char tail = 0;
    const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec,
                              &tail);
    if (n < 6 || (n == 7 && tail != 'Z') || s.size() > 20) {
        throw ParseError(0, fmt::format("bad ISO-8601 timestamp '{}'", text));
    }
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = sec;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_iso8601(std::int64_t epoch_s)
{
    const std::time_t t = static_cast<std::time_t>(epoch_s);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", tm.tm_year + 1900,
                       tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

TimeSeriesSet ingest_csv(std::istream& in, double target_step_s)
{
    std::string line;
    std::size_t line_no = 0;
    // Skip a UTF-8 byte order mark and blank lines before the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(line_no, "missing header");

    std::vector<Column> columns;
    for (auto name : split(line)) {
        if (name == "time_iso8601") columns.push_back(Column::Time);
        else if (name == "wind_speed_mps") columns.push_back(Column::WindSpeed);
        else if (name == "wind_power_norm") columns.push_back(Column::WindPower);
        else if (name == "demand_norm") columns.push_back(Column::Demand);
        else if (name == "wind_forecast_norm") columns.push_back(Column::Forecast);
        else if (name == "wind_nowcast_norm") columns.push_back(Column::Nowcast);
        else throw ParseError(line_no, fmt::format("unknown column '{}'", name));
    }
    if (columns.empty() || columns.front() != Column::Time) {
        throw ParseError(line_no, "first column must be time_iso8601");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i + 1; j < columns.size(); ++j) {
            if (columns[i] == columns[j]) throw ParseError(line_no, "duplicate column");
        }
    }

    TimeSeriesSet ts;
    std::vector<std::int64_t> times;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != columns.size()) {
            throw ParseError(line_no, fmt::format("expected {} fields, found {}", columns.size(),
                                                  cells.size()));
        }
        std::int64_t t = 0;
        try {
            t = parse_iso8601(cells[0]);
        } catch (const ParseError& e) {
            throw ParseError(line_no, e.what());
        }
        if (!times.empty() && t <= times.back()) {
            throw MonotonicityError(line_no, fmt::format("timestamp {} does not increase",
                                                         cells[0]));
        }
        times.push_back(t);
        for (std::size_t c = 1; c < columns.size(); ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v) || !std::isfinite(v)) {
                throw ParseError(line_no, fmt::format("bad number '{}'", cells[c]));
            }
            const bool fraction = columns[c] == Column::WindPower ||
                                  columns[c] == Column::Forecast || columns[c] == Column::Nowcast;
            if (fraction && (v < 0.0 || v > 1.0)) {
                throw ParseError(line_no, fmt::format("wind fraction {} outside [0, 1]", v));
            }
            if (columns[c] == Column::WindSpeed && v < 0.0) {
                throw ParseError(line_no, "negative wind speed");
            }
            if (columns[c] == Column::Demand && !(v > 0.0)) {
                throw ParseError(line_no, "demand multiplier must be positive");
            }
            channel(ts, columns[c]).push_back(v);
        }
    }
    if (times.empty()) throw ParseError(line_no, "no data rows");

    ts.grid.start_epoch_s = times.front();
    ts.grid.length = times.size();
    ts.grid.step_s = times.size() > 1 ? static_cast<double>(times[1] - times[0]) : 60.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (static_cast<double>(times[i] - times[i - 1]) != ts.grid.step_s) {
            throw ParseError(i + 2, "timestamps are not on a fixed step");
        }
    }
    if (target_step_s > 0.0 && target_step_s != ts.grid.step_s) {
        return resample(ts, target_step_s);
    }
    return ts;
}

TimeSeriesSet ingest_csv_file(const std::string& path, double target_step_s)
{
    std::ifstream in(path);
    if (!in) throw ParseError(0, fmt::format("cannot open '{}'", path));
    return ingest_csv(in, target_step_s);
}

void write_csv(std::ostream& out, const TimeSeriesSet& ts)
{
    struct Col {
        const char* name;
        const std::vector<double>* data;
    };
    const Col all[] = {{"wind_speed_mps", &ts.wind_speed},
                       {"wind_power_norm", &ts.wind_power_norm},
                       {"demand_norm", &ts.demand_multiplier},
                       {"wind_forecast_norm", &ts.wind_forecast},
                       {"wind_nowcast_norm", &ts.wind_nowcast}};
    std::vector<Col> cols;
    for (const auto& c : all) {
        if (!c.data->empty()) cols.push_back(c);
    }
    out << "time_iso8601";
    for (const auto& c : cols) out << ',' << c.name;
    out << '\n';
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out << format_iso8601(ts.grid.start_epoch_s +
                              static_cast<std::int64_t>(std::llround(ts.grid.time_s(i))));
        for (const auto& c : cols) out << fmt::format(",{:.6f}", (*c.data)[i]);
        out << '\n';
    }
}

std::vector<double> downsample_mean(std::span<const double> values, double from_step_s,
                                    double to_step_s)
{
    const std::size_t k = ratio_of(to_step_s, from_step_s);
    if (k == 0) throw std::invalid_argument("downsample_mean: step is not an integer multiple");
    std::vector<double> out;
    out.reserve(values.size() / k);
    for (std::size_t i = 0; i + k <= values.size(); i += k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += values[i + j];
        out.push_back(sum / static_cast<double>(k));
    }
    return out;
}

std::vector<double> upsample_linear(std::span<const double> values, double from_step_s,
                                    double to_step_s)
{
    const std::size_t k = ratio_of(from_step_s, to_step_s);
    if (k == 0) throw std::invalid_argument("upsample_linear: step is not an integer divisor");
    if (values.empty()) return {};
    std::vector<double> out;
    out.reserve((values.size() - 1) * k + 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double w = static_cast<double>(j) / static_cast<double>(k);
            out.push_back(values[i] + w * (values[i + 1] - values[i]));
        }
    }
    out.push_back(values.back());
    return out;
}

TimeSeriesSet resample(const TimeSeriesSet& ts, double target_step_s)
{
    if (target_step_s == ts.grid.step_s) return ts;
    const bool coarsen = target_step_s > ts.grid.step_s;
    auto apply = [&](const std::vector<double>& v) {
        if (v.empty()) return std::vector<double>{};
        return coarsen ? downsample_mean(v, ts.grid.step_s, target_step_s)
                       : upsample_linear(v, ts.grid.step_s, target_step_s);
    };
    TimeSeriesSet out;
    out.grid.start_epoch_s = ts.grid.start_epoch_s;
    out.grid.step_s = target_step_s;
    out.demand_multiplier = apply(ts.demand_multiplier);
    out.wind_speed = apply(ts.wind_speed);
    out.wind_power_norm = apply(ts.wind_power_norm);
    out.wind_forecast = apply(ts.wind_forecast);
    out.wind_nowcast = apply(ts.wind_nowcast);
    if (coarsen) {
        out.grid.length = ts.size() / ratio_of(target_step_s, ts.grid.step_s);
    } else {
        out.grid.length = ts.size() == 0 ? 0
                                         : (ts.size() - 1) * ratio_of(ts.grid.step_s, target_step_s) + 1;
    }
    return out;
}

std::vector<double> synth_demand_multiplier(double duration_s, double step_s, double amplitude,
                                            double period_s)
{
    const std::size_t n = ratio_of(duration_s, step_s);
    if (duration_s != 0.0 && n == 0) {
        throw std::invalid_argument("synth_demand_multiplier: step must divide duration");
    }
    std::vector<double> m(duration_s == 0.0 ? 0 : n);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double t = step_s * static_cast<double>(i);
        m[i] = 1.0 + amplitude * std::sin(2.0 * kPi * t / period_s);
    }
    return m;
}

std::vector<double> synth_wind_speed(double duration_s, double step_s, std::uint64_t seed)
{
    // Two Ornstein-Uhlenbeck processes, sampled exactly at step_s.
    constexpr double kMean = 9.0;
    constexpr double kSlowSigma = 3.6;
    constexpr double kSlowTau = 5.0 * 3600.0;
    constexpr double kFastSigma = 0.8;
    constexpr double kFastTau = 120.0;

    const auto n = static_cast<std::size_t>(std::floor(duration_s / step_s + 1e-9));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double a_slow = std::exp(-step_s / kSlowTau);
    const double a_fast = std::exp(-step_s / kFastTau);
    const double s_slow = kSlowSigma * std::sqrt(1.0 - a_slow * a_slow);
    const double s_fast = kFastSigma * std::sqrt(1.0 - a_fast * a_fast);

    double slow = kSlowSigma * normal(rng);
    double fast = kFastSigma * normal(rng);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::max(0.0, kMean + slow + fast);
        slow = a_slow * slow + s_slow * normal(rng);
        fast = a_fast * fast + s_fast * normal(rng);
    }
    return v;
}

ForecastChannels synth_wind_forecast(std::span<const double> wind_speed_mps, double step_s,
                                     double block_s, double noise_sigma_mps, std::uint64_t seed,
                                     double nowcast_ratio)
{
    const std::size_t k = ratio_of(block_s, step_s);
    if (k == 0) throw std::invalid_argument("synth_wind_forecast: block must be a multiple of step");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    ForecastChannels out;
    out.forecast_mps.resize(wind_speed_mps.size());
    out.nowcast_mps.resize(wind_speed_mps.size());
    for (std::size_t start = 0; start < wind_speed_mps.size(); start += k) {
        const std::size_t end = std::min(start + k, wind_speed_mps.size());
        double mean = 0.0;
        for (std::size_t i = start; i < end; ++i) mean += wind_speed_mps[i];
        mean /= static_cast<double>(end - start);
        const double z = normal(rng);
        const double fc = std::max(0.0, mean + noise_sigma_mps * z);
        const double nc = std::max(0.0, mean + nowcast_ratio * noise_sigma_mps * z);
        for (std::size_t i = start; i < end; ++i) {
            out.forecast_mps[i] = fc;
            out.nowcast_mps[i] = nc;
        }
    }
    return out;
}

double rmse(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum / static_cast<double>(a.size()));
}

double calibrate_forecast_sigma(std::span<const double> wind_speed_mps, double step_s,
                                double block_s, double target_rmse, std::uint64_t seed)
{
    auto error_at = [&](double sigma) {
        const auto fc = synth_wind_forecast(wind_speed_mps, step_s, block_s, sigma, seed);
        return rmse(fc.forecast_mps, wind_speed_mps);
    };
    double lo = 0.0;
    double hi = 2.0 * target_rmse + 1.0;
    if (error_at(lo) >= target_rmse) return 0.0;
    while (error_at(hi) < target_rmse) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (error_at(mid) < target_rmse ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> wind_power_channel(std::span<const double> wind_speed_mps,
                                       const WindTurbineSpec& spec)
{
    std::vector<double> out(wind_speed_mps.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = physics::wind_power(wind_speed_mps[i], spec) / spec.capacity_mw;
    }
    return out;
}

TimeSeriesSet canonical_profiles(const Scenario& scenario, double duration_min)
{
    const auto& cfg = scenario.profiles;
    const double step_s = 60.0;
    const double duration_s = duration_min * 60.0;

    WindTurbineSpec reference;
    reference.power_curve = canonical_power_curve();
    const WindTurbineSpec& wt =
        scenario.wind_turbines.empty() ? reference : scenario.wind_turbines.front();

    TimeSeriesSet ts;
    ts.grid.start_epoch_s = kCanonicalStartEpoch;
    ts.grid.step_s = step_s;
    ts.wind_speed = synth_wind_speed(duration_s, step_s, cfg.seed);
    ts.grid.length = ts.wind_speed.size();
    ts.demand_multiplier = synth_demand_multiplier(static_cast<double>(ts.grid.length) * step_s,
                                                   step_s, cfg.demand_amplitude,
                                                   cfg.demand_period_min * 60.0);
    ts.wind_power_norm = wind_power_channel(ts.wind_speed, wt);
    const auto fc = synth_wind_forecast(ts.wind_speed, step_s, cfg.forecast_block_min * 60.0,
                                        cfg.forecast_noise_sigma_mps, cfg.seed + 1,
                                        cfg.nowcast_ratio);
    ts.wind_forecast = wind_power_channel(fc.forecast_mps, wt);
    ts.wind_nowcast = wind_power_channel(fc.nowcast_mps, wt);
    return ts;
}

} // namespace leogo::profiles
