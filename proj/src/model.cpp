#include "leogo/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>

namespace leogo {

std::string_view to_string(CaseVariation c)
{
    switch (c) {
    case CaseVariation::Base: return "base";
    case CaseVariation::A: return "A";
    case CaseVariation::B: return "B";
    }
    return "?";
}

std::optional<CaseVariation> parse_case(std::string_view s)
{
    if (s == "base" || s == "Base" || s == "BASE") return CaseVariation::Base;
    if (s == "A" || s == "a") return CaseVariation::A;
    if (s == "B" || s == "b") return CaseVariation::B;
    return std::nullopt;
}

std::string_view to_string(BusSide s)
{
    return s == BusSide::A ? "A" : "B";
}

std::string_view to_string(LoadKind k)
{
    switch (k) {
    case LoadKind::InductionMotor: return "motor";
    case LoadKind::Vsd: return "vsd";
    case LoadKind::General: return "general";
    case LoadKind::DrillingDc: return "drilling_dc";
    }
    return "?";
}

void fit_fuel_curve(GasTurbineSpec& gt)
{
    const double p_full = gt.capacity_mw;
    const double p_low = 0.2 * gt.capacity_mw;
    const double fuel_full = p_full / gt.eff_full_load;
    const double fuel_low = p_low / gt.eff_at_20pct;
    gt.fuel_slope = (fuel_full - fuel_low) / (p_full - p_low);
    gt.fuel_intercept_mw = fuel_low - gt.fuel_slope * p_low;
}

std::vector<PowerCurvePoint> canonical_power_curve()
{
    return {
        {4.0, 0.0},  {5.0, 0.40}, {6.0, 0.84}, {7.0, 1.45},  {8.0, 2.25},
        {9.0, 3.25}, {10.0, 4.5}, {11.0, 6.0}, {12.0, 7.50}, {12.5, 8.0},
        {25.0, 8.0},
    };
}

BatterySpec make_battery(std::string tag, double power_mw, double energy_mwh,
                         double round_trip)
{
    BatterySpec b;
    b.tag = std::move(tag);
    b.power_capacity_mw = power_mw;
    b.energy_capacity_mwh = energy_mwh;
    b.round_trip_efficiency = round_trip;
    b.charge_efficiency = std::sqrt(round_trip);
    b.discharge_efficiency = std::sqrt(round_trip);
    return b;
}

namespace {

// Odd unit numbers go to side A, even to side B.
BusSide side_from_tag(std::string_view tag)
{
    if (tag.empty() || !std::isdigit(static_cast<unsigned char>(tag.back()))) {
        return BusSide::A;
    }
    return ((tag.back() - '0') % 2 == 1) ? BusSide::A : BusSide::B;
}

void add_group(std::vector<LoadSpec>& out, std::string_view prefix, int count,
               LoadSpec proto, const std::vector<double>& loadings)
{
    for (int i = 1; i <= count; ++i) {
        LoadSpec l = proto;
        l.tag = fmt::format("{}{}", prefix, i);
        l.description = fmt::format("{} {}", proto.description, i);
        l.nominal_mw = loadings.at(static_cast<std::size_t>(i - 1));
        l.side = side_from_tag(l.tag);
        out.push_back(std::move(l));
    }
}

std::vector<LoadSpec> canonical_loads()
{
    std::vector<LoadSpec> loads;

    LoadSpec motor;
    motor.kind = LoadKind::InductionMotor;

    LoadSpec swl = motor;
    swl.description = "Sea water lift pump";
    swl.capacity_mw = 0.75;
    swl.flow_dependent = true;
    swl.power_factor = 0.87;
    add_group(loads, "SWL", 3, swl, {0.45, 0.0, 0.0});

    LoadSpec aco = motor;
    aco.description = "Air compressor";
    aco.capacity_mw = 1.3;
    aco.power_factor = 0.9;
    add_group(loads, "ACO", 2, aco, {0.5, 0.5});

    LoadSpec vsd;
    vsd.kind = LoadKind::Vsd;
    vsd.flow_dependent = true;
    vsd.power_factor = 1.0;

    LoadSpec gex = vsd;
    gex.description = "Gas export compressor";
    gex.capacity_mw = 8.2;
    add_group(loads, "GEX", 3, gex, {8.07, 8.07, 8.07});

    LoadSpec oex = vsd;
    oex.description = "Oil export pump";
    oex.capacity_mw = 1.5;
    add_group(loads, "OEX", 2, oex, {0.39, 0.39});

    LoadSpec win = vsd;
    win.description = "Water injection pump";
    win.capacity_mw = 4.8;
    add_group(loads, "WIN", 3, win, {3.0, 3.0, 3.0});

    LoadSpec rec = vsd;
    rec.description = "Gas re-compressor";
    rec.capacity_mw = 1.5;
    add_group(loads, "REC", 3, rec, {1.27, 1.27, 1.27});

    LoadSpec asm_ = motor;
    asm_.description = "Utility ASM 690 V";
    asm_.capacity_mw = 0.25;
    asm_.power_factor = 0.92;
    asm_.voltage_kv = 0.69;
    add_group(loads, "ASM", 2, asm_, {0.2, 0.2});

    LoadSpec lod690;
    lod690.kind = LoadKind::General;
    lod690.description = "Utility load 690 V";
    lod690.capacity_mw = 2.75;
    lod690.power_factor = 0.9;
    lod690.zip = {0.60, 0.28, 0.04, 0.08};
    lod690.voltage_kv = 0.69;
    add_group(loads, "LOD", 2, lod690, {1.05, 1.05});

    LoadSpec lod400 = lod690;
    lod400.description = "Utility load 400 V";
    lod400.capacity_mw = 0.5;
    lod400.power_factor = 0.98;
    lod400.zip = {0.10, 0.36, 0.09, 0.45};
    lod400.voltage_kv = 0.4;
    {
        std::vector<LoadSpec> tmp;
        add_group(tmp, "LOD", 4, lod400, {0.0, 0.0, 0.25, 0.25});
        loads.push_back(tmp[2]);
        loads.push_back(tmp[3]);
    }

    LoadSpec drill;
    drill.kind = LoadKind::DrillingDc;
    drill.description = "Drill";
    drill.capacity_mw = 0.8;
    drill.power_factor = 1.0;
    add_group(loads, "DRL", 6, drill, {0, 0, 0, 0, 0, 0});

    return loads;
}

} // namespace

Scenario build_canonical_scenario(CaseVariation c)
{
    Scenario s;
    s.case_variation = c;
    s.name = fmt::format("LEOGO {}", c == CaseVariation::Base ? "base case"
                                                              : fmt::format("variation {}", to_string(c)));

    for (int i = 1; i <= 3; ++i) {
        GasTurbineSpec gt;
        gt.tag = fmt::format("GT{}", i);
        gt.side = side_from_tag(gt.tag);
        fit_fuel_curve(gt);
        s.gas_turbines.push_back(gt);
    }

    if (c == CaseVariation::A || c == CaseVariation::B) {
        for (int i = 1; i <= 3; ++i) {
            WindTurbineSpec wt;
            wt.tag = fmt::format("WT{}", i);
            wt.side = side_from_tag(wt.tag);
            wt.power_curve = canonical_power_curve();
            s.wind_turbines.push_back(wt);
        }
    }
    if (c == CaseVariation::B) {
        s.batteries.push_back(make_battery("BAT1", 4.0, 4.0, 0.9));
    }

    s.loads = canonical_loads();

    s.pumps.push_back({"water_injection", 0.75, 0.7e6, 25e6, 0.277});
    s.pumps.push_back({"oil_export", 0.6, 0.3e6, 5e6, 0.098});
    s.compressors.push_back({"gas_export", 0.75, 2e6, 20e6, 68.3, 300.0});
    s.compressors.push_back({"re_compression", 0.75, 1.3e6, 2e6, 70.8, 300.0});
    return s;
}

const LoadSpec* Scenario::find_load(std::string_view tag) const
{
    auto it = std::find_if(loads.begin(), loads.end(),
                           [&](const LoadSpec& l) { return l.tag == tag; });
    return it == loads.end() ? nullptr : &*it;
}

LoadSpec* Scenario::find_load(std::string_view tag)
{
    auto it = std::find_if(loads.begin(), loads.end(),
                           [&](const LoadSpec& l) { return l.tag == tag; });
    return it == loads.end() ? nullptr : &*it;
}

const GasTurbineSpec* Scenario::find_gas_turbine(std::string_view tag) const
{
    auto it = std::find_if(gas_turbines.begin(), gas_turbines.end(),
                           [&](const GasTurbineSpec& g) { return g.tag == tag; });
    return it == gas_turbines.end() ? nullptr : &*it;
}

const PumpSpec* Scenario::find_pump(std::string_view tag) const
{
    auto it = std::find_if(pumps.begin(), pumps.end(),
                           [&](const PumpSpec& p) { return p.tag == tag; });
    return it == pumps.end() ? nullptr : &*it;
}

const CompressorSpec* Scenario::find_compressor(std::string_view tag) const
{
    auto it = std::find_if(compressors.begin(), compressors.end(),
                           [&](const CompressorSpec& p) { return p.tag == tag; });
    return it == compressors.end() ? nullptr : &*it;
}

double Scenario::wind_capacity_mw() const
{
    double sum = 0.0;
    for (const auto& w : wind_turbines) sum += w.capacity_mw;
    return sum;
}

namespace {

class Checker {
public:
    explicit Checker(std::vector<Violation>& out) : out_(out) {}

    void require(bool ok, std::string field, std::string message)
    {
        if (!ok) out_.push_back({std::move(field), std::move(message)});
    }

private:
    std::vector<Violation>& out_;
};

bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace

std::vector<Violation> validate(const Scenario& s)
{
    std::vector<Violation> out;
    Checker c(out);

    const auto& f = s.fluid;
    c.require(f.gas_compressibility > 0.0 && f.gas_compressibility <= 1.2,
              "fluid.gas_compressibility", "0 < Z <= 1.2");
    c.require(f.gas_heat_capacity_ratio > 1.0, "fluid.gas_heat_capacity_ratio", "k > 1");
    for (auto [name, v] : {std::pair{"gas_energy_value", f.gas_energy_value_mj_per_sm3},
                           {"gas_individual_constant", f.gas_individual_constant_j_per_kg_k},
                           {"gas_gravity", f.gas_gravity},
                           {"gas_density", f.gas_density_kg_per_sm3},
                           {"oil_density", f.oil_density_kg_per_m3},
                           {"oil_viscosity", f.oil_viscosity_kg_per_m_s},
                           {"oil_darcy_friction", f.oil_darcy_friction},
                           {"water_density", f.water_density_kg_per_m3},
                           {"water_darcy_friction", f.water_darcy_friction}}) {
        c.require(v > 0.0, fmt::format("fluid.{}", name), "must be strictly positive");
    }

    const auto& fs = s.field;
    c.require(fs.water_cut >= 0.0 && fs.water_cut <= 1.0, "field.water_cut",
              "water_cut must lie in [0, 1]");
    c.require(fs.oil_rate_sm3_per_day >= 0.0, "field.oil_rate", "rate must be >= 0");
    c.require(fs.gas_rate_sm3_per_day >= 0.0, "field.gas_rate", "rate must be >= 0");
    c.require(fs.water_rate_sm3_per_day >= 0.0, "field.water_rate", "rate must be >= 0");
    c.require(fs.gas_export_pressure_mpa > fs.separator_inlet_pressure_mpa,
              "field.gas_export_pressure", "gas_export_pressure > separator_inlet_pressure");
    c.require(fs.co2_content_kg_per_sm3 > 0.0, "field.co2_content", "must be strictly positive");

    for (const auto& gt : s.gas_turbines) {
        const std::string p = fmt::format("gas_turbines.{}", gt.tag);
        c.require(gt.min_load_mw < gt.capacity_mw, p + ".min_load", "min_load < capacity");
        c.require(gt.min_load_mw >= 0.0, p + ".min_load", "min_load >= 0");
        c.require(gt.eff_at_20pct > 0.0 && gt.eff_at_20pct < gt.eff_full_load &&
                      gt.eff_full_load < 1.0,
                  p + ".efficiency", "0 < eff_at_20pct < eff_full_load < 1");
        c.require(gt.fuel_intercept_mw > 0.0, p + ".fuel_curve_intercept", "A > 0");
        c.require(gt.fuel_slope > 1.0, p + ".fuel_curve_slope", "B > 1");
        const double full = gt.capacity_mw;
        const double low = 0.2 * gt.capacity_mw;
        const bool consistent =
            rel_close(gt.fuel_intercept_mw + gt.fuel_slope * full, full / gt.eff_full_load, 1e-9) &&
            rel_close(gt.fuel_intercept_mw + gt.fuel_slope * low, low / gt.eff_at_20pct, 1e-9);
        c.require(consistent, p + ".fuel_curve",
                  "fuel curve must pass through both efficiency endpoints within 1e-9");
        c.require(gt.heat_recovery_fraction >= 0.0 && gt.heat_recovery_fraction <= 1.0,
                  p + ".heat_recovery_fraction", "kappa must lie in [0, 1]");
        c.require(gt.inertia_h_s > 0.0 && gt.droop > 0.0 && gt.governor_time_constant_s > 0.0,
                  p + ".dynamics", "H, droop and governor time constant must be positive");
        c.require(gt.rated_mva >= gt.capacity_mw, p + ".rated_mva", "rated_mva >= capacity");
    }

    for (const auto& wt : s.wind_turbines) {
        const std::string p = fmt::format("wind_turbines.{}.power_curve", wt.tag);
        bool ok = !wt.power_curve.empty();
        bool plateau = false;
        for (std::size_t i = 0; i < wt.power_curve.size(); ++i) {
            const auto& pt = wt.power_curve[i];
            ok = ok && pt.power_mw >= 0.0 && pt.power_mw <= wt.capacity_mw + 1e-12;
            if (i > 0) ok = ok && pt.wind_speed_mps > wt.power_curve[i - 1].wind_speed_mps;
            if (pt.wind_speed_mps < wt.cut_in_mps) ok = ok && pt.power_mw == 0.0;
            if (pt.wind_speed_mps >= wt.rated_speed_mps && pt.wind_speed_mps <= wt.cut_out_mps) {
                ok = ok && pt.power_mw == wt.capacity_mw;
                plateau = true;
            }
        }
        c.require(ok && plateau, p,
                  "curve must be non-negative, zero below cut-in and equal capacity on the plateau");
        c.require(wt.cut_in_mps < wt.rated_speed_mps && wt.rated_speed_mps < wt.cut_out_mps,
                  fmt::format("wind_turbines.{}.speeds", wt.tag), "cut_in < rated < cut_out");
    }

    for (const auto& b : s.batteries) {
        const std::string p = fmt::format("batteries.{}", b.tag);
        c.require(b.round_trip_efficiency > 0.0 && b.round_trip_efficiency <= 1.0,
                  p + ".round_trip_efficiency", "0 < round_trip_efficiency <= 1");
        c.require(rel_close(b.charge_efficiency * b.discharge_efficiency,
                            b.round_trip_efficiency, 1e-9),
                  p + ".efficiency_split", "charge * discharge efficiency = round trip");
        c.require(b.power_capacity_mw > 0.0 && b.energy_capacity_mwh > 0.0, p + ".capacity",
                  "power and energy capacity must be positive");
    }

    for (const auto& l : s.loads) {
        const std::string p = fmt::format("loads.{}", l.tag);
        c.require(l.nominal_mw >= 0.0 && l.nominal_mw <= l.capacity_mw, p + ".nominal_load",
                  "0 <= nominal_load <= capacity");
        c.require(std::abs(l.zip.sum() - 1.0) <= 1e-9, p + ".zip_composition",
                  "zip fractions must sum to 1");
        c.require(l.power_factor > 0.0 && l.power_factor <= 1.0, p + ".power_factor",
                  "0 < power_factor <= 1");
    }

    for (const auto& pm : s.pumps) {
        const std::string p = fmt::format("pumps.{}", pm.tag);
        c.require(pm.efficiency > 0.0 && pm.efficiency <= 1.0, p + ".efficiency", "0 < eta <= 1");
        c.require(pm.outlet_pa > pm.inlet_pa && pm.inlet_pa >= 0.0, p + ".pressure",
                  "p2 > p1 >= 0");
        c.require(pm.nominal_flow_sm3ps >= 0.0, p + ".nominal_flow", "q >= 0");
    }
    for (const auto& cp : s.compressors) {
        const std::string p = fmt::format("compressors.{}", cp.tag);
        c.require(cp.efficiency > 0.0 && cp.efficiency <= 1.0, p + ".efficiency", "0 < eta <= 1");
        c.require(cp.outlet_pa > cp.inlet_pa && cp.inlet_pa >= 0.0, p + ".pressure",
                  "p2 > p1 >= 0");
        c.require(cp.nominal_flow_sm3ps >= 0.0, p + ".nominal_flow", "q >= 0");
        c.require(cp.inlet_temperature_k > 0.0, p + ".inlet_temperature", "T > 0");
    }

    c.require(s.reserve_requirement_mw >= 0.0, "reserve_requirement", "must be >= 0");
    c.require(!s.gas_turbines.empty() || !s.wind_turbines.empty(), "devices",
              "scenario needs at least one generator");
    return out;
}

std::vector<Violation> consistency_notes(const Scenario& s)
{
    std::vector<Violation> notes;
    if (const auto* oex = s.find_pump("oil_export")) {
        const double field_q = s.field.oil_rate_sm3_per_day / 86400.0;
        const double dev = (field_q - oex->nominal_flow_sm3ps) / oex->nominal_flow_sm3ps;
        if (std::abs(dev) > 1e-3) {
            notes.push_back({"pumps.oil_export.nominal_flow",
                             fmt::format("field oil rate {:.4f} Sm3/s differs from export pump "
                                         "flow {:.4f} Sm3/s by {:.1f} %",
                                         field_q, oex->nominal_flow_sm3ps, 100.0 * dev)});
        }
    }
    return notes;
}

double total_nominal_demand(const Scenario& s, DemandTerms terms)
{
    double sum = 0.0;
    for (const auto& l : s.loads) sum += l.nominal_mw;
    // Deviation and losses only exist while something draws power.
    if (terms == DemandTerms::WithDeviationAndLosses && sum > 0.0) {
        sum += s.consumption_deviation_mw + s.loss_allowance_mw;
    }
    return sum;
}

} // namespace leogo
