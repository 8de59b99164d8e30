#include "leogo/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <numeric>
#include <ostream>

namespace leogo::network {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;

double base_current_a(double base_mva, double kv)
{
    return base_mva * 1e3 / (std::sqrt(3.0) * kv);
}

} // namespace

const CableType& cable_33kv_240()
{
    static const CableType c{"33kV 3x240", 33.0, 0.098, 0.12, 0.25, 489.0};
    return c;
}

const CableType& cable_11kv_120()
{
    static const CableType c{"11kV 3x120", 11.0, 0.196, 0.112, 0.34, 360.0};
    return c;
}

const CableType& cable_11kv_240()
{
    static const CableType c{"11kV 3x240", 11.0, 0.0977, 0.102, 0.44, 520.0};
    return c;
}

std::string_view to_string(BranchKind k)
{
    switch (k) {
    case BranchKind::Cable: return "cable";
    case BranchKind::Transformer: return "transformer";
    case BranchKind::Switch: return "switch";
    }
    return "?";
}

std::size_t GridModel::bus_index(std::string_view id) const
{
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return i;
    }
    throw std::out_of_range(fmt::format("unknown bus {}", id));
}

std::size_t GridModel::branch_index(std::string_view id) const
{
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (branches[i].id == id) return i;
    }
    throw std::out_of_range(fmt::format("unknown branch {}", id));
}

namespace {

class GridBuilder {
public:
    GridBuilder(double base_mva, double frequency_hz) : f_(frequency_hz) { g_.base_mva = base_mva; }

    std::size_t bus(const std::string& id, double kv, BusSide side)
    {
        for (std::size_t i = 0; i < g_.buses.size(); ++i) {
            if (g_.buses[i].id == id) return i;
        }
        g_.buses.push_back({id, kv, side});
        return g_.buses.size() - 1;
    }

    void cable(const std::string& id, std::size_t from, std::size_t to, const CableType& t,
               double length_m, int parallel = 1)
    {
        const double kv = g_.buses[from].kv;
        const double zbase = kv * kv / g_.base_mva;
        const double km = length_m / 1000.0;
        Branch b;
        b.id = id;
        b.kind = BranchKind::Cable;
        b.from = from;
        b.to = to;
        b.r_pu = t.r_ohm_per_km * km / zbase;
        b.x_pu = t.x_ohm_per_km * km / zbase;
        b.b_pu = 2.0 * kPi * f_ * t.c_uf_per_km * 1e-6 * km * zbase;
        b.parallel = parallel;
        b.rated_a = t.rated_a;
        b.type = t.name;
        g_.branches.push_back(b);
    }

    void transformer(const std::string& id, std::size_t hv, std::size_t lv, double rated_mva,
                     double uk, double load_losses, const std::string& vector_group)
    {
        Branch b;
        b.id = id;
        b.kind = BranchKind::Transformer;
        b.from = hv;
        b.to = lv;
        const double z = uk * g_.base_mva / rated_mva;
        b.r_pu = load_losses * g_.base_mva / rated_mva;
        b.x_pu = std::sqrt(z * z - b.r_pu * b.r_pu);
        b.rated_mva = rated_mva;
        b.type = vector_group;
        g_.branches.push_back(b);
    }

    void tie(const std::string& id, std::size_t a, std::size_t b, bool closed)
    {
        Branch br;
        br.id = id;
        br.kind = BranchKind::Switch;
        br.from = a;
        br.to = b;
        br.closed = closed;
        g_.branches.push_back(br);
    }

    GridModel& grid() { return g_; }

private:
    GridModel g_;
    double f_;
};

const char* side_suffix(BusSide s) { return s == BusSide::A ? "A" : "B"; }

// Smallest 11 kV cable that carries the drive at rated power.
const CableType& feeder_for(const LoadSpec& l)
{
    const double pf = l.power_factor > 0.0 ? l.power_factor : 1.0;
    const double amps = l.capacity_mw / pf * 1e3 / (std::sqrt(3.0) * 11.0);
    return amps <= cable_11kv_120().rated_a ? cable_11kv_120() : cable_11kv_240();
}

GridLoad grid_load(const LoadSpec& l, std::size_t bus, double converter_efficiency)
{
    GridLoad gl;
    gl.tag = l.tag;
    gl.bus = bus;
    gl.p_mw = l.nominal_mw;
    gl.flow_dependent = l.flow_dependent;
    const double pf = std::clamp(l.power_factor, 1e-6, 1.0);
    const double tan_phi = std::sqrt(1.0 - pf * pf) / pf;
    switch (l.kind) {
    case LoadKind::InductionMotor:
        gl.model = LoadModel::ConstantPq;
        gl.q_mvar = l.nominal_mw * tan_phi;
        break;
    case LoadKind::Vsd:
    case LoadKind::DrillingDc:
        gl.model = LoadModel::Converter;
        gl.efficiency = converter_efficiency;
        break;
    case LoadKind::General: {
        gl.model = LoadModel::Zip;
        gl.q_mvar = l.nominal_mw * tan_phi;
        const double sum = l.zip.sum() > 0.0 ? l.zip.sum() : 1.0;
        gl.share_p = (l.zip.motor + l.zip.constant_power) / sum;
        gl.share_i = l.zip.constant_current / sum;
        gl.share_z = l.zip.constant_impedance / sum;
        break;
    }
    }
    return gl;
}

} // namespace

GridModel build_canonical_grid(const Scenario& s)
{
    const auto& net = s.network;
    GridBuilder b(net.base_mva, net.frequency_hz);

    const std::size_t mb[2] = {b.bus("MB11A", 11.0, BusSide::A), b.bus("MB11B", 11.0, BusSide::B)};
    auto main_bus = [&](BusSide side) { return mb[side == BusSide::A ? 0 : 1]; };
    b.tie("TIE11", mb[0], mb[1], net.tie_breaker_11kv_closed);

    for (const auto& gt : s.gas_turbines) {
        const auto bus = b.bus(gt.tag, 11.0, gt.side);
        b.cable("C" + gt.tag, bus, main_bus(gt.side), cable_11kv_240(), net.gt_cable_m,
                net.gt_parallel_cables);
        b.grid().generators.push_back({gt.tag, bus, 1.0});
    }

    bool drill_side[2] = {false, false};
    bool utility_side[2] = {false, false};
    bool lv_side[2] = {false, false};
    for (const auto& l : s.loads) {
        const int k = l.side == BusSide::A ? 0 : 1;
        if (l.kind == LoadKind::DrillingDc) drill_side[k] = true;
        else if (l.voltage_kv < 0.5) lv_side[k] = utility_side[k] = true;
        else if (l.voltage_kv < 1.0) utility_side[k] = true;
    }

    for (BusSide side : {BusSide::A, BusSide::B}) {
        const int k = side == BusSide::A ? 0 : 1;
        const std::string sx = side_suffix(side);
        if (utility_side[k]) {
            const auto u690 = b.bus("U690" + sx, 0.69, side);
            b.transformer("TRU" + sx, main_bus(side), u690, 3.3, 0.11, 0.0035, "Dyn11");
        }
        if (lv_side[k]) {
            const auto feed = b.bus("F690" + sx, 0.69, side);
            b.cable("CLV" + sx, b.bus("U690" + sx, 0.69, side), feed, cable_11kv_240(),
                    net.platform_cable_m);
            const auto lv = b.bus("B400" + sx, 0.4, side);
            b.transformer("TRA" + sx, feed, lv, 0.6, 0.06, 0.01, "Dyn11");
        }
        if (drill_side[k]) {
            const auto dc = b.bus("DRL" + sx, 0.69, side);
            b.transformer("TRD" + sx, main_bus(side), dc, 3.3, 0.11, 0.0035, "Dd0y1");
        }
    }
    if (utility_side[0] && utility_side[1]) {
        b.tie("TIE690", b.bus("U690A", 0.69, BusSide::A), b.bus("U690B", 0.69, BusSide::B), false);
    }
    if (drill_side[0] && drill_side[1]) {
        b.tie("TIEDC", b.bus("DRLA", 0.69, BusSide::A), b.bus("DRLB", 0.69, BusSide::B), false);
    }

    for (const auto& l : s.loads) {
        const std::string sx = side_suffix(l.side);
        std::size_t bus = 0;
        if (l.kind == LoadKind::DrillingDc) {
            bus = b.bus("DRL" + sx, 0.69, l.side);
        } else if (l.voltage_kv < 0.5) {
            bus = b.bus("B400" + sx, 0.4, l.side);
        } else if (l.voltage_kv < 1.0) {
            bus = b.bus("U690" + sx, 0.69, l.side);
        } else {
            bus = b.bus(l.tag, 11.0, l.side);
            b.cable("C" + l.tag, main_bus(l.side), bus, feeder_for(l), net.platform_cable_m);
        }
        b.grid().loads.push_back(grid_load(l, bus, net.converter_efficiency));
    }

    if (!s.wind_turbines.empty()) {
        const auto col = b.bus("COL33", 33.0, BusSide::A);
        b.transformer("TCOL", col, mb[0], net.collector_transformer_mva,
                      net.collector_transformer_uk, net.collector_transformer_losses, "YNd11");
        for (const auto& wt : s.wind_turbines) {
            const auto gen = b.bus(wt.tag, wt.generator_kv, wt.side);
            const auto hv = b.bus(wt.tag + "_33", 33.0, wt.side);
            b.transformer("T" + wt.tag, hv, gen, net.wt_transformer_mva, net.wt_transformer_uk,
                          net.wt_transformer_losses, "Dyn11");
            b.cable("C" + wt.tag, hv, col, cable_33kv_240(), net.wind_cable_m);
            b.grid().wind.push_back({wt.tag, gen});
        }
    }
    return b.grid();
}

GridModel copper_plate(const GridModel& g)
{
    GridModel c = g;
    for (auto& br : c.branches) {
        br.kind = BranchKind::Switch;
        br.closed = true;
        br.r_pu = br.x_pu = br.b_pu = 0.0;
    }
    for (auto& l : c.loads) l.efficiency = 1.0;
    return c;
}

Injections nominal_injections(const Scenario& s, const GridModel& g, double load_multiplier)
{
    Injections inj;
    inj.load_multiplier = load_multiplier;
    double load = 0.0;
    for (const auto& l : g.loads) {
        const double p = l.p_mw * (l.flow_dependent ? load_multiplier : 1.0);
        load += l.model == LoadModel::Converter ? p / l.efficiency : p;
    }
    const double n = static_cast<double>(std::max<std::size_t>(1, g.generators.size()));
    inj.gt_mw.assign(g.generators.size(), load / n);
    inj.wind_mw.assign(g.wind.size(), 0.0);
    (void)s;
    return inj;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

bool is_series(const Branch& b) { return b.kind != BranchKind::Switch && b.parallel > 0; }

cd series_admittance(const Branch& b)
{
    return static_cast<double>(b.parallel) / cd(b.r_pu, b.x_pu);
}

double shunt_half(const Branch& b) { return 0.5 * b.b_pu * b.parallel; }

enum class NodeType { Slack, Pv, Pq, Dead };

} // namespace

PowerFlowResult solve_power_flow(const GridModel& g, const Injections& inj,
                                 const SolverOptions& opt)
{
    const std::size_t nb = g.buses.size();
    const double base = g.base_mva;
    if (!inj.gt_mw.empty() && inj.gt_mw.size() != g.generators.size()) {
        throw std::invalid_argument("solve_power_flow: gt_mw size mismatch");
    }
    auto in_service = [&](std::size_t k) {
        return inj.gt_in_service.empty() || inj.gt_in_service.at(k);
    };

    // Merge buses joined by closed switches into nodes.
    UnionFind uf(nb);
    for (const auto& br : g.branches) {
        if (br.kind == BranchKind::Switch && br.closed) uf.unite(br.from, br.to);
    }
    std::vector<int> node_of(nb, -1);
    std::size_t n = 0;
    for (std::size_t i = 0; i < nb; ++i) {
        const std::size_t r = uf.find(i);
        if (node_of[r] < 0) node_of[r] = static_cast<int>(n++);
        node_of[i] = node_of[r];
    }

    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& br : g.branches) {
        if (!is_series(br)) continue;
        const auto f = node_of[br.from];
        const auto t = node_of[br.to];
        const cd ys = series_admittance(br);
        const cd ysh(0.0, shunt_half(br));
        Y(f, f) += ys + ysh;
        Y(t, t) += ys + ysh;
        Y(f, t) -= ys;
        Y(t, f) -= ys;
    }

    // Specified injections and load parameters per node, per unit.
    std::vector<double> p_gen(n, 0.0);
    std::vector<double> lp0(n, 0.0), lp1(n, 0.0), lp2(n, 0.0);
    std::vector<double> lq0(n, 0.0), lq1(n, 0.0), lq2(n, 0.0);
    std::vector<double> vset(n, 1.0);
    std::vector<NodeType> type(n, NodeType::Pq);
    std::vector<int> gen_node(g.generators.size(), -1);

    for (const auto& l : g.loads) {
        const double m = l.flow_dependent ? inj.load_multiplier : 1.0;
        const auto k = static_cast<std::size_t>(node_of[l.bus]);
        double p = l.p_mw * m / base;
        const double q = l.q_mvar * m / base;
        if (l.model == LoadModel::Converter) p /= l.efficiency;
        lp0[k] += p * l.share_p;
        lp1[k] += p * l.share_i;
        lp2[k] += p * l.share_z;
        lq0[k] += q * l.share_p;
        lq1[k] += q * l.share_i;
        lq2[k] += q * l.share_z;
    }
    for (std::size_t w = 0; w < g.wind.size(); ++w) {
        const double mw = w < inj.wind_mw.size() ? inj.wind_mw[w] : 0.0;
        p_gen[static_cast<std::size_t>(node_of[g.wind[w].bus])] += mw / base;
    }

    // Islands over series branches; the first in-service generator is slack.
    UnionFind isl(n);
    for (const auto& br : g.branches) {
        if (is_series(br)) isl.unite(static_cast<std::size_t>(node_of[br.from]), static_cast<std::size_t>(node_of[br.to]));
    }
    std::vector<int> island_slack(n, -1);
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        if (!in_service(k)) continue;
        const auto node = static_cast<std::size_t>(node_of[g.generators[k].bus]);
        gen_node[k] = static_cast<int>(node);
        const auto root = isl.find(node);
        if (island_slack[root] < 0) {
            island_slack[root] = static_cast<int>(node);
            type[node] = NodeType::Slack;
        } else if (type[node] != NodeType::Slack) {
            type[node] = NodeType::Pv;
            p_gen[node] += (inj.gt_mw.empty() ? 0.0 : inj.gt_mw[k]) / base;
        }
        vset[node] = g.generators[k].voltage_setpoint_pu;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (island_slack[isl.find(i)] >= 0) continue;
        const double load = lp0[i] + lp1[i] + lp2[i];
        if (std::abs(load) > 1e-12 || std::abs(p_gen[i]) > 1e-12) {
            throw std::runtime_error("solve_power_flow: energised island without a generator");
        }
        type[i] = NodeType::Dead;
    }

    std::vector<int> ang_idx(n, -1), mag_idx(n, -1);
    int nv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (type[i] == NodeType::Pv || type[i] == NodeType::Pq) ang_idx[i] = nv++;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (type[i] == NodeType::Pq) mag_idx[i] = nv++;
    }

    Eigen::VectorXd vm = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    Eigen::VectorXd va = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (type[i] == NodeType::Slack || type[i] == NodeType::Pv) vm[i] = vset[i];
    }

    auto load_p = [&](std::size_t i, double v) { return lp0[i] + lp1[i] * v + lp2[i] * v * v; };
    auto load_q = [&](std::size_t i, double v) { return lq0[i] + lq1[i] * v + lq2[i] * v * v; };

    Eigen::VectorXcd V(static_cast<Eigen::Index>(n));
    Eigen::VectorXcd S(static_cast<Eigen::Index>(n));
    Eigen::VectorXd F(nv);
    auto evaluate = [&]() {
        for (std::size_t i = 0; i < n; ++i) V[i] = std::polar(vm[i], va[i]);
        const Eigen::VectorXcd I = Y * V;
        for (std::size_t i = 0; i < n; ++i) S[i] = V[i] * std::conj(I[i]);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ang_idx[i] >= 0) {
                F[ang_idx[i]] = p_gen[i] - load_p(i, vm[i]) - S[i].real();
                worst = std::max(worst, std::abs(F[ang_idx[i]]));
            }
            if (mag_idx[i] >= 0) {
                F[mag_idx[i]] = -load_q(i, vm[i]) - S[i].imag();
                worst = std::max(worst, std::abs(F[mag_idx[i]]));
            }
        }
        return worst;
    };

    PowerFlowResult res;
    double mismatch = evaluate();
    int it = 0;
    while (mismatch >= opt.tolerance_pu) {
        if (it >= opt.max_iterations) {
            throw ConvergenceError(
                fmt::format("power flow did not converge in {} iterations, mismatch {:.3e} pu",
                            it, mismatch),
                mismatch);
        }
        // dS/dtheta = j diag(V) conj(diag(I) - Y diag(V))
        // dS/d|V|   = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        const Eigen::VectorXcd I = Y * V;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nv, nv);
        for (std::size_t i = 0; i < n; ++i) {
            const int ri_p = ang_idx[i];
            const int ri_q = mag_idx[i];
            if (ri_p < 0 && ri_q < 0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                const cd yik = Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
                const cd vk_unit = V[k] / vm[k];
                cd d_ang = cd(0.0, 1.0) * V[i] * std::conj(-yik * V[k]);
                cd d_mag = V[i] * std::conj(yik * vk_unit);
                if (i == k) {
                    d_ang += cd(0.0, 1.0) * V[i] * std::conj(I[i]);
                    d_mag += std::conj(I[i]) * vk_unit;
                }
                if (ang_idx[k] >= 0) {
                    if (ri_p >= 0) J(ri_p, ang_idx[k]) = d_ang.real();
                    if (ri_q >= 0) J(ri_q, ang_idx[k]) = d_ang.imag();
                }
                if (mag_idx[k] >= 0) {
                    double dp = d_mag.real();
                    double dq = d_mag.imag();
                    if (i == k) {
                        dp += lp1[i] + 2.0 * lp2[i] * vm[i];
                        dq += lq1[i] + 2.0 * lq2[i] * vm[i];
                    }
                    if (ri_p >= 0) J(ri_p, mag_idx[k]) = dp;
                    if (ri_q >= 0) J(ri_q, mag_idx[k]) = dq;
                }
            }
        }
        const Eigen::VectorXd dx = J.partialPivLu().solve(F);
        for (std::size_t i = 0; i < n; ++i) {
            if (ang_idx[i] >= 0) va[i] += dx[ang_idx[i]];
            if (mag_idx[i] >= 0) vm[i] += dx[mag_idx[i]];
        }
        ++it;
        mismatch = evaluate();
        if (!std::isfinite(mismatch)) {
            throw ConvergenceError("power flow diverged", mismatch);
        }
    }
    res.iterations = it;
    res.max_mismatch_pu = mismatch;

    res.buses.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        res.buses[i] = {vm[node_of[i]], va[node_of[i]]};
    }

    // Generator outputs: slack and PV reactive power from the nodal balance.
    res.gt_mw.assign(g.generators.size(), 0.0);
    res.gt_mvar.assign(g.generators.size(), 0.0);
    std::vector<int> gens_at(n, 0);
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        if (gen_node[k] >= 0) ++gens_at[static_cast<std::size_t>(gen_node[k])];
    }
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        if (gen_node[k] < 0) continue;
        const auto i = static_cast<std::size_t>(gen_node[k]);
        double wind_here = 0.0;
        for (std::size_t w = 0; w < g.wind.size(); ++w) {
            if (static_cast<std::size_t>(node_of[g.wind[w].bus]) == i && w < inj.wind_mw.size()) {
                wind_here += inj.wind_mw[w] / base;
            }
        }
        const double p_node = S[i].real() + load_p(i, vm[i]);
        const double q_node = S[i].imag() + load_q(i, vm[i]);
        if (type[i] == NodeType::Slack) {
            // Other generators merged into the slack node keep their setpoints.
            double others = wind_here;
            for (std::size_t j = 0; j < g.generators.size(); ++j) {
                if (j != k && gen_node[j] == static_cast<int>(i)) {
                    const double mw = inj.gt_mw.empty() ? 0.0 : inj.gt_mw[j];
                    others += mw / base;
                    res.gt_mw[j] = mw;
                }
            }
            res.gt_mw[k] = (p_node - others) * base;
            res.gt_mvar[k] = q_node * base;
        } else if (type[i] == NodeType::Pv) {
            res.gt_mw[k] = inj.gt_mw.empty() ? 0.0 : inj.gt_mw[k];
            res.gt_mvar[k] = q_node * base / gens_at[i];
        }
    }

    res.branches.resize(g.branches.size());
    for (std::size_t b = 0; b < g.branches.size(); ++b) {
        const auto& br = g.branches[b];
        auto& fl = res.branches[b];
        if (!is_series(br)) continue;
        const cd vf = V[node_of[br.from]];
        const cd vt = V[node_of[br.to]];
        const cd ys = series_admittance(br);
        const cd ysh(0.0, shunt_half(br));
        const cd i_f = (ys + ysh) * vf - ys * vt;
        const cd i_t = (ys + ysh) * vt - ys * vf;
        const cd s_f = vf * std::conj(i_f);
        const cd s_t = vt * std::conj(i_t);
        fl.p_from_mw = s_f.real() * base;
        fl.q_from_mvar = s_f.imag() * base;
        fl.p_to_mw = s_t.real() * base;
        fl.q_to_mvar = s_t.imag() * base;
        fl.current_a = std::max(std::abs(i_f) * base_current_a(base, g.buses[br.from].kv),
                                std::abs(i_t) * base_current_a(base, g.buses[br.to].kv));
        fl.s_mva = std::max(std::abs(s_f), std::abs(s_t)) * base;
        fl.loss_mw = (s_f + s_t).real() * base;
        fl.solved = true;
        res.branch_losses_mw += fl.loss_mw;
    }

    res.load_mw.assign(g.loads.size(), 0.0);
    for (std::size_t k = 0; k < g.loads.size(); ++k) {
        const auto& l = g.loads[k];
        const double v = vm[node_of[l.bus]];
        const double m = l.flow_dependent ? inj.load_multiplier : 1.0;
        double p = l.p_mw * m;
        if (l.model == LoadModel::Converter) {
            const double drawn = p / l.efficiency;
            res.converter_losses_mw += drawn - p;
            p = drawn;
        } else {
            p *= l.share_p + l.share_i * v + l.share_z * v * v;
        }
        res.load_mw[k] = p;
        res.load_output_mw += p;
    }
    res.load_output_mw -= res.converter_losses_mw;

    for (double p : res.gt_mw) res.generation_mw += p;
    for (std::size_t w = 0; w < g.wind.size() && w < inj.wind_mw.size(); ++w) {
        res.generation_mw += inj.wind_mw[w];
    }
    return res;
}

double reconstruct_branch_losses(const GridModel& g, const PowerFlowResult& r)
{
    double total = 0.0;
    for (const auto& br : g.branches) {
        if (!is_series(br)) continue;
        const auto& a = r.buses[br.from];
        const auto& b = r.buses[br.to];
        const cd dv = std::polar(a.v_pu, a.angle_rad) - std::polar(b.v_pu, b.angle_rad);
        const double i_series = std::abs(dv * series_admittance(br));
        total += i_series * i_series * br.r_pu / br.parallel;
    }
    return total * g.base_mva;
}

double loading_pct(const Branch& b, const BranchFlow& f)
{
    if (!f.solved) return 0.0;
    if (b.kind == BranchKind::Cable && b.rated_a > 0.0) {
        return 100.0 * f.current_a / (b.rated_a * b.parallel);
    }
    if (b.kind == BranchKind::Transformer && b.rated_mva > 0.0) {
        return 100.0 * f.s_mva / b.rated_mva;
    }
    return 0.0;
}

std::vector<Overload> check_ratings(const GridModel& g, const PowerFlowResult& r)
{
    std::vector<Overload> out;
    for (std::size_t i = 0; i < g.branches.size(); ++i) {
        const auto& b = g.branches[i];
        const auto& f = r.branches.at(i);
        const double pct = loading_pct(b, f);
        if (pct <= 100.0) continue;
        if (b.kind == BranchKind::Cable) {
            out.push_back({b.id, b.kind, f.current_a, b.rated_a * b.parallel, pct});
        } else {
            out.push_back({b.id, b.kind, f.s_mva, b.rated_mva, pct});
        }
    }
    return out;
}

void write_bus_csv(std::ostream& out, const GridModel& g, const PowerFlowResult& r)
{
    out << "id,kv,v_pu,angle_deg\n";
    for (std::size_t i = 0; i < g.buses.size(); ++i) {
        out << fmt::format("{},{:g},{:.6f},{:.4f}\n", g.buses[i].id, g.buses[i].kv,
                           r.buses[i].v_pu, r.buses[i].angle_rad * 180.0 / kPi);
    }
}

void write_branch_csv(std::ostream& out, const GridModel& g, const PowerFlowResult& r)
{
    out << "from,to,p_mw,q_mvar,i_a,loading_pct\n";
    for (std::size_t i = 0; i < g.branches.size(); ++i) {
        const auto& b = g.branches[i];
        const auto& f = r.branches[i];
        if (!f.solved) continue;
        out << fmt::format("{},{},{:.4f},{:.4f},{:.2f},{:.2f}\n", g.buses[b.from].id,
                           g.buses[b.to].id, f.p_from_mw, f.q_from_mvar, f.current_a,
                           loading_pct(b, f));
    }
}

} // namespace leogo::network
