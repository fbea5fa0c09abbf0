#include "ucac/case.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>

#include "ucac/graph.hpp"
#include <json.hpp>

using nlohmann::json;

namespace ucac {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream os;
    os << "case validation failed (" << issues.size() << " issue"
       << (issues.size() == 1 ? "" : "s") << "):";
    for (const auto& s : issues) os << "\n  - " << s;
    return os.str();
}

double get_num(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key))
        throw ParseError(ctx + ": missing field '" + key + "'");
    if (!j.at(key).is_number())
        throw ParseError(ctx + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double get_num_or(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    return j.at(key).get<double>();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues_)
    : std::runtime_error(join_issues(issues_)), issues(std::move(issues_)) {}

AdmittanceBlocks branch_admittance(const Branch& br) {
    if (br.tap <= 0.0)
        throw std::invalid_argument("branch " + std::to_string(br.id) +
                                    ": tap ratio must be positive");
    if (br.r == 0.0 && br.x == 0.0)
        throw std::invalid_argument("branch " + std::to_string(br.id) +
                                    ": zero series impedance");
    const std::complex<double> z(br.r, br.x);
    const std::complex<double> y = 1.0 / z;
    const std::complex<double> ych(0.0, br.b_charge / 2.0);
    const std::complex<double> rot = std::polar(1.0, br.shift);  // e^{j phi}

    const std::complex<double> yff = (y + ych) / (br.tap * br.tap);
    const std::complex<double> yft = -y / (br.tap * std::conj(rot));
    const std::complex<double> ytf = -y / (br.tap * rot);
    const std::complex<double> ytt = y + ych;

    AdmittanceBlocks a;
    a.g_ff = yff.real(); a.b_ff = yff.imag();
    a.g_ft = yft.real(); a.b_ft = yft.imag();
    a.g_tf = ytf.real(); a.b_tf = ytf.imag();
    a.g_tt = ytt.real(); a.b_tt = ytt.imag();
    return a;
}

std::vector<std::string> validate_case(const NetworkCase& c) {
    std::vector<std::string> bad;
    const int T = c.horizon;
    if (T < 1) bad.push_back("horizon must be >= 1");
    if (c.base_mva <= 0) bad.push_back("baseMVA must be positive");
    if (c.buses.empty()) bad.push_back("case has no buses");

    for (const auto& b : c.buses) {
        if (b.v_min > b.v_max)
            bad.push_back("bus " + std::to_string(b.id) + ": V_min > V_max");
        if (b.v_min <= 0)
            bad.push_back("bus " + std::to_string(b.id) + ": V_min must be positive");
    }
    for (const auto& br : c.branches) {
        const std::string ctx = "branch " + std::to_string(br.id);
        if (br.from_bus < 0 || br.from_bus >= c.num_buses() ||
            br.to_bus < 0 || br.to_bus >= c.num_buses())
            bad.push_back(ctx + ": endpoint references a missing bus");
        if (br.from_bus == br.to_bus) bad.push_back(ctx + ": self loop");
        if (br.s_max <= 0) bad.push_back(ctx + ": S_max must be positive");
        if (br.tap <= 0) bad.push_back(ctx + ": tap ratio must be positive");
        if (br.r == 0 && br.x == 0) bad.push_back(ctx + ": zero series impedance");
        if (br.theta_max <= 0 || br.theta_max > M_PI)
            bad.push_back(ctx + ": theta_max must lie in (0, pi]");
    }
    for (size_t gi = 0; gi < c.generators.size(); ++gi) {
        const auto& g = c.generators[gi];
        const std::string ctx = "generator " + (g.name.empty() ? std::to_string(gi) : g.name);
        if (g.bus < 0 || g.bus >= c.num_buses())
            bad.push_back(ctx + ": references a missing bus");
        if (g.cost_a2 < 0) bad.push_back(ctx + ": quadratic cost coefficient must be >= 0");
        if (g.p_min > g.p_max) bad.push_back(ctx + ": P_min > P_max");
        if (g.q_min > g.q_max) bad.push_back(ctx + ": Q_min > Q_max");
        if (g.min_up < 1 || g.min_down < 1)
            bad.push_back(ctx + ": min up/down times must be >= 1 h");
        if (g.startup.empty()) bad.push_back(ctx + ": needs at least one startup segment");
        for (size_t s = 0; s + 1 < g.startup.size(); ++s) {
            if (g.startup[s + 1].hours_offline <= g.startup[s].hours_offline)
                bad.push_back(ctx + ": startup segment times must be strictly increasing");
            if (g.startup[s + 1].cost < g.startup[s].cost)
                bad.push_back(ctx + ": startup costs must be non-decreasing");
        }
        if (!g.startup.empty() && g.startup[0].hours_offline != g.min_down)
            bad.push_back(ctx + ": first startup segment must begin at the min downtime");
        if (g.initial_status == 0) bad.push_back(ctx + ": initial_status cannot be 0");
    }
    for (size_t si = 0; si < c.condensers.size(); ++si) {
        const auto& sc = c.condensers[si];
        if (sc.bus < 0 || sc.bus >= c.num_buses())
            bad.push_back("condenser " + std::to_string(si) + ": references a missing bus");
        if (sc.q_min > sc.q_max)
            bad.push_back("condenser " + std::to_string(si) + ": Q_min > Q_max");
    }
    auto check_series = [&](const std::vector<std::vector<double>>& d, const char* what) {
        if (static_cast<int>(d.size()) != c.num_buses()) {
            bad.push_back(std::string(what) + " must cover every bus");
            return;
        }
        for (int b = 0; b < c.num_buses(); ++b)
            if (static_cast<int>(d[b].size()) != T)
                bad.push_back(std::string(what) + " for bus " + std::to_string(c.buses[b].id) +
                              " must have exactly " + std::to_string(T) + " entries");
    };
    check_series(c.demand_p, "real demand");
    check_series(c.demand_q, "reactive demand");
    if (static_cast<int>(c.reserve.size()) != T)
        bad.push_back("reserve must have exactly " + std::to_string(T) + " entries");

    if (!c.buses.empty() && connected_components(c) != 1)
        bad.push_back("network graph is not connected");
    return bad;
}

NetworkCase parse_case_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != std::string("ucac-case-1"))
        throw ParseError(origin + ": not a ucac-case-1 file (missing or wrong 'format')");
    if (!j.contains("baseMVA"))
        throw ParseError(origin + ": missing baseMVA");

    NetworkCase c;
    c.name = j.value("name", origin);
    c.base_mva = j.at("baseMVA").get<double>();
    c.horizon = j.value("horizon", 0);
    const double S = c.base_mva;
    if (S <= 0) throw ParseError(origin + ": baseMVA must be positive");

    std::map<int, int> bus_index;
    for (const auto& bj : j.value("buses", json::array())) {
        Bus b;
        b.id = static_cast<int>(get_num(bj, "id", "bus"));
        b.v_min = get_num(bj, "vmin", "bus " + std::to_string(b.id));
        b.v_max = get_num(bj, "vmax", "bus " + std::to_string(b.id));
        b.g_sh = get_num_or(bj, "gsh", 0.0) / S;  // MW @ 1 p.u. -> p.u.
        b.b_sh = get_num_or(bj, "bsh", 0.0) / S;
        if (bus_index.count(b.id))
            throw ParseError(origin + ": duplicate bus id " + std::to_string(b.id));
        bus_index[b.id] = c.num_buses();
        c.buses.push_back(b);
    }
    auto bus_of = [&](int id, const std::string& ctx) {
        auto it = bus_index.find(id);
        if (it == bus_index.end())
            throw ParseError(origin + ": " + ctx + " references unknown bus " + std::to_string(id));
        return it->second;
    };

    for (const auto& lj : j.value("branches", json::array())) {
        Branch br;
        br.id = static_cast<int>(get_num_or(lj, "id", c.num_branches() + 1));
        const std::string ctx = "branch " + std::to_string(br.id);
        br.from_bus = bus_of(static_cast<int>(get_num(lj, "from", ctx)), ctx);
        br.to_bus = bus_of(static_cast<int>(get_num(lj, "to", ctx)), ctx);
        br.r = get_num(lj, "r", ctx);
        br.x = get_num(lj, "x", ctx);
        br.b_charge = get_num_or(lj, "b", 0.0);
        br.tap = get_num_or(lj, "tap", 1.0);
        br.shift = get_num_or(lj, "shift", 0.0);
        br.s_max = get_num(lj, "smax", ctx) / S;  // MVA -> p.u.
        br.theta_max = get_num_or(lj, "theta_max", M_PI / 2.0);
        c.branches.push_back(br);
    }

    for (const auto& gj : j.value("generators", json::array())) {
        Generator g;
        g.name = gj.value("name", "G" + std::to_string(c.num_generators() + 1));
        g.bus = bus_of(static_cast<int>(get_num(gj, "bus", g.name)), g.name);
        if (!gj.contains("cost") || !gj.at("cost").is_array() || gj.at("cost").size() != 3)
            throw ParseError(origin + ": " + g.name + ": cost must be [a2, a1, a0]");
        // $/MW^2 h, $/MWh, $/h -> $ per p.u. quantity per hour
        g.cost_a2 = gj.at("cost")[0].get<double>() * S * S;
        g.cost_a1 = gj.at("cost")[1].get<double>() * S;
        g.cost_a0 = gj.at("cost")[2].get<double>();
        g.p_min = get_num(gj, "pmin", g.name) / S;
        g.p_max = get_num(gj, "pmax", g.name) / S;
        g.q_min = get_num(gj, "qmin", g.name) / S;
        g.q_max = get_num(gj, "qmax", g.name) / S;
        g.ramp_up = get_num_or(gj, "ramp_up", gj.value("pmax", 0.0)) / S;
        g.ramp_down = get_num_or(gj, "ramp_down", gj.value("pmax", 0.0)) / S;
        g.startup_cap = get_num_or(gj, "startup_capability", gj.value("pmin", 0.0)) / S;
        g.shutdown_cap = get_num_or(gj, "shutdown_capability", gj.value("pmin", 0.0)) / S;
        g.min_up = static_cast<int>(get_num_or(gj, "min_up", 1));
        g.min_down = static_cast<int>(get_num_or(gj, "min_down", 1));
        for (const auto& sj : gj.value("startup", json::array())) {
            StartupSegment seg;
            seg.hours_offline = static_cast<int>(get_num(sj, "hours", g.name + " startup"));
            seg.cost = get_num(sj, "cost", g.name + " startup");
            g.startup.push_back(seg);
        }
        if (g.startup.empty())
            g.startup.push_back({g.min_down, gj.value("startup_cost", 0.0)});
        g.shutdown_cost = get_num_or(gj, "shutdown_cost", 0.0);
        g.initial_status = static_cast<int>(get_num_or(gj, "initial_status", -g.min_down));
        g.initial_output = get_num_or(gj, "initial_output", 0.0) / S;
        c.generators.push_back(g);
    }

    for (const auto& sj : j.value("sync_condensers", json::array())) {
        SyncCondenser sc;
        sc.bus = bus_of(static_cast<int>(get_num(sj, "bus", "condenser")), "condenser");
        sc.q_min = get_num(sj, "qmin", "condenser") / S;
        sc.q_max = get_num(sj, "qmax", "condenser") / S;
        c.condensers.push_back(sc);
    }

    c.demand_p.assign(c.num_buses(), std::vector<double>(std::max(c.horizon, 0), 0.0));
    c.demand_q.assign(c.num_buses(), std::vector<double>(std::max(c.horizon, 0), 0.0));
    if (j.contains("demand")) {
        const auto& dj = j.at("demand");
        auto fill = [&](const char* key, std::vector<std::vector<double>>& out) {
            if (!dj.contains(key)) return;
            for (auto it = dj.at(key).begin(); it != dj.at(key).end(); ++it) {
                const int b = bus_of(std::stoi(it.key()), "demand");
                std::vector<double> series = it.value().get<std::vector<double>>();
                for (auto& v : series) v /= S;
                out[b] = std::move(series);
            }
        };
        fill("real", c.demand_p);
        fill("reactive", c.demand_q);
    }
    c.reserve = j.value("reserve", std::vector<double>(std::max(c.horizon, 0), 0.0));
    for (auto& v : c.reserve) v /= S;

    auto issues = validate_case(c);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return c;
}

NetworkCase load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_case_json(ss.str(), path);
}

NetworkCase denormalize_case(const NetworkCase& c) {
    NetworkCase out = c;
    const double S = c.base_mva;
    for (auto& b : out.buses) { b.g_sh *= S; b.b_sh *= S; }
    for (auto& br : out.branches) br.s_max *= S;
    for (auto& g : out.generators) {
        g.cost_a2 /= S * S;
        g.cost_a1 /= S;
        g.p_min *= S; g.p_max *= S;
        g.q_min *= S; g.q_max *= S;
        g.ramp_up *= S; g.ramp_down *= S;
        g.startup_cap *= S; g.shutdown_cap *= S;
        g.initial_output *= S;
    }
    for (auto& sc : out.condensers) { sc.q_min *= S; sc.q_max *= S; }
    for (auto& d : out.demand_p) for (auto& v : d) v *= S;
    for (auto& d : out.demand_q) for (auto& v : d) v *= S;
    for (auto& v : out.reserve) v *= S;
    return out;
}

}  // namespace ucac
