#pragma once

#include <string>
#include <vector>

#include "ucac/case.hpp"

namespace ucac::testing {

/// 1 bus, 1 generator, flat demand. Costs chosen so commitment decisions are
/// nontrivial: startup cost matters against a short horizon.
inline NetworkCase single_bus_case(int T, double demand_mw = 80.0) {
    NetworkCase c;
    c.name = "single-bus";
    c.base_mva = 100.0;
    c.horizon = T;
    c.buses.push_back({1, 0.95, 1.05, 0.0, 0.0});
    Generator g;
    g.name = "G1";
    g.bus = 0;
    g.cost_a2 = 0.04 * 100 * 100 / 100.0;  // mild quadratic term
    g.cost_a2 = 4.0;
    g.cost_a1 = 20.0 * 100;
    g.cost_a0 = 50.0;
    g.p_min = 0.10;
    g.p_max = 2.00;
    g.q_min = -1.0;
    g.q_max = 1.0;
    g.ramp_up = g.ramp_down = 2.0;
    g.startup_cap = g.shutdown_cap = 2.0;
    g.min_up = 1;
    g.min_down = 1;
    g.startup = {{1, 40.0}};
    g.shutdown_cost = 10.0;
    g.initial_status = -2;
    g.initial_output = 0.0;
    c.generators.push_back(g);
    c.demand_p.assign(1, std::vector<double>(T, demand_mw / 100.0));
    c.demand_q.assign(1, std::vector<double>(T, 0.2 * demand_mw / 100.0));
    c.reserve.assign(T, 0.1 * demand_mw / 100.0);
    return c;
}

/// 2 buses joined by one line, generators at both ends with distinct costs.
inline NetworkCase two_bus_case(int T = 2) {
    NetworkCase c;
    c.name = "two-bus";
    c.base_mva = 100.0;
    c.horizon = T;
    c.buses.push_back({1, 0.95, 1.05, 0.0, 0.0});
    c.buses.push_back({2, 0.95, 1.05, 0.0, 0.0});
    Branch br;
    br.id = 1;
    br.from_bus = 0;
    br.to_bus = 1;
    br.r = 0.02;
    br.x = 0.20;
    br.s_max = 1.5;
    br.theta_max = 1.0471975511965976;  // pi/3
    c.branches.push_back(br);

    Generator g1;
    g1.name = "G1";
    g1.bus = 0;
    g1.cost_a2 = 2.0;
    g1.cost_a1 = 1500.0;
    g1.cost_a0 = 30.0;
    g1.p_min = 0.10;
    g1.p_max = 1.60;
    g1.q_min = -0.8;
    g1.q_max = 0.8;
    g1.ramp_up = g1.ramp_down = 1.6;
    g1.startup_cap = g1.shutdown_cap = 1.6;
    g1.min_up = g1.min_down = 1;
    g1.startup = {{1, 60.0}};
    g1.shutdown_cost = 5.0;
    g1.initial_status = 2;
    g1.initial_output = 0.5;

    Generator g2 = g1;
    g2.name = "G2";
    g2.bus = 1;
    g2.cost_a2 = 3.0;
    g2.cost_a1 = 2600.0;
    g2.cost_a0 = 25.0;
    g2.p_min = 0.08;
    g2.p_max = 1.20;
    g2.startup = {{1, 45.0}};
    g2.initial_status = -3;
    g2.initial_output = 0.0;
    c.generators.push_back(g1);
    c.generators.push_back(g2);

    c.demand_p = {std::vector<double>(T, 0.30), std::vector<double>(T, 0.55)};
    c.demand_q = {std::vector<double>(T, 0.06), std::vector<double>(T, 0.12)};
    for (int t = 1; t < T; ++t) {
        c.demand_p[0][t] = 0.35;
        c.demand_p[1][t] = 0.65;
    }
    c.reserve.assign(T, 0.10);
    return c;
}

/// 3-bus ring tuned so the plain SOC relaxation leaves a cone gap: unequal
/// reactances around the loop, a tight thermal limit on one leg and a cheap
/// generator far from the load.
inline NetworkCase ring3_case(int T = 2, bool tight = true) {
    NetworkCase c;
    c.name = "ring-3";
    c.base_mva = 100.0;
    c.horizon = T;
    c.buses.push_back({1, 0.95, 1.05, 0.0, 0.0});
    c.buses.push_back({2, 0.95, 1.05, 0.0, 0.0});
    c.buses.push_back({3, 0.95, 1.05, 0.0, 0.0});
    auto mk = [&](int id, int f, int t2, double r, double x, double smax) {
        Branch br;
        br.id = id;
        br.from_bus = f;
        br.to_bus = t2;
        br.r = r;
        br.x = x;
        br.s_max = smax;
        br.theta_max = 1.0471975511965976;  // pi/3
        return br;
    };
    c.branches.push_back(mk(1, 0, 1, 0.01, 0.10, 2.0));
    c.branches.push_back(mk(2, 1, 2, 0.08, 0.35, 2.0));
    c.branches.push_back(mk(3, 0, 2, 0.02, 0.12, tight ? 0.40 : 2.0));

    Generator g1;
    g1.name = "G1";
    g1.bus = 0;
    g1.cost_a2 = 1.0;
    g1.cost_a1 = 1000.0;
    g1.cost_a0 = 20.0;
    g1.p_min = 0.10;
    g1.p_max = 2.50;
    g1.q_min = -1.5;
    g1.q_max = 1.5;
    g1.ramp_up = g1.ramp_down = 2.5;
    g1.startup_cap = g1.shutdown_cap = 2.5;
    g1.min_up = g1.min_down = 1;
    g1.startup = {{1, 50.0}};
    g1.shutdown_cost = 5.0;
    g1.initial_status = 4;
    g1.initial_output = 1.0;

    Generator g2 = g1;
    g2.name = "G2";
    g2.bus = 2;
    g2.cost_a2 = 2.0;
    g2.cost_a1 = 3500.0;
    g2.cost_a0 = 15.0;
    g2.p_max = 1.50;
    g2.startup = {{1, 35.0}};
    g2.initial_status = -2;
    g2.initial_output = 0.0;
    c.generators.push_back(g1);
    c.generators.push_back(g2);

    c.demand_p = {std::vector<double>(T, 0.05), std::vector<double>(T, 0.45),
                  std::vector<double>(T, 0.85)};
    c.demand_q = {std::vector<double>(T, 0.01), std::vector<double>(T, 0.10),
                  std::vector<double>(T, 0.20)};
    c.reserve.assign(T, 0.08);
    return c;
}

inline std::string minimal_case_json() {
    return R"({
  "format": "ucac-case-1",
  "name": "mini",
  "baseMVA": 100.0,
  "horizon": 1,
  "buses": [{"id": 1, "vmin": 0.95, "vmax": 1.05}],
  "branches": [],
  "generators": [{
    "name": "G1", "bus": 1, "cost": [0.004, 20.0, 50.0],
    "pmin": 10.0, "pmax": 200.0, "qmin": -100.0, "qmax": 100.0,
    "ramp_up": 200.0, "ramp_down": 200.0,
    "startup_capability": 200.0, "shutdown_capability": 200.0,
    "min_up": 1, "min_down": 1,
    "startup": [{"hours": 1, "cost": 40.0}],
    "shutdown_cost": 10.0, "initial_status": -2
  }],
  "sync_condensers": [],
  "demand": {"real": {"1": [80.0]}, "reactive": {"1": [16.0]}},
  "reserve": [8.0]
})";
}

}  // namespace ucac::testing
