#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "ucac/bounds.hpp"
#include "ucac/case.hpp"
#include "ucac/graph.hpp"

using namespace ucac;

TEST_CASE("minimal one-bus case loads") {
    const NetworkCase c = parse_case_json(testing::minimal_case_json());
    CHECK(c.num_buses() == 1);
    CHECK(c.num_branches() == 0);
    CHECK(c.horizon == 1);
    CHECK(c.generators[0].p_max == doctest::Approx(2.0));       // 200 MW on 100 MVA
    CHECK(c.generators[0].cost_a1 == doctest::Approx(2000.0));  // $/p.u.-h
    CHECK(c.demand_p[0][0] == doctest::Approx(0.8));
}

TEST_CASE("voltage box inversion is a validation error naming the bus") {
    std::string text = testing::minimal_case_json();
    const auto pos = text.find("\"vmin\": 0.95");
    text.replace(pos, 12, "\"vmin\": 1.10");
    try {
        parse_case_json(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.issues.size() >= 1);
        CHECK(e.issues[0].find("bus 1") != std::string::npos);
        CHECK(e.issues[0].find("V_min") != std::string::npos);
    }
}

TEST_CASE("missing baseMVA is a parse error") {
    CHECK_THROWS_AS(parse_case_json(R"({"format": "ucac-case-1", "horizon": 1})"),
                    ParseError);
}

TEST_CASE("3-bus ring fixture: three branches, one cycle") {
    const NetworkCase c = testing::ring3_case();
    CHECK(validate_case(c).empty());
    CHECK(c.num_branches() == 3);
    const CycleSet cs = cycle_basis(c);
    REQUIRE(cs.size() == 1);
    CHECK(cs.cycles[0].branches.size() == 3);
}

TEST_CASE("branch admittance, lossless line") {
    Branch br;
    br.r = 0.0;
    br.x = 0.5;
    const AdmittanceBlocks a = branch_admittance(br);
    CHECK(a.g_ff == doctest::Approx(0.0));
    CHECK(a.b_ff == doctest::Approx(-2.0));
    CHECK(a.g_ft == doctest::Approx(0.0));
    CHECK(a.b_ft == doctest::Approx(2.0));

    br.x = 1.0;
    const AdmittanceBlocks a2 = branch_admittance(br);
    CHECK(a2.b_ff == doctest::Approx(-1.0));
    CHECK(a2.b_ft == doctest::Approx(1.0));
}

TEST_CASE("pi-model symmetry without tap or shift") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(0.0, 0.1), ux(0.05, 0.5), ub(0.0, 0.3);
    for (int k = 0; k < 50; ++k) {
        Branch br;
        br.r = ur(rng);
        br.x = ux(rng);
        br.b_charge = ub(rng);
        const AdmittanceBlocks a = branch_admittance(br);
        CHECK(a.g_ft == doctest::Approx(a.g_tf).epsilon(1e-12));
        CHECK(a.b_ft == doctest::Approx(a.b_tf).epsilon(1e-12));
        CHECK(a.g_ff >= -1e-15);  // passive element
    }
}

TEST_CASE("admittance errors") {
    Branch br;
    CHECK_THROWS_AS(branch_admittance(br), std::invalid_argument);  // r = x = 0
    br.x = 0.1;
    br.tap = 0.0;
    CHECK_THROWS_AS(branch_admittance(br), std::invalid_argument);
}

TEST_CASE("per-unit round trip") {
    const NetworkCase c = parse_case_json(testing::minimal_case_json());
    const NetworkCase phys = denormalize_case(c);
    CHECK(phys.demand_p[0][0] == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(phys.generators[0].p_max == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(phys.generators[0].cost_a1 == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(phys.generators[0].cost_a2 == doctest::Approx(0.004).epsilon(1e-12));
    // normalize again: exact round trip
    NetworkCase back = phys;
    const double S = back.base_mva;
    back.generators[0].p_max /= S;
    CHECK(back.generators[0].p_max == doctest::Approx(c.generators[0].p_max).epsilon(1e-12));
}

namespace {

// independent cycle count: edges minus DFS tree edges
int dfs_cycle_count(const NetworkCase& c) {
    const int nb = c.num_buses();
    std::vector<std::vector<int>> adj(nb);
    for (const auto& br : c.branches) {
        adj[br.from_bus].push_back(br.to_bus);
        adj[br.to_bus].push_back(br.from_bus);
    }
    std::vector<char> seen(nb, 0);
    int tree_edges = 0, comps = 0;
    for (int r = 0; r < nb; ++r) {
        if (seen[r]) continue;
        ++comps;
        std::vector<int> stack{r};
        seen[r] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++tree_edges;
                    stack.push_back(w);
                }
            }
        }
    }
    (void)comps;
    return c.num_branches() - tree_edges;
}

NetworkCase random_connected_graph(std::mt19937& rng) {
    NetworkCase c;
    c.horizon = 1;
    std::uniform_int_distribution<int> nd(2, 12);
    const int nb = nd(rng);
    for (int b = 0; b < nb; ++b) c.buses.push_back({b + 1, 0.95, 1.05, 0, 0});
    // random spanning tree first, then extra chords
    for (int b = 1; b < nb; ++b) {
        std::uniform_int_distribution<int> pd(0, b - 1);
        Branch br;
        br.id = c.num_branches() + 1;
        br.from_bus = pd(rng);
        br.to_bus = b;
        br.x = 0.1;
        br.s_max = 1.0;
        c.branches.push_back(br);
    }
    std::uniform_int_distribution<int> extra(0, nb);
    const int chords = extra(rng);
    for (int k = 0; k < chords; ++k) {
        std::uniform_int_distribution<int> pd(0, nb - 1);
        const int a = pd(rng), b = pd(rng);
        if (a == b) continue;
        Branch br;
        br.id = c.num_branches() + 1;
        br.from_bus = a;
        br.to_bus = b;
        br.x = 0.1;
        br.s_max = 1.0;
        c.branches.push_back(br);
    }
    return c;
}

}  // namespace

TEST_CASE("cycle basis size on random connected graphs") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const NetworkCase c = random_connected_graph(rng);
        const CycleSet cs = cycle_basis(c);
        CHECK(cs.size() == dfs_cycle_count(c));
        CHECK(cs.size() == c.num_branches() - c.num_buses() + connected_components(c));
        // every cycle is a closed walk
        for (const auto& cyc : cs.cycles) {
            int node = -1;
            bool closed = true;
            int start = -1;
            for (size_t i = 0; i < cyc.branches.size(); ++i) {
                const auto& br = c.branches[cyc.branches[i]];
                const int a = cyc.signs[i] > 0 ? br.from_bus : br.to_bus;
                const int b = cyc.signs[i] > 0 ? br.to_bus : br.from_bus;
                if (node == -1) start = a;
                if (node != -1 && a != node) closed = false;
                node = b;
            }
            CHECK(closed);
            CHECK(node == start);
        }
    }
}

TEST_CASE("radial chain has no cycles; disjoint rings have one each") {
    NetworkCase chain;
    chain.horizon = 1;
    for (int b = 0; b < 3; ++b) chain.buses.push_back({b + 1, 0.95, 1.05, 0, 0});
    for (int b = 0; b + 1 < 3; ++b) {
        Branch br;
        br.from_bus = b;
        br.to_bus = b + 1;
        br.x = 0.1;
        chain.branches.push_back(br);
    }
    CHECK(cycle_basis(chain).empty());

    NetworkCase rings;
    rings.horizon = 1;
    for (int b = 0; b < 6; ++b) rings.buses.push_back({b + 1, 0.95, 1.05, 0, 0});
    auto add = [&](int f, int t) {
        Branch br;
        br.from_bus = f;
        br.to_bus = t;
        br.x = 0.1;
        rings.branches.push_back(br);
    };
    add(0, 1); add(1, 2); add(0, 2);
    add(3, 4); add(4, 5); add(3, 5);
    CHECK(cycle_basis(rings).size() == 2);
    CHECK(connected_components(rings) == 2);
}

TEST_CASE("initial lifted bounds from voltage boxes") {
    NetworkCase c = testing::two_bus_case(1);
    c.branches[0].theta_max = M_PI / 2;
    BoundsStore s = initial_cs_bounds(c);
    CHECK(s.c_bk(0, 0).lo == doctest::Approx(0.0));
    CHECK(s.c_bk(0, 0).hi == doctest::Approx(1.1025));
    CHECK(s.s_bk(0, 0).hi == doctest::Approx(1.1025));
    CHECK(s.s_bk(0, 0).lo == doctest::Approx(-1.1025));
    CHECK(s.c_bb(0, 0).lo == doctest::Approx(0.9025));
    CHECK(s.c_bb(0, 0).hi == doctest::Approx(1.1025));

    c.branches[0].theta_max = M_PI / 6;
    s = initial_cs_bounds(c);
    CHECK(s.s_bk(0, 0).hi == doctest::Approx(0.55125));

    NetworkCase fixed = c;
    fixed.buses[0].v_min = fixed.buses[0].v_max = 1.0;
    fixed.buses[1].v_min = fixed.buses[1].v_max = 1.0;
    fixed.branches[0].theta_max = 1e-300;  // effectively zero
    s = initial_cs_bounds(fixed);
    CHECK(s.c_bk(0, 0).hi == doctest::Approx(1.0));
    CHECK(s.c_bk(0, 0).lo == doctest::Approx(1.0));
    CHECK(s.s_bk(0, 0).hi == doctest::Approx(0.0));
}

TEST_CASE("sampled lifted values stay inside the initial boxes") {
    const NetworkCase c = testing::ring3_case(1);
    const BoundsStore s = initial_cs_bounds(c);
    std::mt19937 rng(3);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> vm(c.num_buses()), va(c.num_buses());
        for (int b = 0; b < c.num_buses(); ++b) {
            std::uniform_real_distribution<double> um(c.buses[b].v_min, c.buses[b].v_max);
            vm[b] = um(rng);
        }
        va[0] = 0.0;
        bool ok = true;
        // sample angles consistent with each branch's theta_max via a tree walk
        std::uniform_real_distribution<double> ua(-0.5, 0.5);
        for (int b = 1; b < c.num_buses(); ++b) va[b] = ua(rng);
        for (int l = 0; l < c.num_branches(); ++l) {
            const auto& br = c.branches[l];
            if (std::abs(va[br.from_bus] - va[br.to_bus]) > br.theta_max) ok = false;
        }
        if (!ok) continue;
        for (int l = 0; l < c.num_branches(); ++l) {
            const auto& br = c.branches[l];
            const double th = va[br.from_bus] - va[br.to_bus];
            const double cbk = vm[br.from_bus] * vm[br.to_bus] * std::cos(th);
            const double sbk = -vm[br.from_bus] * vm[br.to_bus] * std::sin(th);
            CHECK(s.c_bk(l, 0).contains(cbk, 1e-12));
            CHECK(s.s_bk(l, 0).contains(sbk, 1e-12));
        }
    }
}
