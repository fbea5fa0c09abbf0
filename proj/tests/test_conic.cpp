#include <doctest.h>

#include <cmath>
#include <random>

#include "ucac/backends.hpp"
#include "ucac/model.hpp"

using namespace ucac;

namespace {

SolveResult run_conic(const ModelInstance& m) {
    SolveRequest req;
    req.model = &m;
    return solve_conic(req);
}

}  // namespace

TEST_CASE("euclidean norm minimum via rotated cone") {
    ModelInstance m;
    const int x = m.add_var("x", 0.0, kInf);
    const int y = m.add_var("y", 3.0, 3.0);
    const int z = m.add_var("z", 4.0, 4.0);
    m.add_cone({{y, z}, x, x, "norm"});
    m.obj.lin = {{x, 1.0}};
    const SolveResult r = run_conic(m);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective == doctest::Approx(5.0).epsilon(1e-7));
    CHECK(r.x[x] == doctest::Approx(5.0).epsilon(1e-7));
    CHECK(std::abs(r.objective - r.bound) / std::abs(r.bound) <= 1e-7);
}

TEST_CASE("empty bound interval reports infeasible") {
    ModelInstance m;
    m.add_var("y", 2.0, 1.0);
    const SolveResult r = run_conic(m);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("infeasible linear system certificate") {
    ModelInstance m;
    const int x = m.add_var("x", 0.0, 1.0);
    const int y = m.add_var("y", 0.0, 1.0);
    m.add_linear({{{x, 1.0}, {y, 1.0}}, 3.0, 3.0, "sum"});  // impossible in the box
    m.obj.lin = {{x, 1.0}};
    const SolveResult r = run_conic(m);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("maximizing c on the rotated cone boundary") {
    ModelInstance m;
    const int c = m.add_var("c", -2.0, 2.0);
    const int s = m.add_var("s", -2.0, 2.0);
    const int cbb = m.add_var("cbb", 1.0, 1.0);
    const int ckk = m.add_var("ckk", 1.0, 1.0);
    m.add_cone({{c, s}, cbb, ckk, "soc"});
    m.obj.lin = {{c, -1.0}};  // maximize c
    const SolveResult r = run_conic(m);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[c] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unbounded direction detected") {
    ModelInstance m;
    const int x = m.add_var("x", 0.0, kInf);
    m.obj.lin = {{x, -1.0}};
    const SolveResult r = run_conic(m);
    CHECK(r.status == SolveStatus::unbounded);
}

TEST_CASE("convex quadratic rows become cones") {
    // min x + y st x^2 + y^2 <= 2 -> (-1, -1)
    ModelInstance m;
    const int x = m.add_var("x", -kInf, kInf);
    const int y = m.add_var("y", -kInf, kInf);
    QuadRow r;
    r.quad = {{x, x, 1.0}, {y, y, 1.0}};
    r.hi = 2.0;
    r.convex = true;
    m.add_quad(std::move(r));
    m.obj.lin = {{x, 1.0}, {y, 1.0}};
    const SolveResult res = run_conic(m);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.x[x] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(res.x[y] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("quadratic objective epigraph") {
    // min (x-2)^2 over x in [0, 10]
    ModelInstance m;
    const int x = m.add_var("x", 0.0, 10.0);
    m.obj.quad = {{x, x, 1.0}};
    m.obj.lin = {{x, -4.0}};
    m.obj.constant = 4.0;
    const SolveResult r = run_conic(m);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[x] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("knapsack via branch and bound") {
    ModelInstance m;
    const int y1 = m.add_var("y1", 0.0, 1.0, VarKind::binary);
    const int y2 = m.add_var("y2", 0.0, 1.0, VarKind::binary);
    m.add_linear({{{y1, 1.0}, {y2, 1.0}}, -kInf, 1.0, "cap"});
    m.obj.lin = {{y1, -3.0}, {y2, -2.0}};  // max 3 y1 + 2 y2
    SolveRequest req;
    req.model = &m;
    req.gap_target = 1e-9;
    const SolveResult r = solve_mixed_conic(req);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective == doctest::Approx(-3.0).epsilon(1e-7));
    CHECK(r.bound == doctest::Approx(-3.0).epsilon(1e-6));
    CHECK(r.x[y1] == doctest::Approx(1.0));
    CHECK(r.x[y2] == doctest::Approx(0.0));
}

TEST_CASE("mixed conic honors the requested gap") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uc(-5.0, 5.0);
    ModelInstance m;
    std::vector<int> ys;
    for (int i = 0; i < 8; ++i) ys.push_back(m.add_var("y", 0.0, 1.0, VarKind::binary));
    LinearRow cap;
    for (int v : ys) cap.lin.push_back({v, 1.0});
    cap.hi = 4.0;
    m.add_linear(cap);
    for (int v : ys) m.obj.lin.push_back({v, uc(rng)});
    SolveRequest req;
    req.model = &m;
    req.gap_target = 0.10;
    const SolveResult r = solve_mixed_conic(req);
    REQUIRE((r.status == SolveStatus::optimal || r.status == SolveStatus::feasible));
    if (r.status == SolveStatus::optimal)
        CHECK((r.objective - r.bound) / std::max(1e-12, std::abs(r.bound)) <= 0.10 + 1e-9);
}

TEST_CASE("bound validity against exhaustive enumeration") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uc(-3.0, 3.0);
    std::uniform_real_distribution<double> ur(0.5, 2.5);
    std::uniform_int_distribution<int> un(3, 7);
    int solved = 0;
    for (int inst = 0; inst < 200; ++inst) {
        ModelInstance m;
        const int n = un(rng);
        std::vector<int> ys;
        std::vector<double> cost(n);
        for (int i = 0; i < n; ++i) {
            ys.push_back(m.add_var("y", 0.0, 1.0, VarKind::binary));
            cost[i] = uc(rng);
            m.obj.lin.push_back({ys[i], cost[i]});
        }
        // two random <= rows
        std::vector<std::vector<double>> rows(2, std::vector<double>(n));
        std::vector<double> rhs(2);
        for (int r2 = 0; r2 < 2; ++r2) {
            LinearRow row;
            for (int i = 0; i < n; ++i) {
                rows[r2][i] = ur(rng);
                row.lin.push_back({ys[i], rows[r2][i]});
            }
            rhs[r2] = ur(rng) * n / 2.0;
            row.hi = rhs[r2];
            m.add_linear(row);
        }
        // enumeration oracle
        double best = kInf;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double v = 0.0;
            bool feas = true;
            for (int r2 = 0; r2 < 2 && feas; ++r2) {
                double a = 0.0;
                for (int i = 0; i < n; ++i)
                    if (mask & (1 << i)) a += rows[r2][i];
                feas = a <= rhs[r2] + 1e-12;
            }
            if (!feas) continue;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) v += cost[i];
            best = std::min(best, v);
        }
        SolveRequest req;
        req.model = &m;
        req.gap_target = 1e-7;
        const SolveResult r = solve_mixed_conic(req);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.bound <= best + 1e-6);
        CHECK(r.objective >= best - 1e-6);
        CHECK(r.objective == doctest::Approx(best).epsilon(1e-6));
        ++solved;
    }
    CHECK(solved == 200);
}

TEST_CASE("conic and mixed-conic agree on binary-free models") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uc(-2.0, 2.0);
    for (int inst = 0; inst < 20; ++inst) {
        ModelInstance m;
        std::vector<int> xs;
        for (int i = 0; i < 5; ++i) xs.push_back(m.add_var("x", -1.0, 2.0));
        LinearRow row;
        for (int v : xs) row.lin.push_back({v, uc(rng)});
        row.lo = -1.0;
        row.hi = 1.0;
        m.add_linear(row);
        for (int v : xs) m.obj.lin.push_back({v, uc(rng)});
        SolveRequest req;
        req.model = &m;
        const SolveResult a = solve_conic(req);
        const SolveResult b = solve_mixed_conic(req);
        REQUIRE(a.status == SolveStatus::optimal);
        REQUIRE(b.status == SolveStatus::optimal);
        CHECK(a.objective ==
              doctest::Approx(b.objective).epsilon(1e-7));
    }
}

TEST_CASE("nlp: unconstrained parabola") {
    ModelInstance m;
    const int x = m.add_var("x", -kInf, kInf);
    m.obj.quad = {{x, x, 1.0}};
    m.obj.lin = {{x, -4.0}};
    m.obj.constant = 4.0;
    SolveRequest req;
    req.model = &m;
    const SolveResult r = solve_nlp_local(req);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[x] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("nlp: circle-constrained linear objective") {
    ModelInstance m;
    const int x = m.add_var("x", -5.0, 5.0);
    const int y = m.add_var("y", -5.0, 5.0);
    QuadRow qr;
    qr.quad = {{x, x, 1.0}, {y, y, 1.0}};
    qr.hi = 1.0;
    m.add_quad(std::move(qr));
    m.obj.lin = {{x, 1.0}, {y, 1.0}};
    SolveRequest req;
    req.model = &m;
    const SolveResult r = solve_nlp_local(req);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[x] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-5));
    CHECK(r.x[y] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-5));
}

TEST_CASE("nlp: nonconvex two-sided quadratic row (ring)") {
    // stay on the unit circle ring [1, 1]: x^2 + y^2 = 1, minimize x => x = -1
    ModelInstance m;
    const int x = m.add_var("x", -2.0, 2.0);
    const int y = m.add_var("y", -2.0, 2.0);
    QuadRow qr;
    qr.quad = {{x, x, 1.0}, {y, y, 1.0}};
    qr.lo = 1.0;
    qr.hi = 1.0;
    m.add_quad(std::move(qr));
    m.obj.lin = {{x, 1.0}};
    SolveRequest req;
    req.model = &m;
    std::vector<double> warm = {-0.8, 0.3};
    req.warm_start = warm;
    const SolveResult r = solve_nlp_local(req);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[x] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(std::abs(r.x[y]) == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("problem exchange round trip") {
    ModelInstance m;
    const int x = m.add_var("x", 0.0, 2.5);
    const int y = m.add_var("y", -kInf, kInf, VarKind::binary);
    m.add_linear({{{x, 1.5}, {y, -1.0}}, 0.0, 3.0, "row"});
    QuadRow qr;
    qr.quad = {{x, y, 2.0}};
    qr.lin = {{x, 1.0}};
    qr.lo = -1.0;
    qr.name = "q";
    m.add_quad(qr);
    m.add_cone({{x}, y, y, "cone"});
    m.obj.lin = {{x, 1.0}};
    m.obj.quad = {{y, y, 0.5}};
    m.obj.constant = 7.0;
    const std::string text = model_to_json(m);
    const ModelInstance m2 = model_from_json(text);
    CHECK(model_to_json(m2) == text);
    CHECK(m2.vars[0].hi == doctest::Approx(2.5));
    CHECK(m2.quads[0].lo == doctest::Approx(-1.0));
    CHECK(m2.quads[0].hi == kInf);
    CHECK(m2.cones[0].u == y);
}
