#include "ucac/uc_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ucac {

namespace {

std::string tag(const char* base, int g, int t) {
    std::ostringstream os;
    os << base << "[" << g << "," << t << "]";
    return os.str();
}

}  // namespace

VariableLayout make_layout(const NetworkCase& c, VariableLayout::Net net) {
    VariableLayout L;
    L.T = c.horizon;
    L.G = c.num_generators();
    L.B = c.num_buses();
    L.L = c.num_branches();
    L.SC = c.num_condensers();
    L.net = net;
    int nseg = 0;
    for (const auto& g : c.generators) {
        L.seg_count.push_back(static_cast<int>(g.startup.size()));
        L.seg_offset.push_back(nseg);
        nseg += static_cast<int>(g.startup.size()) * L.T;
    }
    const int GT = L.G * L.T;
    L.off_y = 0;
    L.off_u = GT;
    L.off_w = 2 * GT;
    L.off_delta = 3 * GT;
    L.off_p = L.off_delta + nseg;
    L.off_r = L.off_p + GT;
    L.off_cp = L.off_r + GT;
    L.off_q = L.off_cp + GT;
    L.off_qsc = L.off_q + GT;
    L.off_net = L.off_qsc + L.SC * L.T;
    if (net == VariableLayout::Net::voltage) {
        L.off_flow = L.off_net + 2 * L.B * L.T;
    } else if (net == VariableLayout::Net::lifted) {
        L.off_flow = L.off_net + L.B * L.T + 2 * L.L * L.T;
    } else {
        L.off_flow = L.off_net;
    }
    L.n_core = L.off_flow + (net == VariableLayout::Net::none ? 0 : 4 * L.L * L.T);
    return L;
}

void add_uc_skeleton(ModelInstance& m, const VariableLayout& lay, const NetworkCase& c) {
    const int T = lay.T, G = lay.G;

    // declare the core block in layout order
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t)
            m.add_var(tag("y", g, t), 0.0, 1.0, VarKind::binary);
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t) m.add_var(tag("u", g, t), 0.0, 1.0);
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t) m.add_var(tag("w", g, t), 0.0, 1.0);
    for (int g = 0; g < G; ++g)
        for (int s = 0; s < lay.seg_count[g]; ++s)
            for (int t = 0; t < T; ++t) m.add_var("delta", 0.0, 1.0);
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t)
            m.add_var(tag("p", g, t), 0.0, c.generators[g].p_max);
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t)
            m.add_var(tag("r", g, t), 0.0, c.generators[g].p_max);
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t) m.add_var(tag("cp", g, t), -kInf, kInf);
    for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        for (int t = 0; t < T; ++t)
            m.add_var(tag("q", g, t), std::min(gen.q_min, 0.0), std::max(gen.q_max, 0.0));
    }
    for (int s = 0; s < lay.SC; ++s)
        for (int t = 0; t < T; ++t)
            m.add_var("qsc", c.condensers[s].q_min, c.condensers[s].q_max);

    for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        const History h = history_of(gen);
        const int S = lay.seg_count[g];

        for (int t = 0; t < T; ++t) {
            // production cost epigraph
            QuadRow cost;
            if (gen.cost_a2 > 0) cost.quad.push_back({lay.p(g, t), lay.p(g, t), gen.cost_a2});
            cost.lin.push_back({lay.p(g, t), gen.cost_a1});
            cost.lin.push_back({lay.y(g, t), gen.cost_a0});
            cost.lin.push_back({lay.cp(g, t), -1.0});
            cost.hi = 0.0;
            cost.convex = true;
            cost.name = tag("cost_epi", g, t);
            m.add_quad(std::move(cost));
            m.obj.lin.push_back({lay.cp(g, t), 1.0});

            // startup segment windows (all but the last segment)
            const int tt = t + 1;  // 1-indexed period
            for (int seg = 0; seg + 1 < S; ++seg) {
                const int w_from = tt + 1 - gen.startup[seg + 1].hours_offline;
                const int w_to = tt - gen.startup[seg].hours_offline;
                LinearRow row;
                row.lin.push_back({lay.delta(g, seg, t), 1.0});
                double hist = 0.0;
                for (int tp = w_from; tp <= w_to; ++tp) {
                    if (tp >= 1)
                        row.lin.push_back({lay.w(g, tp - 1), -1.0});
                    else
                        hist += h.w_at(tp);
                }
                row.hi = hist;
                row.name = tag("su_window", g, t);
                m.add_linear(std::move(row));
            }
            // startup type selection
            LinearRow sel;
            sel.lin.push_back({lay.u(g, t), 1.0});
            for (int seg = 0; seg < S; ++seg) sel.lin.push_back({lay.delta(g, seg, t), -1.0});
            sel.lo = sel.hi = 0.0;
            sel.name = tag("su_select", g, t);
            m.add_linear(std::move(sel));
            for (int seg = 0; seg < S; ++seg)
                m.obj.lin.push_back({lay.delta(g, seg, t), gen.startup[seg].cost});
            m.obj.lin.push_back({lay.w(g, t), gen.shutdown_cost});

            // minimum uptime
            {
                LinearRow row;
                double hist = 0.0;
                for (int tp = tt - gen.min_up + 1; tp <= tt; ++tp) {
                    if (tp >= 1)
                        row.lin.push_back({lay.u(g, tp - 1), 1.0});
                    else
                        hist += h.u_at(tp);
                }
                row.lin.push_back({lay.y(g, t), -1.0});
                row.hi = -hist;
                row.name = tag("min_up", g, t);
                m.add_linear(std::move(row));
            }
            // minimum downtime
            {
                LinearRow row;
                double hist = 0.0;
                for (int tp = tt - gen.min_down + 1; tp <= tt; ++tp) {
                    if (tp >= 1)
                        row.lin.push_back({lay.w(g, tp - 1), 1.0});
                    else
                        hist += h.w_at(tp);
                }
                row.lin.push_back({lay.y(g, t), 1.0});
                row.hi = 1.0 - hist;
                row.name = tag("min_down", g, t);
                m.add_linear(std::move(row));
            }
            // start/stop logic
            {
                LinearRow row;
                row.lin.push_back({lay.y(g, t), 1.0});
                double rhs = 0.0;
                if (t >= 1)
                    row.lin.push_back({lay.y(g, t - 1), -1.0});
                else
                    rhs = h.y_at(0);
                row.lin.push_back({lay.u(g, t), -1.0});
                row.lin.push_back({lay.w(g, t), 1.0});
                row.lo = row.hi = rhs;
                row.name = tag("logic", g, t);
                m.add_linear(std::move(row));
            }
            // capacity, split by minimum uptime as in the 3BIN formulation
            const double pmax = gen.p_max;
            auto cap_row = [&](bool with_u, bool with_w, const char* nm) {
                LinearRow row;
                row.lin.push_back({lay.p(g, t), 1.0});
                row.lin.push_back({lay.r(g, t), 1.0});
                row.lin.push_back({lay.y(g, t), -pmax});
                if (with_u) row.lin.push_back({lay.u(g, t), pmax - gen.startup_cap});
                if (with_w && t + 1 < T)
                    row.lin.push_back({lay.w(g, t + 1), pmax - gen.shutdown_cap});
                row.hi = 0.0;
                row.name = tag(nm, g, t);
                m.add_linear(std::move(row));
            };
            if (gen.min_up == 1) {
                cap_row(true, false, "cap_su");
                cap_row(false, true, "cap_sd");
            } else {
                cap_row(true, true, "cap");
            }
            // output floor
            {
                LinearRow row;
                row.lin.push_back({lay.p(g, t), 1.0});
                row.lin.push_back({lay.y(g, t), -gen.p_min});
                row.lo = 0.0;
                row.name = tag("p_floor", g, t);
                m.add_linear(std::move(row));
            }
            // ramping
            {
                LinearRow up;
                up.lin.push_back({lay.p(g, t), 1.0});
                up.lin.push_back({lay.r(g, t), 1.0});
                double rhs = gen.ramp_up;
                if (t >= 1)
                    up.lin.push_back({lay.p(g, t - 1), -1.0});
                else
                    rhs += gen.initial_output;
                up.hi = rhs;
                up.name = tag("ramp_up", g, t);
                m.add_linear(std::move(up));

                LinearRow dn;
                dn.lin.push_back({lay.p(g, t), -1.0});
                double rhs2 = gen.ramp_down;
                if (t >= 1)
                    dn.lin.push_back({lay.p(g, t - 1), 1.0});
                else
                    rhs2 -= gen.initial_output;
                dn.hi = rhs2;
                dn.name = tag("ramp_down", g, t);
                m.add_linear(std::move(dn));
            }
            // reactive output window
            {
                LinearRow hiRow;
                hiRow.lin.push_back({lay.q(g, t), 1.0});
                hiRow.lin.push_back({lay.y(g, t), -gen.q_max});
                hiRow.hi = 0.0;
                hiRow.name = tag("q_hi", g, t);
                m.add_linear(std::move(hiRow));
                LinearRow loRow;
                loRow.lin.push_back({lay.q(g, t), 1.0});
                loRow.lin.push_back({lay.y(g, t), -gen.q_min});
                loRow.lo = 0.0;
                loRow.name = tag("q_lo", g, t);
                m.add_linear(std::move(loRow));
            }
        }
    }
    // spinning reserve requirement
    for (int t = 0; t < T; ++t) {
        LinearRow row;
        for (int g = 0; g < G; ++g) row.lin.push_back({lay.r(g, t), 1.0});
        row.lo = c.reserve[t];
        row.name = "reserve[" + std::to_string(t) + "]";
        m.add_linear(std::move(row));
    }
}

std::vector<std::string> validate_commitment(const CommitmentTrajectory& d,
                                             const NetworkCase& c, double tol) {
    std::vector<std::string> bad;
    const int T = c.horizon, G = c.num_generators();
    if (static_cast<int>(d.y.size()) != G * T || static_cast<int>(d.u.size()) != G * T ||
        static_cast<int>(d.w.size()) != G * T) {
        bad.push_back("trajectory does not cover every generator and period");
        return bad;
    }
    auto at = [T](const std::vector<double>& v, int g, int t) { return v[g * T + t]; };
    for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        const History h = history_of(gen);
        for (int t = 0; t < T; ++t) {
            const double yv = at(d.y, g, t);
            const double uv = at(d.u, g, t);
            const double wv = at(d.w, g, t);
            if (std::min(std::abs(yv), std::abs(1 - yv)) > tol)
                bad.push_back(tag("fractional y", g, t));
            const double yprev = t >= 1 ? at(d.y, g, t - 1) : h.y_at(0);
            if (std::abs(yv - yprev - uv + wv) > tol)
                bad.push_back(tag("logic violated", g, t));
            if (uv * wv > tol) bad.push_back(tag("simultaneous start/stop", g, t));
            const int tt = t + 1;
            double usum = 0.0, wsum = 0.0;
            for (int tp = tt - gen.min_up + 1; tp <= tt; ++tp)
                usum += tp >= 1 ? at(d.u, g, tp - 1) : h.u_at(tp);
            if (usum > yv + tol) bad.push_back(tag("min uptime violated", g, t));
            for (int tp = tt - gen.min_down + 1; tp <= tt; ++tp)
                wsum += tp >= 1 ? at(d.w, g, tp - 1) : h.w_at(tp);
            if (wsum > 1 - yv + tol) bad.push_back(tag("min downtime violated", g, t));
        }
    }
    return bad;
}

CommitmentTrajectory derive_commitment(const NetworkCase& c, const std::vector<double>& y) {
    const int T = c.horizon, G = c.num_generators();
    CommitmentTrajectory d;
    d.horizon = T;
    d.y.resize(G * T);
    d.u.assign(G * T, 0.0);
    d.w.assign(G * T, 0.0);
    d.delta.resize(G);
    for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        const History h = history_of(gen);
        const int S = static_cast<int>(gen.startup.size());
        d.delta[g].assign(S * T, 0.0);
        for (int t = 0; t < T; ++t) {
            const double yv = std::round(y[g * T + t]);
            d.y[g * T + t] = yv;
            const double yprev = t >= 1 ? d.y[g * T + t - 1] : h.y_at(0);
            d.u[g * T + t] = std::max(yv - yprev, 0.0);
            d.w[g * T + t] = std::max(yprev - yv, 0.0);
        }
        for (int t = 0; t < T; ++t) {
            if (d.u[g * T + t] < 0.5) continue;
            const int tt = t + 1;
            // cheapest startup segment whose window saw a shutdown
            int chosen = S - 1;
            for (int seg = 0; seg + 1 < S; ++seg) {
                const int w_from = tt + 1 - gen.startup[seg + 1].hours_offline;
                const int w_to = tt - gen.startup[seg].hours_offline;
                bool hit = false;
                for (int tp = w_from; tp <= w_to && !hit; ++tp)
                    hit = tp >= 1 ? d.w[g * T + tp - 1] > 0.5 : h.w_at(tp) > 0.5;
                if (hit) {
                    chosen = seg;
                    break;
                }
            }
            d.delta[g][chosen * T + t] = 1.0;
        }
    }
    return d;
}

CostBreakdown evaluate_cost(const SolutionPoint& sol, const NetworkCase& c) {
    CostBreakdown out;
    const int T = c.horizon, G = c.num_generators();
    for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        for (int t = 0; t < T; ++t) {
            const double pv = sol.p.empty() ? 0.0 : sol.p[g * T + t];
            const double yv = sol.y.empty() ? 0.0 : sol.y[g * T + t];
            const double quad = gen.cost_a2 * pv * pv + gen.cost_a1 * pv + gen.cost_a0 * yv;
            const double epi = sol.cp.empty() ? quad : sol.cp[g * T + t];
            out.production += std::max(quad, epi);
            if (!sol.w.empty()) out.shutdown += gen.shutdown_cost * sol.w[g * T + t];
            if (!sol.delta.empty() && !sol.delta[g].empty()) {
                for (size_t seg = 0; seg < gen.startup.size(); ++seg)
                    out.startup += gen.startup[seg].cost * sol.delta[g][seg * T + t];
            }
        }
    }
    return out;
}

void fix_commitment(ModelInstance& m, const VariableLayout& lay, const NetworkCase& c,
                    const CommitmentTrajectory& d) {
    const int T = lay.T;
    for (int g = 0; g < lay.G; ++g) {
        for (int t = 0; t < T; ++t) {
            auto pin = [&](int idx, double v) { m.vars[idx].lo = m.vars[idx].hi = v; };
            pin(lay.y(g, t), d.y[g * T + t]);
            pin(lay.u(g, t), d.u[g * T + t]);
            pin(lay.w(g, t), d.w[g * T + t]);
            for (int seg = 0; seg < lay.seg_count[g]; ++seg)
                pin(lay.delta(g, seg, t),
                    d.delta.empty() ? 0.0 : d.delta[g][seg * T + t]);
        }
    }
    (void)c;
}

}  // namespace ucac
