#include "ucac/backends.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <queue>
#include <sstream>

#include "ucac/conic.hpp"
#include <json.hpp>

namespace ucac {

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

/// Mapping from a reduced ModelInstance to the standard conic form.
struct ConicForm {
    StandardConic prob;
    int aux_obj_var = -1;  // epigraph variable when the objective had a quad part
    bool ok = false;
    std::string error;
};

ConicForm to_standard_form(const ModelInstance& mi) {
    ConicForm f;
    ModelInstance work = mi;  // may add an epigraph variable

    if (!work.obj.quad.empty()) {
        bool diag_psd = true;
        for (const auto& t : work.obj.quad)
            if (t.v1 != t.v2 || t.coef < 0) diag_psd = false;
        if (!diag_psd) {
            f.error = "objective quadratic part is not diagonal PSD";
            return f;
        }
        const int epi = work.add_var("_obj_epi", -kInf, kInf);
        QuadRow r;
        r.quad = work.obj.quad;
        r.lin.push_back({epi, -1.0});
        r.hi = 0.0;
        r.convex = true;
        r.name = "_obj_epigraph";
        work.add_quad(std::move(r));
        work.obj.quad.clear();
        work.obj.lin.push_back({epi, 1.0});
        f.aux_obj_var = epi;
    }

    const int n = work.num_vars();
    std::vector<Eigen::Triplet<double>> At, Gt;
    std::vector<double> b, h;
    std::vector<int> soc_dims;
    int neq = 0;

    auto add_eq = [&](const std::vector<LinTerm>& lin, double rhs) {
        for (const auto& t : lin) At.emplace_back(neq, t.var, t.coef);
        b.push_back(rhs);
        ++neq;
    };
    // Inequality rows go in two passes so the nonneg block precedes SOC blocks.
    struct IneqRow { std::vector<LinTerm> lin; double rhs; };
    std::vector<IneqRow> ineq;
    auto add_ineq = [&](std::vector<LinTerm> lin, double rhs) {
        ineq.push_back({std::move(lin), rhs});
    };

    for (int i = 0; i < n; ++i) {
        const auto& v = work.vars[i];
        if (v.lo == v.hi) {
            add_eq({{i, 1.0}}, v.lo);  // pinned variable, no cone interior needed
            continue;
        }
        if (v.hi < kInf) add_ineq({{i, 1.0}}, v.hi);
        if (v.lo > -kInf) add_ineq({{i, -1.0}}, -v.lo);
    }
    for (const auto& r : work.linear) {
        if (r.lo == r.hi) {
            add_eq(r.lin, r.lo);
        } else {
            if (r.hi < kInf) add_ineq(r.lin, r.hi);
            if (r.lo > -kInf) {
                std::vector<LinTerm> neg = r.lin;
                for (auto& t : neg) t.coef = -t.coef;
                add_ineq(std::move(neg), -r.lo);
            }
        }
    }

    const int nnl = static_cast<int>(ineq.size());
    int mrow = nnl;
    // per-row equilibration of the nonneg block
    for (int i = 0; i < nnl; ++i) {
        double scale = std::abs(ineq[i].rhs);
        for (const auto& t : ineq[i].lin) scale = std::max(scale, std::abs(t.coef));
        scale = std::max(scale, 1e-8);
        for (const auto& t : ineq[i].lin) Gt.emplace_back(i, t.var, t.coef / scale);
        h.push_back(ineq[i].rhs / scale);
    }

    // convex quadratic rows: sum d_i x_i^2 + a'x <= hi as an SOC block
    for (const auto& r : work.quads) {
        if (!r.convex || r.lo > -kInf || r.hi == kInf) {
            f.error = "quadratic row '" + r.name + "' is not conic-representable";
            return f;
        }
        for (const auto& t : r.quad) {
            if (t.v1 != t.v2 || t.coef < 0) {
                f.error = "quadratic row '" + r.name + "' is not diagonal PSD";
                return f;
            }
        }
        // u = hi - a'x >= sum d_i x_i^2 :  ||(u-1, 2 sqrt(d_i) x_i)|| <= u+1
        const int dim = static_cast<int>(r.quad.size()) + 2;
        for (const auto& t : r.lin) {
            Gt.emplace_back(mrow, t.var, t.coef);
            Gt.emplace_back(mrow + 1, t.var, t.coef);
        }
        h.push_back(r.hi + 1.0);
        h.push_back(r.hi - 1.0);
        int k = 2;
        for (const auto& t : r.quad) {
            Gt.emplace_back(mrow + k, t.v1, -2.0 * std::sqrt(t.coef));
            h.push_back(0.0);
            ++k;
        }
        soc_dims.push_back(dim);
        mrow += dim;
    }

    // rotated cones: ||(xu - xv, 2 x_m)|| <= xu + xv
    for (const auto& cn : work.cones) {
        const int dim = static_cast<int>(cn.members.size()) + 2;
        Gt.emplace_back(mrow, cn.u, -1.0);
        Gt.emplace_back(mrow, cn.v, -1.0);
        h.push_back(0.0);
        Gt.emplace_back(mrow + 1, cn.u, -1.0);
        Gt.emplace_back(mrow + 1, cn.v, 1.0);
        h.push_back(0.0);
        int k = 2;
        for (int mem : cn.members) {
            Gt.emplace_back(mrow + k, mem, -2.0);
            h.push_back(0.0);
            ++k;
        }
        soc_dims.push_back(dim);
        mrow += dim;
    }

    f.prob.n = n;
    f.prob.A.resize(neq, n);
    f.prob.A.setFromTriplets(At.begin(), At.end());
    f.prob.G.resize(mrow, n);
    f.prob.G.setFromTriplets(Gt.begin(), Gt.end());
    f.prob.b = Eigen::Map<Eigen::VectorXd>(b.data(), neq);
    f.prob.h = Eigen::Map<Eigen::VectorXd>(h.data(), mrow);
    f.prob.c = Eigen::VectorXd::Zero(n);
    for (const auto& t : work.obj.lin) f.prob.c[t.var] += t.coef;
    f.prob.dims.nonneg = nnl;
    f.prob.dims.soc = std::move(soc_dims);
    f.ok = true;
    return f;
}

SolveResult builtin_solve_conic(const SolveRequest& req) {
    const auto t0 = clock_t_::now();
    SolveResult out;
    const ModelInstance& mi = *req.model;
    for (const auto& v : mi.vars) {
        if (v.lo > v.hi + 1e-12) {
            out.status = SolveStatus::infeasible;
            out.bound = kInf;
            out.message = "empty bound interval on " + v.name;
            return out;
        }
    }
    ReducedModel red = eliminate_fixed(mi, 1e-9, /*keep_cone_participants=*/true);

    if (red.model.num_vars() == 0) {
        // everything fixed: evaluate
        std::vector<double> x = red.inflate({});
        out.x = x;
        out.objective = mi.eval_objective(x);
        const double viol = mi.max_violation(x);
        out.status = viol <= req.feas_tol ? SolveStatus::optimal : SolveStatus::infeasible;
        out.bound = out.status == SolveStatus::optimal ? out.objective : -kInf;
        out.wall_s = seconds_since(t0);
        return out;
    }

    ConicForm f = to_standard_form(red.model);
    if (!f.ok) {
        out.message = f.error;
        return out;
    }
    // objective scaling for conditioning
    const double cscale = std::max(1.0, f.prob.c.lpNorm<Eigen::Infinity>());
    f.prob.c /= cscale;

    ConicSettings st;
    st.feastol = 1e-9;
    st.abstol = 1e-9;
    st.reltol = 1e-9;
    ConicSolution cs = solve_standard_conic(f.prob, st);
    out.iterations = cs.iterations;
    out.wall_s = seconds_since(t0);

    const double shift = red.model.obj.constant;
    switch (cs.status) {
        case ConicStatus::optimal: {
            std::vector<double> xr(cs.x.data(), cs.x.data() + cs.x.size());
            if (f.aux_obj_var >= 0) xr.resize(red.model.num_vars());
            xr.resize(red.model.num_vars());
            out.x = red.inflate(xr);
            out.objective = cs.pobj * cscale + shift;
            out.bound = cs.dobj * cscale + shift;
            out.status = SolveStatus::optimal;
            break;
        }
        case ConicStatus::primal_infeasible:
            out.status = SolveStatus::infeasible;
            out.message = cs.message;
            break;
        case ConicStatus::dual_infeasible:
            out.status = SolveStatus::unbounded;
            out.message = cs.message;
            break;
        case ConicStatus::max_iterations:
            // keep the point if it is decent; callers must not trust it as a bound
            if (cs.pres < 1e-6 && cs.dres < 1e-6 && cs.relgap < 1e-6) {
                std::vector<double> xr(cs.x.data(), cs.x.data() + cs.x.size());
                xr.resize(red.model.num_vars());
                out.x = red.inflate(xr);
                out.objective = cs.pobj * cscale + shift;
                out.bound = cs.dobj * cscale + shift;
                out.status = SolveStatus::optimal;
                out.message = "loose convergence at iteration cap";
            } else {
                out.status = SolveStatus::error;
                out.message = "iteration limit without convergence";
            }
            break;
        default:
            out.status = SolveStatus::error;
            out.message = cs.message.empty() ? "numerical failure" : cs.message;
    }
    return out;
}

/// Branch-and-bound node: bound overrides relative to the root model.
struct BnbNode {
    double bound;  // parent relaxation value
    int order;
    std::vector<std::pair<int, double>> fixes;  // (var, value)
};

struct NodeCompare {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.order > b.order;                          // FIFO tie-break
    }
};

SolveResult builtin_solve_mixed_conic(const SolveRequest& req) {
    const auto t0 = clock_t_::now();
    const ModelInstance& mi = *req.model;

    std::vector<int> bins;
    for (int i = 0; i < mi.num_vars(); ++i)
        if (mi.vars[i].kind == VarKind::binary && mi.vars[i].hi - mi.vars[i].lo > 0.5)
            bins.push_back(i);

    if (bins.empty()) return builtin_solve_conic(req);

    const double int_tol = 1e-6;
    SolveResult best;
    best.status = SolveStatus::infeasible;
    double incumbent = kInf;
    double global_bound = -kInf;

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeCompare> open;
    open.push({-kInf, 0, {}});
    int order = 1;
    long nodes = 0;
    const long max_nodes = 2000000;

    ModelInstance scratch = mi;
    auto solve_node = [&](const BnbNode& node) {
        for (auto& v : scratch.vars) v.lo = 0, v.hi = 0;  // reset below
        scratch.vars = mi.vars;
        for (auto [var, val] : node.fixes) {
            scratch.vars[var].lo = val;
            scratch.vars[var].hi = val;
        }
        SolveRequest r = req;
        r.model = &scratch;
        return builtin_solve_conic(r);
    };

    while (!open.empty()) {
        if (seconds_since(t0) > req.time_limit_s) {
            best.status = SolveStatus::time_limit;
            break;
        }
        BnbNode node = open.top();
        open.pop();
        // best-bound search: top of heap defines the certified global bound
        global_bound = std::max(global_bound, node.bound);
        if (incumbent < kInf) {
            const double gap = (incumbent - global_bound) / std::max(1e-12, std::abs(global_bound));
            if (gap <= req.gap_target) break;
        }
        if (node.bound >= incumbent - 1e-12 * std::max(1.0, std::abs(incumbent))) continue;
        if (++nodes > max_nodes) {
            best.status = SolveStatus::error;
            best.message = "node limit";
            break;
        }

        SolveResult rel = solve_node(node);
        if (rel.status == SolveStatus::infeasible) continue;
        if (rel.status == SolveStatus::unbounded) {
            best.status = SolveStatus::unbounded;
            best.message = "relaxation unbounded";
            return best;
        }
        if (rel.status != SolveStatus::optimal) {
            best.status = SolveStatus::error;
            best.message = "node relaxation failed: " + rel.message;
            break;
        }
        if (rel.bound >= incumbent - 1e-12 * std::max(1.0, std::abs(incumbent))) continue;

        // most fractional binary, ties by lowest index
        int branch_var = -1;
        double best_frac = int_tol;
        for (int v : bins) {
            const double val = rel.x[v];
            const double frac = std::min(val - std::floor(val), std::ceil(val) - val);
            const double dist = std::min(std::abs(val), std::abs(1.0 - val));
            const double score = std::min(frac, dist);
            if (score > best_frac + 1e-12) {
                best_frac = score;
                branch_var = v;
            }
        }
        if (branch_var < 0) {
            // integral point
            if (rel.objective < incumbent) {
                incumbent = rel.objective;
                best.status = SolveStatus::optimal;
                best.x = rel.x;
                for (int v : bins) best.x[v] = std::round(best.x[v]);
                best.objective = rel.objective;
            }
            continue;
        }
        BnbNode lo = node, hi = node;
        lo.bound = hi.bound = rel.bound;
        lo.order = order++;
        hi.order = order++;
        lo.fixes.push_back({branch_var, 0.0});
        hi.fixes.push_back({branch_var, 1.0});
        open.push(std::move(lo));
        open.push(std::move(hi));
    }

    if (open.empty() && best.status == SolveStatus::optimal) {
        global_bound = incumbent;  // tree exhausted
    } else if (!open.empty()) {
        global_bound = std::max(global_bound, open.top().bound);
    }
    if (best.status == SolveStatus::optimal || best.status == SolveStatus::time_limit) {
        best.bound = std::min(global_bound, incumbent);
        if (best.status == SolveStatus::optimal && incumbent < kInf) {
            const double gap =
                (incumbent - best.bound) / std::max(1e-12, std::abs(best.bound));
            if (gap > req.gap_target * (1 + 1e-9)) best.status = SolveStatus::feasible;
        }
        if (best.status == SolveStatus::time_limit && incumbent < kInf) {
            best.objective = incumbent;
        }
    } else if (best.status == SolveStatus::infeasible) {
        best.bound = kInf;
    }
    best.wall_s = seconds_since(t0);
    return best;
}

std::string g_cmd[3];
bool g_env_loaded = false;
std::mutex g_cmd_mutex;

void load_env_commands() {
    if (g_env_loaded) return;
    const char* names[3] = {"UCAC_BACKEND_CONIC", "UCAC_BACKEND_MIXED_CONIC",
                            "UCAC_BACKEND_NLP"};
    for (int i = 0; i < 3; ++i)
        if (const char* v = std::getenv(names[i]); v && *v && g_cmd[i].empty())
            g_cmd[i] = v;
    g_env_loaded = true;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::time_limit: return "time-limit";
        case SolveStatus::error: return "error";
    }
    return "?";
}

void set_backend_command(BackendClass cls, const std::string& command) {
    std::lock_guard<std::mutex> lk(g_cmd_mutex);
    load_env_commands();
    g_cmd[static_cast<int>(cls)] = command;
}

std::string backend_command(BackendClass cls) {
    std::lock_guard<std::mutex> lk(g_cmd_mutex);
    load_env_commands();
    return g_cmd[static_cast<int>(cls)];
}

std::string result_to_json(const SolveResult& r) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    j["objective"] = r.objective;
    j["bound"] = r.bound == -kInf ? nlohmann::json("-inf") : nlohmann::json(r.bound);
    j["x"] = r.x;
    j["kkt_residual"] = r.kkt_residual == kInf ? nlohmann::json("inf")
                                               : nlohmann::json(r.kkt_residual);
    j["wall_s"] = r.wall_s;
    j["iterations"] = r.iterations;
    j["message"] = r.message;
    return j.dump();
}

SolveResult result_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SolveResult r;
    const std::string st = j.value("status", "error");
    for (SolveStatus s : {SolveStatus::optimal, SolveStatus::feasible,
                          SolveStatus::infeasible, SolveStatus::unbounded,
                          SolveStatus::time_limit, SolveStatus::error})
        if (st == to_string(s)) r.status = s;
    r.objective = j.value("objective", 0.0);
    if (j.contains("bound") && j.at("bound").is_number()) r.bound = j.at("bound").get<double>();
    if (j.contains("x")) r.x = j.at("x").get<std::vector<double>>();
    if (j.contains("kkt_residual") && j.at("kkt_residual").is_number())
        r.kkt_residual = j.at("kkt_residual").get<double>();
    r.wall_s = j.value("wall_s", 0.0);
    r.iterations = j.value("iterations", 0);
    r.message = j.value("message", "");
    return r;
}

SolveResult solve_via_adapter(const std::string& cmd, const SolveRequest& req) {
    SolveResult out;
    char tmpl[] = "/tmp/ucac_adapter_XXXXXX";
    if (!mkdtemp(tmpl)) {
        out.message = "adapter: cannot create temp dir";
        return out;
    }
    const std::string dir = tmpl;
    const std::string pfile = dir + "/problem.json", rfile = dir + "/result.json";
    {
        std::ofstream f(pfile);
        f << model_to_json(*req.model);
    }
    std::ostringstream full;
    full << cmd << " '" << pfile << "' '" << rfile << "'";
    const int rc = std::system(full.str().c_str());
    if (rc != 0) {
        out.message = "adapter command failed with code " + std::to_string(rc);
        return out;
    }
    std::ifstream rf(rfile);
    if (!rf) {
        out.message = "adapter produced no result file";
        return out;
    }
    std::stringstream ss;
    ss << rf.rdbuf();
    try {
        out = result_from_json(ss.str());
    } catch (const std::exception& e) {
        out.status = SolveStatus::error;
        out.message = std::string("adapter result parse error: ") + e.what();
    }
    return out;
}

SolveResult solve_conic(const SolveRequest& req) {
    const std::string cmd = backend_command(BackendClass::conic);
    if (!cmd.empty()) return solve_via_adapter(cmd, req);
    return builtin_solve_conic(req);
}

SolveResult solve_mixed_conic(const SolveRequest& req) {
    const std::string cmd = backend_command(BackendClass::mixed_conic);
    if (!cmd.empty()) return solve_via_adapter(cmd, req);
    return builtin_solve_mixed_conic(req);
}

}  // namespace ucac
