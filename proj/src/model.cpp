#include "ucac/model.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include <json.hpp>

using nlohmann::json;

namespace ucac {

void canonicalize(std::vector<LinTerm>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    size_t w = 0;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (w > 0 && terms[w - 1].var == terms[i].var) {
            terms[w - 1].coef += terms[i].coef;
        } else {
            terms[w++] = terms[i];
        }
    }
    terms.resize(w);
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const LinTerm& t) { return t.coef == 0.0; }),
                terms.end());
}

void canonicalize(std::vector<QuadTerm>& terms) {
    for (auto& t : terms)
        if (t.v1 > t.v2) std::swap(t.v1, t.v2);
    std::sort(terms.begin(), terms.end(), [](const QuadTerm& a, const QuadTerm& b) {
        return std::pair(a.v1, a.v2) < std::pair(b.v1, b.v2);
    });
    size_t w = 0;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (w > 0 && terms[w - 1].v1 == terms[i].v1 && terms[w - 1].v2 == terms[i].v2) {
            terms[w - 1].coef += terms[i].coef;
        } else {
            terms[w++] = terms[i];
        }
    }
    terms.resize(w);
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const QuadTerm& t) { return t.coef == 0.0; }),
                terms.end());
}

double ModelInstance::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    auto track = [&](double lo, double hi, double v) {
        if (lo > -kInf) worst = std::max(worst, lo - v);
        if (hi < kInf) worst = std::max(worst, v - hi);
    };
    for (int i = 0; i < num_vars(); ++i) track(vars[i].lo, vars[i].hi, x[i]);
    for (const auto& r : linear) track(r.lo, r.hi, eval_lin(r.lin, x));
    for (const auto& r : quads) track(r.lo, r.hi, eval_quad(r.quad, x) + eval_lin(r.lin, x));
    for (const auto& cn : cones) {
        double ss = 0.0;
        for (int m : cn.members) ss += x[m] * x[m];
        worst = std::max(worst, ss - x[cn.u] * x[cn.v]);
        worst = std::max(worst, -x[cn.u]);
        worst = std::max(worst, -x[cn.v]);
    }
    return worst;
}

std::vector<double> ReducedModel::inflate(const std::vector<double>& xr) const {
    std::vector<double> x(fixed_val);
    for (size_t r = 0; r < to_full.size(); ++r) x[to_full[r]] = xr[r];
    return x;
}

ReducedModel eliminate_fixed(const ModelInstance& m, double tol,
                             bool keep_cone_participants) {
    ReducedModel out;
    const int n = m.num_vars();
    std::vector<char> keep(n, 0);
    if (keep_cone_participants) {
        for (const auto& cn : m.cones) {
            keep[cn.u] = keep[cn.v] = 1;
            for (int mem : cn.members) keep[mem] = 1;
        }
    }
    out.to_reduced.assign(n, -1);
    out.fixed_val.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (!keep[i] && m.vars[i].hi - m.vars[i].lo <= tol) {
            out.fixed_val[i] = 0.5 * (m.vars[i].lo + m.vars[i].hi);
        } else {
            out.to_reduced[i] = static_cast<int>(out.to_full.size());
            out.to_full.push_back(i);
            out.model.vars.push_back(m.vars[i]);
        }
    }
    auto reduce_lin = [&](const std::vector<LinTerm>& in, std::vector<LinTerm>& lo,
                          double& shift) {
        for (const auto& t : in) {
            const int r = out.to_reduced[t.var];
            if (r < 0)
                shift += t.coef * out.fixed_val[t.var];
            else
                lo.push_back({r, t.coef});
        }
    };
    auto reduce_quad = [&](const std::vector<QuadTerm>& in, std::vector<QuadTerm>& qo,
                           std::vector<LinTerm>& lo, double& shift) {
        for (const auto& t : in) {
            const int r1 = out.to_reduced[t.v1];
            const int r2 = out.to_reduced[t.v2];
            if (r1 < 0 && r2 < 0)
                shift += t.coef * out.fixed_val[t.v1] * out.fixed_val[t.v2];
            else if (r1 < 0)
                lo.push_back({r2, t.coef * out.fixed_val[t.v1]});
            else if (r2 < 0)
                lo.push_back({r1, t.coef * out.fixed_val[t.v2]});
            else
                qo.push_back({r1, r2, t.coef});
        }
    };

    for (const auto& row : m.linear) {
        LinearRow r;
        r.name = row.name;
        double shift = 0.0;
        reduce_lin(row.lin, r.lin, shift);
        r.lo = row.lo > -kInf ? row.lo - shift : -kInf;
        r.hi = row.hi < kInf ? row.hi - shift : kInf;
        canonicalize(r.lin);
        out.model.add_linear(std::move(r));
    }
    for (const auto& row : m.quads) {
        QuadRow r;
        r.name = row.name;
        r.convex = row.convex;
        double shift = 0.0;
        reduce_lin(row.lin, r.lin, shift);
        reduce_quad(row.quad, r.quad, r.lin, shift);
        r.lo = row.lo > -kInf ? row.lo - shift : -kInf;
        r.hi = row.hi < kInf ? row.hi - shift : kInf;
        canonicalize(r.lin);
        canonicalize(r.quad);
        out.model.add_quad(std::move(r));
    }
    for (const auto& cn : m.cones) {
        bool any_fixed = out.to_reduced[cn.u] < 0 || out.to_reduced[cn.v] < 0;
        for (int mem : cn.members) any_fixed = any_fixed || out.to_reduced[mem] < 0;
        if (!any_fixed) {
            RotatedConeRow r;
            r.name = cn.name;
            r.u = out.to_reduced[cn.u];
            r.v = out.to_reduced[cn.v];
            for (int mem : cn.members) r.members.push_back(out.to_reduced[mem]);
            out.model.add_cone(std::move(r));
            continue;
        }
        // Rewrite as a quadratic row; stays conic-representable unless a
        // member is fixed while u, v remain free.
        QuadRow r;
        r.name = cn.name;
        r.hi = 0.0;
        double shift = 0.0;
        std::vector<QuadTerm> qin;
        for (int mem : cn.members) qin.push_back({mem, mem, 1.0});
        qin.push_back({cn.u, cn.v, -1.0});
        reduce_quad(qin, r.quad, r.lin, shift);
        r.hi -= shift;
        canonicalize(r.lin);
        canonicalize(r.quad);
        r.convex = true;
        for (const auto& t : r.quad)
            if (t.v1 != t.v2 || t.coef < 0) r.convex = false;
        out.model.add_quad(std::move(r));
    }
    out.model.obj.constant = m.obj.constant;
    reduce_lin(m.obj.lin, out.model.obj.lin, out.model.obj.constant);
    reduce_quad(m.obj.quad, out.model.obj.quad, out.model.obj.lin, out.model.obj.constant);
    canonicalize(out.model.obj.lin);
    canonicalize(out.model.obj.quad);
    return out;
}

namespace {

json bound_to_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

double bound_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::runtime_error("bad bound string: " + s);
    }
    return j.get<double>();
}

json lin_to_json(const std::vector<LinTerm>& terms) {
    json arr = json::array();
    for (const auto& t : terms) arr.push_back({t.var, t.coef});
    return arr;
}

std::vector<LinTerm> lin_from_json(const json& arr) {
    std::vector<LinTerm> out;
    for (const auto& e : arr) out.push_back({e[0].get<int>(), e[1].get<double>()});
    return out;
}

}  // namespace

std::string model_to_json(const ModelInstance& m) {
    json j;
    j["format"] = "ucac-model-1";
    json vars = json::array();
    for (const auto& v : m.vars) {
        vars.push_back({{"name", v.name},
                        {"lo", bound_to_json(v.lo)},
                        {"hi", bound_to_json(v.hi)},
                        {"binary", v.kind == VarKind::binary}});
    }
    j["variables"] = std::move(vars);
    json lin = json::array();
    for (const auto& r : m.linear)
        lin.push_back({{"name", r.name},
                       {"lin", lin_to_json(r.lin)},
                       {"lo", bound_to_json(r.lo)},
                       {"hi", bound_to_json(r.hi)}});
    j["linear_rows"] = std::move(lin);
    json quads = json::array();
    for (const auto& r : m.quads) {
        json q = json::array();
        for (const auto& t : r.quad) q.push_back({t.v1, t.v2, t.coef});
        quads.push_back({{"name", r.name},
                         {"quad", std::move(q)},
                         {"lin", lin_to_json(r.lin)},
                         {"lo", bound_to_json(r.lo)},
                         {"hi", bound_to_json(r.hi)},
                         {"convex", r.convex}});
    }
    j["quadratic_rows"] = std::move(quads);
    json cones = json::array();
    for (const auto& cn : m.cones)
        cones.push_back(
            {{"name", cn.name}, {"members", cn.members}, {"u", cn.u}, {"v", cn.v}});
    j["rotated_cones"] = std::move(cones);
    j["objective"] = {{"lin", lin_to_json(m.obj.lin)}, {"constant", m.obj.constant}};
    json oq = json::array();
    for (const auto& t : m.obj.quad) oq.push_back({t.v1, t.v2, t.coef});
    j["objective"]["quad"] = std::move(oq);
    return j.dump();
}

ModelInstance model_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.value("format", "") != std::string("ucac-model-1"))
        throw std::runtime_error("not a ucac-model-1 problem file");
    ModelInstance m;
    for (const auto& vj : j.at("variables")) {
        Variable v;
        v.name = vj.value("name", "");
        v.lo = bound_from_json(vj.at("lo"));
        v.hi = bound_from_json(vj.at("hi"));
        v.kind = vj.value("binary", false) ? VarKind::binary : VarKind::continuous;
        m.vars.push_back(v);
    }
    for (const auto& rj : j.value("linear_rows", json::array())) {
        LinearRow r;
        r.name = rj.value("name", "");
        r.lin = lin_from_json(rj.at("lin"));
        r.lo = bound_from_json(rj.at("lo"));
        r.hi = bound_from_json(rj.at("hi"));
        m.add_linear(std::move(r));
    }
    for (const auto& rj : j.value("quadratic_rows", json::array())) {
        QuadRow r;
        r.name = rj.value("name", "");
        for (const auto& t : rj.at("quad"))
            r.quad.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
        r.lin = lin_from_json(rj.at("lin"));
        r.lo = bound_from_json(rj.at("lo"));
        r.hi = bound_from_json(rj.at("hi"));
        r.convex = rj.value("convex", false);
        m.add_quad(std::move(r));
    }
    for (const auto& cj : j.value("rotated_cones", json::array())) {
        RotatedConeRow r;
        r.name = cj.value("name", "");
        r.members = cj.at("members").get<std::vector<int>>();
        r.u = cj.at("u").get<int>();
        r.v = cj.at("v").get<int>();
        m.add_cone(std::move(r));
    }
    const auto& oj = j.at("objective");
    m.obj.lin = lin_from_json(oj.at("lin"));
    m.obj.constant = oj.value("constant", 0.0);
    for (const auto& t : oj.value("quad", json::array()))
        m.obj.quad.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
    return m;
}

}  // namespace ucac
