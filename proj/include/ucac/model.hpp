#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ucac {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };

struct Variable {
    std::string name;
    double lo = -kInf;
    double hi = kInf;
    VarKind kind = VarKind::continuous;
};

struct LinTerm {
    int var = 0;
    double coef = 0.0;
};

/// coef * x[v1] * x[v2]; canonical form keeps v1 <= v2.
struct QuadTerm {
    int v1 = 0;
    int v2 = 0;
    double coef = 0.0;
};

struct LinearRow {
    std::vector<LinTerm> lin;
    double lo = -kInf;
    double hi = kInf;
    std::string name;
};

/// lo <= sum quad + sum lin <= hi. Quadratic value is sum of coef*x1*x2
/// terms (no implicit 1/2).
struct QuadRow {
    std::vector<QuadTerm> quad;
    std::vector<LinTerm> lin;
    double lo = -kInf;
    double hi = kInf;
    std::string name;
    /// Set when every quad term is a nonnegative square (v1 == v2, coef >= 0)
    /// and lo == -inf, so conic backends can take the row as a cone.
    bool convex = false;
};

/// sum_m x[m]^2 <= x[u] * x[v] with x[u], x[v] >= 0.
struct RotatedConeRow {
    std::vector<int> members;
    int u = 0;
    int v = 0;
    std::string name;
};

struct Objective {
    std::vector<LinTerm> lin;
    std::vector<QuadTerm> quad;  // value convention as QuadRow
    double constant = 0.0;
};

/// Solver-agnostic algebraic model: what backends consume.
class ModelInstance {
public:
    std::vector<Variable> vars;
    std::vector<LinearRow> linear;
    std::vector<QuadRow> quads;
    std::vector<RotatedConeRow> cones;
    Objective obj;

    int add_var(const std::string& name, double lo, double hi,
                VarKind kind = VarKind::continuous) {
        vars.push_back({name, lo, hi, kind});
        return static_cast<int>(vars.size()) - 1;
    }
    int num_vars() const { return static_cast<int>(vars.size()); }

    void add_linear(LinearRow row) { linear.push_back(std::move(row)); }
    void add_quad(QuadRow row) { quads.push_back(std::move(row)); }
    void add_cone(RotatedConeRow row) { cones.push_back(std::move(row)); }

    bool has_binaries() const {
        for (const auto& v : vars)
            if (v.kind == VarKind::binary && v.hi - v.lo > 0.5) return true;
        return false;
    }

    double eval_lin(const std::vector<LinTerm>& terms, const std::vector<double>& x) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * x[t.var];
        return s;
    }
    double eval_quad(const std::vector<QuadTerm>& terms, const std::vector<double>& x) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * x[t.v1] * x[t.v2];
        return s;
    }
    double eval_objective(const std::vector<double>& x) const {
        return obj.constant + eval_lin(obj.lin, x) + eval_quad(obj.quad, x);
    }

    /// Worst violation of all rows, cones and bounds at x.
    double max_violation(const std::vector<double>& x) const;
};

/// Sort terms by index and merge duplicates in place.
void canonicalize(std::vector<LinTerm>& terms);
void canonicalize(std::vector<QuadTerm>& terms);

/// Result of eliminating fixed variables (hi - lo <= tol): a reduced model
/// plus the data needed to reinflate solution vectors.
struct ReducedModel {
    ModelInstance model;
    std::vector<int> to_reduced;    // full index -> reduced index or -1
    std::vector<int> to_full;       // reduced index -> full index
    std::vector<double> fixed_val;  // full-length; meaningful where to_reduced == -1

    std::vector<double> inflate(const std::vector<double>& xr) const;
};

/// keep_cone_participants leaves variables referenced by cone rows in the
/// model (pinned by equal bounds) so conic translation stays exact.
ReducedModel eliminate_fixed(const ModelInstance& m, double tol = 1e-9,
                             bool keep_cone_participants = false);

/// JSON problem-exchange (de)serialization, used by external-solver adapters.
std::string model_to_json(const ModelInstance& m);
ModelInstance model_from_json(const std::string& text);

}  // namespace ucac
