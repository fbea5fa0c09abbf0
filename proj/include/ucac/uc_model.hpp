#pragma once

#include <string>
#include <vector>

#include "ucac/case.hpp"
#include "ucac/model.hpp"
#include "ucac/solution.hpp"

namespace ucac {

/// Variable indexing shared by every problem variant built from one case.
/// Core block first (commitment + dispatch), then one network block.
struct VariableLayout {
    enum class Net { none, voltage, lifted };
    int T = 0, G = 0, B = 0, L = 0, SC = 0;
    Net net = Net::none;
    std::vector<int> seg_count;   // S_g per generator
    std::vector<int> seg_offset;  // delta offsets per generator

    int off_y = 0, off_u = 0, off_w = 0, off_delta = 0;
    int off_p = 0, off_r = 0, off_cp = 0, off_q = 0, off_qsc = 0;
    int off_net = 0;  // vr/vj or cbb/c/s
    int off_flow = 0;
    int n_core = 0;

    int y(int g, int t) const { return off_y + g * T + t; }
    int u(int g, int t) const { return off_u + g * T + t; }
    int w(int g, int t) const { return off_w + g * T + t; }
    int delta(int g, int tau, int t) const { return off_delta + seg_offset[g] + tau * T + t; }
    int p(int g, int t) const { return off_p + g * T + t; }
    int r(int g, int t) const { return off_r + g * T + t; }
    int cp(int g, int t) const { return off_cp + g * T + t; }
    int q(int g, int t) const { return off_q + g * T + t; }
    int qsc(int s, int t) const { return off_qsc + s * T + t; }
    // voltage space
    int vr(int b, int t) const { return off_net + 2 * (b * T + t); }
    int vj(int b, int t) const { return off_net + 2 * (b * T + t) + 1; }
    // lifted space
    int cbb(int b, int t) const { return off_net + b * T + t; }
    int cbk(int l, int t) const { return off_net + B * T + 2 * (l * T + t); }
    int sbk(int l, int t) const { return off_net + B * T + 2 * (l * T + t) + 1; }
    int pf(int l, int t) const { return off_flow + 4 * (l * T + t); }
    int qf(int l, int t) const { return off_flow + 4 * (l * T + t) + 1; }
    int pt(int l, int t) const { return off_flow + 4 * (l * T + t) + 2; }
    int qt(int l, int t) const { return off_flow + 4 * (l * T + t) + 3; }
};

VariableLayout make_layout(const NetworkCase& c, VariableLayout::Net net);

/// Historical constants derived from initial status: y/u/w at t' <= 0
/// assuming a steady prior state.
struct History {
    int status;  // signed hours
    bool on() const { return status > 0; }
    double y_at(int t) const { return t <= 0 && on() ? 1.0 : 0.0; }
    double u_at(int t) const { return on() && t == 1 - status ? 1.0 : 0.0; }
    double w_at(int t) const { return !on() && t == 1 + status ? 1.0 : 0.0; }
};

inline History history_of(const Generator& g) { return History{g.initial_status}; }

struct CostBreakdown {
    double production = 0.0;
    double startup = 0.0;
    double shutdown = 0.0;
    double total() const { return production + startup + shutdown; }
};

/// Declare commitment + dispatch variables and add the 3BIN operating
/// constraints and cost expressions to the model. Objective terms for
/// production, startup and shutdown cost are accumulated into model.obj.
void add_uc_skeleton(ModelInstance& m, const VariableLayout& lay, const NetworkCase& c);

/// Violations of the minimum up/down and logic constraints for a candidate
/// trajectory; empty result means 3BIN-feasible.
std::vector<std::string> validate_commitment(const CommitmentTrajectory& d,
                                             const NetworkCase& c,
                                             double tol = 1e-6);

/// Derive u, w and optimal startup-segment indicators from a binary y matrix
/// plus the initial status.
CommitmentTrajectory derive_commitment(const NetworkCase& c, const std::vector<double>& y);

CostBreakdown evaluate_cost(const SolutionPoint& sol, const NetworkCase& c);

/// Pin the commitment variables of a built model to d.
void fix_commitment(ModelInstance& m, const VariableLayout& lay, const NetworkCase& c,
                    const CommitmentTrajectory& d);

}  // namespace ucac
