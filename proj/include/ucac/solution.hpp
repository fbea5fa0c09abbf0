#pragma once

#include <vector>

#include "ucac/case.hpp"

namespace ucac {

/// Values for one candidate solution. Matrices are row-major flattened
/// ([g*T + t], [b*T + t], [l*T + t]); empty vectors mean "not present".
struct SolutionPoint {
    int horizon = 0;
    // commitment
    std::vector<double> y, u, w;
    std::vector<std::vector<double>> delta;  // per generator: [tau*T + t]
    // dispatch
    std::vector<double> p, r, cp, q;  // generators
    std::vector<double> q_sc;         // condensers
    // network, voltage space
    std::vector<double> vr, vj;
    // network, lifted space
    std::vector<double> c_bb;      // per bus
    std::vector<double> c_bk, s_bk;  // per branch
    // flows
    std::vector<double> pf, qf, pt, qt;

    bool has_voltage() const { return !vr.empty(); }
    bool has_lifted() const { return !c_bb.empty(); }
};

/// Commitment decision d = [y, u, w] (+ startup segment indicators).
struct CommitmentTrajectory {
    int horizon = 0;
    std::vector<double> y, u, w;             // [g*T + t]
    std::vector<std::vector<double>> delta;  // per generator: [tau*T + t]
};

}  // namespace ucac
