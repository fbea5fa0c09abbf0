#pragma once

#include <vector>

#include "ucac/case.hpp"

namespace ucac {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

/// Bound store for the lifted variables: per (branch,period) intervals for
/// c_bk and s_bk, per (bus,period) intervals for c_bb. Mutated only by OBBT.
struct BoundsStore {
    int horizon = 0;
    int n_branches = 0;
    int n_buses = 0;
    std::vector<Interval> c_branch;  // [l*T + t]
    std::vector<Interval> s_branch;  // [l*T + t]
    std::vector<Interval> c_bus;     // [b*T + t]

    Interval& c_bk(int l, int t) { return c_branch[l * horizon + t]; }
    Interval& s_bk(int l, int t) { return s_branch[l * horizon + t]; }
    Interval& c_bb(int b, int t) { return c_bus[b * horizon + t]; }
    const Interval& c_bk(int l, int t) const { return c_branch[l * horizon + t]; }
    const Interval& s_bk(int l, int t) const { return s_branch[l * horizon + t]; }
    const Interval& c_bb(int b, int t) const { return c_bus[b * horizon + t]; }
};

/// Initial boxes for the lifted variables, from the voltage boxes and the
/// per-branch angle-difference bound.
BoundsStore initial_cs_bounds(const NetworkCase& c);

}  // namespace ucac
