#include "ucac/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace ucac {

BoundsStore initial_cs_bounds(const NetworkCase& c) {
    BoundsStore s;
    s.horizon = c.horizon;
    s.n_branches = c.num_branches();
    s.n_buses = c.num_buses();
    s.c_branch.resize(static_cast<size_t>(s.n_branches) * s.horizon);
    s.s_branch.resize(static_cast<size_t>(s.n_branches) * s.horizon);
    s.c_bus.resize(static_cast<size_t>(s.n_buses) * s.horizon);

    for (int b = 0; b < s.n_buses; ++b) {
        const Interval box{c.buses[b].v_min * c.buses[b].v_min,
                           c.buses[b].v_max * c.buses[b].v_max};
        for (int t = 0; t < s.horizon; ++t) s.c_bb(b, t) = box;
    }
    for (int l = 0; l < s.n_branches; ++l) {
        const auto& br = c.branches[l];
        const auto& fb = c.buses[br.from_bus];
        const auto& tb = c.buses[br.to_bus];
        const double vmax2 = fb.v_max * tb.v_max;
        const double vmin2 = fb.v_min * tb.v_min;
        const double th = br.theta_max;
        Interval ci, si;
        ci.hi = vmax2;
        ci.lo = th <= M_PI / 2.0 ? vmin2 * std::cos(th) : -vmax2;
        si.hi = vmax2 * std::sin(std::min(th, M_PI / 2.0));
        si.lo = -si.hi;
        for (int t = 0; t < s.horizon; ++t) {
            s.c_bk(l, t) = ci;
            s.s_bk(l, t) = si;
        }
    }
    return s;
}

}  // namespace ucac
