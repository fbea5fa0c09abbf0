#pragma once

#include <vector>

#include "ucac/case.hpp"

namespace ucac {

/// One cycle of a cycle basis: branch indices with traversal signs
/// (+1 when walked from->to, -1 when walked against the branch).
struct Cycle {
    std::vector<int> branches;
    std::vector<int> signs;
};

struct CycleSet {
    std::vector<Cycle> cycles;
    bool empty() const { return cycles.empty(); }
    int size() const { return static_cast<int>(cycles.size()); }
};

/// Fundamental cycles of a BFS spanning forest. Works on disconnected
/// graphs; |cycles| = |branches| - |buses| + components.
CycleSet cycle_basis(const NetworkCase& c);

/// Number of connected components over in-service branches.
int connected_components(const NetworkCase& c);

}  // namespace ucac
