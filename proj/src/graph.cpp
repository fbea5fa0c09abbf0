#include "ucac/graph.hpp"

#include <algorithm>
#include <queue>

namespace ucac {

namespace {

struct Forest {
    std::vector<int> parent;       // parent bus or -1 at roots
    std::vector<int> parent_edge;  // branch index into the tree edge, -1 at roots
    std::vector<int> depth;
    std::vector<char> in_tree;     // per branch
    int components = 0;
};

Forest spanning_forest(const NetworkCase& c) {
    const int nb = c.num_buses();
    std::vector<std::vector<std::pair<int, int>>> adj(nb);  // (neighbor, branch)
    for (int l = 0; l < c.num_branches(); ++l) {
        adj[c.branches[l].from_bus].push_back({c.branches[l].to_bus, l});
        adj[c.branches[l].to_bus].push_back({c.branches[l].from_bus, l});
    }
    Forest f;
    f.parent.assign(nb, -2);
    f.parent_edge.assign(nb, -1);
    f.depth.assign(nb, 0);
    f.in_tree.assign(c.num_branches(), 0);
    for (int root = 0; root < nb; ++root) {
        if (f.parent[root] != -2) continue;
        ++f.components;
        f.parent[root] = -1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int b = q.front();
            q.pop();
            for (auto [k, l] : adj[b]) {
                if (f.parent[k] != -2) continue;
                f.parent[k] = b;
                f.parent_edge[k] = l;
                f.depth[k] = f.depth[b] + 1;
                f.in_tree[l] = 1;
                q.push(k);
            }
        }
    }
    return f;
}

}  // namespace

int connected_components(const NetworkCase& c) {
    return spanning_forest(c).components;
}

CycleSet cycle_basis(const NetworkCase& c) {
    const Forest f = spanning_forest(c);
    CycleSet out;
    for (int l = 0; l < c.num_branches(); ++l) {
        if (f.in_tree[l]) continue;
        // Fundamental cycle: chord l plus the tree path between its ends.
        Cycle cyc;
        cyc.branches.push_back(l);
        cyc.signs.push_back(+1);
        int a = c.branches[l].to_bus;   // walk back toward the from end
        int b = c.branches[l].from_bus;
        std::vector<int> up_br, up_sg, down_br, down_sg;
        while (f.depth[a] > f.depth[b]) {
            const int e = f.parent_edge[a];
            // moving a -> parent(a); sign +1 if traversal matches from->to
            up_br.push_back(e);
            up_sg.push_back(c.branches[e].from_bus == a ? +1 : -1);
            a = f.parent[a];
        }
        while (f.depth[b] > f.depth[a]) {
            const int e = f.parent_edge[b];
            down_br.push_back(e);
            down_sg.push_back(c.branches[e].to_bus == b ? +1 : -1);
            b = f.parent[b];
        }
        while (a != b) {
            int e = f.parent_edge[a];
            up_br.push_back(e);
            up_sg.push_back(c.branches[e].from_bus == a ? +1 : -1);
            a = f.parent[a];
            e = f.parent_edge[b];
            down_br.push_back(e);
            down_sg.push_back(c.branches[e].to_bus == b ? +1 : -1);
            b = f.parent[b];
        }
        for (size_t i = 0; i < up_br.size(); ++i) {
            cyc.branches.push_back(up_br[i]);
            cyc.signs.push_back(up_sg[i]);
        }
        for (size_t i = down_br.size(); i-- > 0;) {
            cyc.branches.push_back(down_br[i]);
            cyc.signs.push_back(down_sg[i]);
        }
        out.cycles.push_back(std::move(cyc));
    }
    return out;
}

}  // namespace ucac
