#ifndef DYNTREE_FRT_HPP
#define DYNTREE_FRT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "common.hpp"
#include "forest.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace dyntree {

struct FrtResult {
    EmbedForest forest;
    double beta0 = 1.0;       // radius scale, log-uniform in [1,2)
    TreeNodeId next_id = 0;   // first unused internal id
};

/// Static randomized hierarchically separated tree over the given nodes, one
/// tree per connected component: draw a uniform permutation and a radius
/// scale beta0, then cluster at scale beta0*2^j by the first permutation
/// element within distance; the level-j tree edge weighs beta0*2^(j+1).
/// Domination d_T >= d_G holds deterministically for pairs in one component.
/// A node isolated among `nodes` becomes a leaf under a private root.
inline FrtResult frt_embed(const DynGraph& g, const std::vector<NodeId>& nodes,
                           RngStream rng, TreeNodeId first_internal) {
    FrtResult res;
    res.next_id = first_internal;
    if (nodes.empty()) return res;

    std::vector<NodeId> order(nodes);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (NodeId v : order)
        if (!g.has_node(v)) throw InvalidParameter("frt: node outside graph");

    std::map<NodeId, std::vector<double>> dist;
    for (NodeId v : order) dist[v] = g.sssp_exact(v);

    // Permutation rank over the whole node list; component-local restriction
    // of a global uniform permutation is itself uniform.
    std::vector<NodeId> perm(order);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
    std::map<NodeId, std::size_t> rank;
    for (std::size_t i = 0; i < perm.size(); ++i) rank[perm[i]] = i;

    res.beta0 = std::pow(2.0, rng.uniform01());  // 2^u, u uniform in [0,1)
    double b0 = res.beta0;

    std::set<NodeId> done;
    for (NodeId seed : order) {
        if (done.count(seed)) continue;
        std::vector<NodeId> comp;
        for (NodeId v : order)
            if (dist[seed][v] < kInf) comp.push_back(v);
        for (NodeId v : comp) done.insert(v);

        if (comp.size() == 1) {
            NodeId v = comp.front();
            TreeNodeId r = res.next_id++;
            res.forest.add_node(r);
            res.forest.mark_leaf(v);
            res.forest.set_parent(v, r, 1.0);
            continue;
        }

        double diam = 0.0;
        for (NodeId u : comp)
            for (NodeId v : comp) diam = std::max(diam, dist[u][v]);
        int h = 0;
        while (b0 * std::ldexp(1.0, h) < diam) ++h;

        // labels[v][j+1] = first permutation element within b0*2^j of v,
        // j = -1 .. h; at j = -1 the radius is below the minimum edge
        // weight, so every node labels itself.
        std::map<NodeId, std::vector<NodeId>> labels;
        for (NodeId v : comp) {
            std::vector<NodeId> lv(static_cast<std::size_t>(h) + 2);
            lv[0] = v;
            for (int j = 0; j <= h; ++j) {
                double r = b0 * std::ldexp(1.0, j);
                NodeId best = -1;
                for (NodeId w : comp)
                    if (dist[w][v] <= r && (best == -1 || rank[w] < rank[best])) best = w;
                lv[static_cast<std::size_t>(j) + 1] = best;
            }
            labels[v] = std::move(lv);
        }

        // A tree node at level j is an equivalence class of leaves sharing
        // the label suffix (l_h, ..., l_j); the level -1 classes are the
        // leaves themselves.
        std::map<std::vector<NodeId>, TreeNodeId> class_node;
        for (NodeId v : comp) {
            const std::vector<NodeId>& lv = labels[v];
            res.forest.mark_leaf(v);
            TreeNodeId child = v;
            for (int j = 0; j <= h; ++j) {
                std::vector<NodeId> key(lv.begin() + j + 1, lv.end());
                auto [it, fresh] = class_node.try_emplace(key, res.next_id);
                if (fresh) {
                    res.forest.add_node(res.next_id);
                    ++res.next_id;
                }
                double w = b0 * std::ldexp(1.0, j);  // child level j-1 -> j
                if (!res.forest.has_parent(child)) res.forest.set_parent(child, it->second, w);
                child = it->second;
                if (!fresh) break;  // the rest of the chain already exists
            }
        }
    }
    return res;
}

}  // namespace dyntree

#endif
