#ifndef DYNTREE_TESTS_HELPERS_HPP
#define DYNTREE_TESTS_HELPERS_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include <dyntree/graph.hpp>
#include <dyntree/rng.hpp>

namespace testutil {

using namespace dyntree;

/// Random connected graph: a random spanning tree plus extra edges, integer
/// weights in [1, wmax].
inline DynGraph random_connected(int n, int m, double wmax, RngStream& rng) {
    DynGraph g(n, wmax);
    auto weight = [&]() {
        return 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(wmax)));
    };
    std::vector<NodeId> joined{0};
    for (NodeId v = 1; v < n; ++v) {
        NodeId u = joined[rng.below(joined.size())];
        g.insert_edge(u, v, weight());
        joined.push_back(v);
    }
    int guard = 0;
    while (static_cast<int>(g.edge_count()) < m && ++guard < 50 * m) {
        NodeId u = static_cast<NodeId>(rng.below(n));
        NodeId v = static_cast<NodeId>(rng.below(n));
        if (u == v || g.has_edge(u, v)) continue;
        g.insert_edge(u, v, weight());
    }
    return g;
}

inline std::vector<std::vector<double>> floyd_warshall(const DynGraph& g) {
    int n = g.node_count();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
    for (NodeId v = 0; v < n; ++v) d[v][v] = 0.0;
    for (const EdgeKey& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = g.weight(e.u, e.v);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

/// Deterministic shuffle of the edge list, driven by the given stream.
inline std::vector<EdgeKey> shuffled_edges(const DynGraph& g, RngStream& rng) {
    std::vector<EdgeKey> edges = g.edges();
    for (std::size_t i = edges.size(); i > 1; --i)
        std::swap(edges[i - 1], edges[rng.below(i)]);
    return edges;
}

}  // namespace testutil

#endif
