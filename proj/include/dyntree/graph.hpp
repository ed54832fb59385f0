#ifndef DYNTREE_GRAPH_HPP
#define DYNTREE_GRAPH_HPP

#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"

namespace dyntree {

struct BallStats {
    std::size_t heap_ops = 0;  // pushes + pops of the truncated Dijkstra
};

/// Weighted undirected dynamic graph. Adjacency is kept in ordered maps so
/// that iteration order is a pure function of the edge set, which keeps
/// seeded runs reproducible.
class DynGraph {
  public:
    explicit DynGraph(int n = 0, double max_weight = kDefaultMaxWeight)
        : adj_(static_cast<std::size_t>(n)), max_weight_(max_weight) {}

    static constexpr double kDefaultMaxWeight = 1048576.0;  // 2^20

    int node_count() const { return static_cast<int>(adj_.size()); }
    std::size_t edge_count() const { return m_; }
    double max_weight() const { return max_weight_; }

    /// Grows the id space so that `v` is a valid (isolated) node.
    void ensure_node(NodeId v) {
        if (v >= node_count()) adj_.resize(static_cast<std::size_t>(v) + 1);
    }

    bool has_node(NodeId v) const { return v >= 0 && v < node_count(); }

    bool has_edge(NodeId u, NodeId v) const {
        if (!has_node(u) || !has_node(v)) return false;
        return adj_[u].count(v) > 0;
    }
    bool has_edge(const EdgeKey& e) const { return has_edge(e.u, e.v); }

    double weight(NodeId u, NodeId v) const {
        auto it = adj_[u].find(v);
        if (it == adj_[u].end()) throw MissingEdge(edge_name(u, v));
        return it->second;
    }

    void insert_edge(NodeId u, NodeId v, double w) {
        if (u == v) throw InvalidParameter("insert_edge: self-loop " + std::to_string(u));
        check_node(u);
        check_node(v);
        if (w < 1.0 || w > max_weight_)
            throw WeightOutOfRange("insert_edge: weight " + std::to_string(w));
        if (adj_[u].count(v)) throw DuplicateEdge(edge_name(u, v));
        adj_[u][v] = w;
        adj_[v][u] = w;
        ++m_;
    }

    /// Removes the edge and returns its former weight.
    double delete_edge(NodeId u, NodeId v) {
        check_node(u);
        check_node(v);
        auto it = adj_[u].find(v);
        if (it == adj_[u].end()) throw MissingEdge(edge_name(u, v));
        double w = it->second;
        adj_[u].erase(it);
        adj_[v].erase(u);
        --m_;
        return w;
    }
    double delete_edge(const EdgeKey& e) { return delete_edge(e.u, e.v); }

    const std::map<NodeId, double>& neighbors(NodeId v) const { return adj_[v]; }

    int degree(NodeId v) const { return static_cast<int>(adj_[v].size()); }

    /// vol(U) = sum of degrees over U; vol(V) = 2|E|.
    template <typename Container>
    std::size_t volume(const Container& nodes) const {
        std::size_t s = 0;
        for (NodeId v : nodes) s += static_cast<std::size_t>(degree(v));
        return s;
    }

    std::vector<EdgeKey> edges() const {
        std::vector<EdgeKey> out;
        out.reserve(m_);
        for (NodeId u = 0; u < node_count(); ++u)
            for (const auto& [v, w] : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    /// Ball(v, r) = { u | d(v,u) <= r }, by truncated Dijkstra. Nodes are
    /// settled in increasing distance order with ties broken by ascending id,
    /// and no edge beyond radius r is ever relaxed, so the work touched is
    /// local to the ball and its incident edges.
    std::set<NodeId> ball(NodeId v, double r, BallStats* stats = nullptr) const {
        check_node(v);
        std::set<NodeId> out;
        if (r < 0.0) return out;
        using Item = std::pair<double, NodeId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        std::map<NodeId, double> dist;
        auto push = [&](NodeId x, double d) {
            pq.emplace(d, x);
            if (stats) ++stats->heap_ops;
        };
        dist[v] = 0.0;
        push(v, 0.0);
        while (!pq.empty()) {
            auto [d, x] = pq.top();
            pq.pop();
            if (stats) ++stats->heap_ops;
            if (out.count(x)) continue;
            out.insert(x);
            for (const auto& [y, w] : adj_[x]) {
                double nd = d + w;
                if (nd > r) continue;  // never relax beyond the radius
                auto it = dist.find(y);
                if (it == dist.end() || nd < it->second) {
                    dist[y] = nd;
                    push(y, nd);
                }
            }
        }
        return out;
    }

    /// Exact single-source distances; infinity for unreachable nodes.
    std::vector<double> sssp_exact(NodeId s) const {
        check_node(s);
        std::vector<double> dist(adj_.size(), kInf);
        using Item = std::pair<double, NodeId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        dist[s] = 0.0;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            auto [d, x] = pq.top();
            pq.pop();
            if (d > dist[x]) continue;
            for (const auto& [y, w] : adj_[x]) {
                double nd = d + w;
                if (nd < dist[y]) {
                    dist[y] = nd;
                    pq.emplace(nd, y);
                }
            }
        }
        return dist;
    }

    /// Independent copy of the sub-graph induced by S (same id space; nodes
    /// outside S are isolated). Later updates to either graph are invisible
    /// to the other.
    template <typename Container>
    DynGraph snapshot_induced(const Container& nodes) const {
        DynGraph out(node_count(), max_weight_);
        std::set<NodeId> in(nodes.begin(), nodes.end());
        for (NodeId u : in)
            for (const auto& [v, w] : adj_[u])
                if (u < v && in.count(v)) out.insert_edge(u, v, w);
        return out;
    }

    /// Full-scan consistency check: adjacency symmetry and edge counting.
    void check_symmetry() const {
        std::size_t half_sum = 0;
        for (NodeId u = 0; u < node_count(); ++u) {
            half_sum += adj_[u].size();
            for (const auto& [v, w] : adj_[u]) {
                auto it = adj_[v].find(u);
                require(it != adj_[v].end() && it->second == w,
                        "DynGraph: asymmetric adjacency");
            }
        }
        require(half_sum == 2 * m_, "DynGraph: edge count out of sync");
    }

  private:
    void check_node(NodeId v) const {
        if (!has_node(v)) throw InvalidParameter("node out of range: " + std::to_string(v));
    }
    static std::string edge_name(NodeId u, NodeId v) {
        return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
    }

    std::vector<std::map<NodeId, double>> adj_;
    std::size_t m_ = 0;
    double max_weight_;
};

}  // namespace dyntree

#endif
