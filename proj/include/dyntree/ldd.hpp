#ifndef DYNTREE_LDD_HPP
#define DYNTREE_LDD_HPP

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "common.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "sssp.hpp"

namespace dyntree {

struct SplitEvent {
    ClusterId parent;
    ClusterId child;
    std::vector<NodeId> child_nodes;
    std::vector<EdgeKey> boundary_edges;  // E(B, C \ B) at split time
    bool parent_emptied = false;          // the ball was all of the parent
};

struct RecenterEvent {
    ClusterId cluster;
};

using LddEvent = std::variant<SplitEvent, RecenterEvent>;

/// Decremental probabilistic weak low-diameter decomposition: per-cluster
/// ball-growing with geometric radii, volume-halving splits and
/// degree-proportional center re-assignment.
class LddState {
  public:
    using SplitHook = std::function<void(const LddState&, const SplitEvent&)>;

    LddState(const DynGraph& g, double beta, double a, RngStream rng,
             SplitHook on_split = nullptr)
        : view_(g),
          beta_(beta),
          a_(a),
          rng_(std::move(rng)),
          on_split_(std::move(on_split)),
          cluster_of_(g.node_count(), -1),
          cluster_changes_(g.node_count(), 0) {
        if (!(beta > 0.0) || !(beta < 1.0)) throw InvalidParameter("ldd: beta not in (0,1)");
        if (a < 1.0) throw InvalidParameter("ldd: a < 1");
        if (g.node_count() == 0) throw InvalidParameter("ldd: empty graph");
        m0_ = g.edge_count();
        double logm = m0_ > 0 ? std::log2(static_cast<double>(m0_)) : 0.0;
        p_ = beta / (2.0 + logm);
        if (p_ > 0.5) p_ = 0.5;  // beta*(2+log m) >= 1 is outside the analysis
        rho_ = (a + 2.0) / p_ * std::log(static_cast<double>(g.node_count()));
        depth_cap_ = 2.0 + logm;
        if (m0_ == 0) {
            init_singletons();
        } else {
            ClusterId root = form_cluster(all_nodes(), view_, /*depth=*/1);
            assign_center(cluster(root));
            run_update(root);
        }
    }

    /// Degenerate all-singletons decomposition: every node its own cluster,
    /// every edge inter-cluster. Used by the hierarchy when the requested
    /// diameter parameter is below what the beta formula can deliver.
    static LddState singletons(const DynGraph& g, RngStream rng, SplitHook on_split = nullptr) {
        return LddState(g, std::move(rng), std::move(on_split));
    }

    bool singleton_mode() const { return singleton_mode_; }
    double p() const { return p_; }
    double rho() const { return rho_; }
    double beta() const { return beta_; }
    const DynGraph& view() const { return view_; }
    std::size_t initial_edge_count() const { return m0_; }

    /// Forwards the deletion to every cluster whose SSSP instance still holds
    /// the edge, then re-establishes the diameter guard. Deleting an edge
    /// absent from this level's view is a no-op (the hierarchy forwards
    /// boundary edges that may already be gone here).
    void delete_edge(const EdgeKey& e) {
        if (!view_.has_edge(e)) return;
        view_.delete_edge(e);
        auto it = clusters_of_edge_.find(e);
        std::vector<ClusterId> affected;
        if (it != clusters_of_edge_.end()) affected.assign(it->second.begin(), it->second.end());
        for (ClusterId cid : affected) {
            auto cit = clusters_.find(cid);
            if (cit == clusters_.end()) continue;  // emptied by an earlier iteration
            Cluster& c = cit->second;
            clusters_of_edge_[e].erase(cid);
            c.fc.erase(e);
            c.sssp->delete_edge(e);
            if (c.gc.has_edge(e)) c.gc.delete_edge(e);
            run_update(cid);
        }
    }

    const std::vector<ClusterId>& partition() const { return cluster_of_; }
    ClusterId cluster_of(NodeId v) const { return cluster_of_[v]; }

    const std::vector<LddEvent>& events() const { return events_; }
    const std::vector<long>& cluster_changes() const { return cluster_changes_; }

    std::vector<ClusterId> cluster_ids() const {
        std::vector<ClusterId> out;
        out.reserve(clusters_.size());
        for (const auto& [id, c] : clusters_) out.push_back(id);
        return out;
    }
    const std::set<NodeId>& cluster_nodes(ClusterId id) const { return clusters_.at(id).nodes; }
    NodeId cluster_center(ClusterId id) const { return clusters_.at(id).center; }
    int cluster_depth(ClusterId id) const { return clusters_.at(id).depth; }
    long recenter_count(ClusterId id) const { return clusters_.at(id).recenters; }

    /// Live edges whose endpoints sit in different clusters.
    std::vector<EdgeKey> inter_cluster_edges() const {
        std::vector<EdgeKey> out;
        for (const EdgeKey& e : view_.edges())
            if (cluster_of_[e.u] != cluster_of_[e.v]) out.push_back(e);
        return out;
    }

    /// Structural hard assertions: partition totality/disjointness, center
    /// membership, genealogy depth, and the per-node center-distance bound
    /// max_v d(c,v) <= 6 rho measured with exact Dijkstra on the level view.
    void check_invariants() const {
        std::vector<int> seen(cluster_of_.size(), 0);
        for (NodeId v = 0; v < static_cast<NodeId>(cluster_of_.size()); ++v) {
            ClusterId cid = cluster_of_[v];
            require(clusters_.count(cid) > 0, "ldd: node mapped to dead cluster");
            require(clusters_.at(cid).nodes.count(v) > 0, "ldd: cluster_of inconsistent");
            ++seen[v];
        }
        std::size_t total = 0;
        for (const auto& [id, c] : clusters_) {
            require(!c.nodes.empty(), "ldd: empty cluster");
            require(c.nodes.count(c.center) > 0, "ldd: center outside cluster");
            require(static_cast<double>(c.depth) <= depth_cap_ + 1e-9,
                    "ldd: genealogy depth exceeds 2 + log2 m0");
            for (NodeId v : c.nodes)
                require(cluster_of_[v] == id, "ldd: partition disjointness");
            total += c.nodes.size();
            if (!singleton_mode_ && c.nodes.size() > 1) {
                auto dist = view_.sssp_exact(c.center);
                for (NodeId v : c.nodes)
                    require(dist[v] <= 6.0 * rho_ + 1e-9, "ldd: center distance above 6 rho");
            }
            for (const EdgeKey& e : c.fc) {
                auto it = clusters_of_edge_.find(e);
                require(it != clusters_of_edge_.end() && it->second.count(id) > 0,
                        "ldd: F_C / Clusters(e) out of sync");
            }
        }
        require(total == cluster_of_.size(), "ldd: partition not total");
        for (const auto& [e, ids] : clusters_of_edge_)
            for (ClusterId id : ids)
                require(clusters_.count(id) > 0 && clusters_.at(id).fc.count(e) > 0,
                        "ldd: Clusters(e) references stale cluster");
    }

  private:
    struct Cluster {
        ClusterId id;
        std::set<NodeId> nodes;
        NodeId center = -1;
        double mu = 0.0;          // vol_{G[C]}(C) frozen at the last AssignCenter
        int depth = 1;            // genealogy depth, root = 1
        DynGraph gc;              // current induced sub-graph G[C]
        std::set<EdgeKey> fc;     // F_C
        std::optional<DecrSssp> sssp;
        RngStream rng;
        long recenters = 0;

        Cluster(ClusterId i, RngStream r) : id(i), gc(0), rng(std::move(r)) {}
    };

    // Singleton-mode constructor.
    LddState(const DynGraph& g, RngStream rng, SplitHook on_split)
        : view_(g),
          beta_(1.0),
          a_(1.0),
          p_(1.0),
          rho_(0.0),
          rng_(std::move(rng)),
          on_split_(std::move(on_split)),
          cluster_of_(g.node_count(), -1),
          cluster_changes_(g.node_count(), 0),
          singleton_mode_(true) {
        if (g.node_count() == 0) throw InvalidParameter("ldd: empty graph");
        m0_ = g.edge_count();
        depth_cap_ = 2.0 + (m0_ > 0 ? std::log2(static_cast<double>(m0_)) : 0.0);
        init_singletons();
    }

    std::set<NodeId> all_nodes() const {
        std::set<NodeId> s;
        for (NodeId v = 0; v < view_.node_count(); ++v) s.insert(v);
        return s;
    }

    Cluster& cluster(ClusterId id) { return clusters_.at(id); }

    ClusterId fresh_id() { return next_id_++; }

    ClusterId form_cluster(std::set<NodeId> nodes, DynGraph gc, int depth) {
        ClusterId id = fresh_id();
        Cluster c(id, rng_.derive("cluster=" + std::to_string(id)));
        c.nodes = std::move(nodes);
        c.gc = std::move(gc);
        c.depth = depth;
        for (NodeId v : c.nodes) {
            if (cluster_of_[v] != -1) ++cluster_changes_[v];
            cluster_of_[v] = id;
        }
        clusters_.emplace(id, std::move(c));
        return id;
    }

    void init_singletons() {
        // The multi-node edgeless AssignCenter case is unreachable in the
        // algorithm proper; an (initially) edgeless graph and the degenerate
        // diameter regime are both settled here as the all-singletons
        // partition the update loop would converge to.
        ClusterId root = fresh_id();  // placeholder parent id for the events
        for (NodeId v = 0; v < view_.node_count(); ++v) {
            std::set<NodeId> one{v};
            ClusterId id = form_cluster(std::move(one), DynGraph(view_.node_count()), 1);
            Cluster& c = cluster(id);
            c.center = v;
            c.mu = 0.0;
            c.sssp.emplace(DynGraph(view_.node_count()), v);
            if (singleton_mode_) {
                SplitEvent ev;
                ev.parent = root;
                ev.child = id;
                ev.child_nodes = {v};
                for (const auto& [u, w] : view_.neighbors(v))
                    if (u > v) ev.boundary_edges.emplace_back(v, u);
                ev.parent_emptied = (v == view_.node_count() - 1);
                events_.push_back(ev);
                if (on_split_) on_split_(*this, ev);
            }
        }
    }

    void assign_center(Cluster& c) {
        c.mu = static_cast<double>(c.gc.volume(c.nodes));
        if (c.mu == 0.0) {
            require(c.nodes.size() == 1, "ldd: AssignCenter on edgeless multi-node cluster");
            c.center = *c.nodes.begin();
        } else {
            std::map<NodeId, double> q;
            for (NodeId v : c.nodes) q[v] = static_cast<double>(c.gc.degree(v));
            c.center = c.rng.weighted_pick(q);
        }
        c.fc.clear();
        DynGraph hc(view_.node_count());
        for (NodeId v : c.nodes)
            for (const auto& [u, w] : c.gc.neighbors(v))
                if (v < u) {
                    c.fc.emplace(v, u);
                    hc.insert_edge(v, u, w);
                }
        c.sssp.emplace(std::move(hc), c.center);
        for (const EdgeKey& e : c.fc) clusters_of_edge_[e].insert(c.id);
    }

    void purge_cluster_edges(Cluster& c) {
        for (const EdgeKey& e : c.fc) {
            auto it = clusters_of_edge_.find(e);
            if (it != clusters_of_edge_.end()) {
                it->second.erase(c.id);
                if (it->second.empty()) clusters_of_edge_.erase(it);
            }
        }
        c.fc.clear();
    }

    void run_update(ClusterId cid) {
        if (singleton_mode_) return;
        while (true) {
            auto cit = clusters_.find(cid);
            if (cit == clusters_.end()) return;  // emptied
            Cluster& c = cit->second;
            if (c.nodes.size() <= 1) return;
            auto viol = c.sssp->any_above(c.nodes, 6.0 * rho_);
            if (!viol) return;
            NodeId v = *viol;
            long r = c.rng.radius(p_);
            std::set<NodeId> ball = c.gc.ball(v, static_cast<double>(r));
            double vol_b = static_cast<double>(c.gc.volume(ball));
            if (vol_b <= 0.5 * c.mu) {
                split_off(c, ball);
            } else {
                c.sssp.reset();
                purge_cluster_edges(c);
                assign_center(c);
                ++c.recenters;
                events_.push_back(RecenterEvent{c.id});
            }
        }
    }

    void split_off(Cluster& parent, const std::set<NodeId>& ball) {
        SplitEvent ev;
        ev.parent = parent.id;
        ev.child_nodes.assign(ball.begin(), ball.end());
        for (NodeId b : ball)
            for (const auto& [u, w] : parent.gc.neighbors(b))
                if (!ball.count(u)) ev.boundary_edges.emplace_back(b, u);

        DynGraph child_gc = parent.gc.snapshot_induced(ball);
        for (NodeId b : ball) {
            std::vector<NodeId> nbrs;
            for (const auto& [u, w] : parent.gc.neighbors(b)) nbrs.push_back(u);
            for (NodeId u : nbrs) parent.gc.delete_edge(b, u);
            parent.nodes.erase(b);
        }
        ev.parent_emptied = parent.nodes.empty();

        ClusterId child = form_cluster(std::set<NodeId>(ball), std::move(child_gc),
                                       parent.depth + 1);
        assign_center(cluster(child));
        ev.child = child;

        if (ev.parent_emptied) {
            // Frozen mu can exceed twice the live volume, so the ball may
            // swallow the whole cluster; drop the husk.
            purge_cluster_edges(parent);
            clusters_.erase(parent.id);
        }

        events_.push_back(ev);
        if (on_split_) on_split_(*this, ev);
        run_update(child);
    }

    DynGraph view_;
    double beta_;
    double a_;
    double p_ = 1.0;
    double rho_ = 0.0;
    double depth_cap_ = 2.0;
    std::size_t m0_ = 0;
    RngStream rng_;
    SplitHook on_split_;
    std::map<ClusterId, Cluster> clusters_;
    std::vector<ClusterId> cluster_of_;
    std::vector<long> cluster_changes_;
    std::map<EdgeKey, std::set<ClusterId>> clusters_of_edge_;
    std::vector<LddEvent> events_;
    ClusterId next_id_ = 0;
    bool singleton_mode_ = false;
};

}  // namespace dyntree

#endif
