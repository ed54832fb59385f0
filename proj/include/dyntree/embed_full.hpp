#ifndef DYNTREE_EMBED_FULL_HPP
#define DYNTREE_EMBED_FULL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "embed_decr.hpp"
#include "forest.hpp"
#include "frt.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace dyntree {

/// Fully dynamic tree embedding: inserts and deletes, tree() valid between
/// updates. Leaves cover at least [0, universe) plus every node touched by
/// an edge.
class TreeEmbedder {
  public:
    virtual ~TreeEmbedder() = default;
    virtual void insert_edge(NodeId u, NodeId v, double w) = 0;
    virtual void delete_edge(NodeId u, NodeId v) = 0;
    virtual const EmbedForest& tree() const = 0;
    virtual const DynGraph& graph() const = 0;
};

// Auxiliary graphs carry tree-path edges whose weights exceed the input
// weight cap, so they get a cap of their own.
inline constexpr double kAuxWeightCap = 9.0e15;

/// Base of the recursion: a fresh static randomized tree embedding after
/// every update. Fresh randomness per rebuild keeps the adversary oblivious.
class FrtRebuildEmbedder : public TreeEmbedder {
  public:
    FrtRebuildEmbedder(int universe, double max_weight, RngStream rng)
        : g_(universe, max_weight), universe_(universe), rng_(std::move(rng)) {
        rebuild();
    }

    void insert_edge(NodeId u, NodeId v, double w) override {
        g_.ensure_node(u);
        g_.ensure_node(v);
        g_.insert_edge(u, v, w);
        rebuild();
    }

    void delete_edge(NodeId u, NodeId v) override {
        g_.delete_edge(u, v);
        rebuild();
    }

    const EmbedForest& tree() const override { return tree_; }
    const DynGraph& graph() const override { return g_; }
    long rebuilds() const { return ticks_; }

  private:
    void rebuild() {
        std::vector<NodeId> nodes;
        for (NodeId v = 0; v < g_.node_count(); ++v)
            if (v < universe_ || g_.degree(v) > 0) nodes.push_back(v);
        auto r = frt_embed(g_, nodes, rng_.derive("t=" + std::to_string(ticks_++)),
                           g_.node_count());
        tree_ = std::move(r.forest);
    }

    DynGraph g_;
    int universe_;
    RngStream rng_;
    EmbedForest tree_;
    long ticks_ = 0;
};

std::unique_ptr<TreeEmbedder> make_full_embedder(int depth, int universe,
                                                 double max_weight, double a,
                                                 std::size_t m_bound,
                                                 const RngStream& rng);

/// Phase-based reduction at recursion depth >= 2. A phase lasts k updates
/// against a frozen edge set F embedded decrementally (T_A); edges inserted
/// meanwhile live in the auxiliary graph H together with their endpoints'
/// root paths, H is embedded by a depth-(d-1) instance (T_B), and the output
/// is the composition T_C = (T_A \ P) union T_B. Before the first k updates
/// the inner instance simply runs on the graph itself.
class BootstrapEmbedder : public TreeEmbedder {
  public:
    struct PathEdge {
        double weight = 0.0;
        long count = 0;  // number of U-occurrences whose root path uses it
    };

    BootstrapEmbedder(int depth, int universe, double max_weight, double a,
                      std::size_t m_bound, RngStream rng)
        : g_(universe, max_weight),
          depth_(depth),
          universe_(universe),
          max_weight_(max_weight),
          a_param_(a),
          m_bound_(std::max<std::size_t>(m_bound, 1)),
          rng_(std::move(rng)) {
        if (depth_ < 2) throw InvalidParameter("bootstrap: depth must be >= 2");
        if (a < 1.0) throw InvalidParameter("bootstrap: a < 1");
        // Nudge below the ceiling so exact powers (27^(2/3) = 9) stay exact.
        double kf = std::ceil(
            std::pow(static_cast<double>(m_bound_), 1.0 - 1.0 / depth_) - 1e-9);
        k_ = std::max<std::size_t>(1, static_cast<std::size_t>(kf));
        b_ = make_full_embedder(depth_ - 1, universe_, max_weight_, a_param_, 4,
                                rng_.derive("phase=0/inner"));
    }

    void insert_edge(NodeId u, NodeId v, double w) override {
        g_.ensure_node(u);
        g_.ensure_node(v);
        g_.insert_edge(u, v, w);
        if (!phase_mode_) {
            b_->insert_edge(u, v, w);
        } else {
            EdgeKey e(u, v);
            i_[e] = w;
            h_add_edge(aux_graph_id(u), aux_graph_id(v), w);
            add_endpoint(u);
            add_endpoint(v);
        }
        tick();
    }

    void delete_edge(NodeId u, NodeId v) override {
        g_.delete_edge(u, v);
        if (!phase_mode_) {
            b_->delete_edge(u, v);
        } else {
            EdgeKey e(u, v);
            auto it = i_.find(e);
            if (it != i_.end()) {
                i_.erase(it);
                remove_endpoint(u);
                remove_endpoint(v);
                h_del_edge(aux_graph_id(u), aux_graph_id(v));
            } else {
                d_.insert(e);
                a_->delete_edge(e);
                // Any U-member's root path may have moved; swap stale paths.
                std::vector<NodeId> members;
                for (const auto& [x, c] : u_count_) members.push_back(x);
                for (NodeId x : members) refresh_path(x);
            }
        }
        tick();
    }

    const EmbedForest& tree() const override {
        if (tc_dirty_) {
            tc_ = compose();
            tc_dirty_ = false;
        }
        return tc_;
    }

    const DynGraph& graph() const override { return g_; }

    int depth() const { return depth_; }
    std::size_t k() const { return k_; }
    bool phase_mode() const { return phase_mode_; }
    int phase() const { return phase_; }
    std::size_t phase_updates() const { return updates_this_phase_; }
    long h_updates() const { return h_updates_; }
    long path_swaps() const { return path_swaps_; }
    const DynGraph& aux_graph() const { return h_; }

    /// H id of a graph endpoint. Nodes that join after the phase froze would
    /// otherwise alias internal tree ids of the frozen decremental instance,
    /// so graph and tree vertices get disjoint parities.
    NodeId aux_graph_id(NodeId u) const {
        require(phase_mode_, "bootstrap: no auxiliary ids before phase mode");
        return u < a_->node_count() ? 2 * u : 2 * u + 1;
    }

    /// H id of a decremental-tree node.
    TreeNodeId aux_tree_id(TreeNodeId t) const { return 2 * t; }

    /// Leaf id of an H vertex inside the inner embedder's tree.
    NodeId inner_leaf_id(NodeId h_id) const { return h2dense_.at(h_id); }
    const Hierarchy& decremental() const {
        require(phase_mode_, "bootstrap: no decremental instance before phase mode");
        return *a_;
    }
    const TreeEmbedder& inner() const { return *b_; }
    const std::map<EdgeKey, PathEdge>& path_edges() const { return p_; }
    const std::map<EdgeKey, double>& inserted_edges() const { return i_; }
    const std::set<EdgeKey>& deleted_from_f() const { return d_; }
    const std::map<NodeId, long>& endpoint_counts() const { return u_count_; }

    std::vector<RootStep> stored_path(NodeId u) const {
        auto it = path_of_.find(u);
        return it == path_of_.end() ? std::vector<RootStep>{} : it->second;
    }

    /// Non-isolated nodes of the auxiliary graph.
    std::set<NodeId> aux_nodes() const {
        std::set<NodeId> vh;
        for (NodeId x = 0; x < h_.node_count(); ++x)
            if (h_.degree(x) > 0) vh.insert(x);
        return vh;
    }

    void check_invariants() const {
        if (!phase_mode_) return;
        a_->check_invariants();
        // D logs F-edge deletions forwarded to the decremental instance, so
        // every live edge is either an untouched F-edge or tracked in I
        // (an F-edge deleted and later reinserted sits in both D and I).
        std::vector<EdgeKey> live_edges = g_.edges();
        std::set<EdgeKey> live(live_edges.begin(), live_edges.end());
        for (const auto& [e, w] : i_) {
            require(live.count(e) > 0, "bootstrap: I edge not alive");
            require(f_.count(e) == 0 || d_.count(e) > 0,
                    "bootstrap: I edge still covered by F");
        }
        for (const EdgeKey& e : d_)
            require(f_.count(e) > 0, "bootstrap: D edge was not in F");
        for (const EdgeKey& e : live)
            if (!f_.count(e) || d_.count(e))
                require(i_.count(e) > 0, "bootstrap: live edge tracked neither by F nor I");
        for (const auto& [e, w] : f_)
            if (!live.count(e)) require(d_.count(e) > 0, "bootstrap: F \\ E not logged in D");
        // P equals the multiset union of the stored paths of U.
        std::map<EdgeKey, long> want;
        for (const auto& [u, c] : u_count_) {
            require(c > 0, "bootstrap: zero entry left in U");
            for (const RootStep& s : path_of_.at(u)) want[EdgeKey(s.node, s.parent)] += c;
        }
        std::map<EdgeKey, long> have;
        for (const auto& [e, pe] : p_) {
            require(pe.count > 0, "bootstrap: zero-count P edge kept");
            have[e] = pe.count;
        }
        require(want == have, "bootstrap: P multiplicities drift");
        // H = I union P, with matching weights; the id encoding keeps the two
        // families on disjoint keys, so the edge-count match below also proves
        // they never merge.
        std::size_t h_edges = 0;
        for (const auto& [e, w] : i_) {
            NodeId hu = aux_graph_id(e.u), hv = aux_graph_id(e.v);
            require(h_.has_edge(hu, hv) && h_.weight(hu, hv) == w,
                    "bootstrap: I edge not in H");
            ++h_edges;
        }
        for (const auto& [e, pe] : p_) {
            NodeId hu = aux_tree_id(e.u), hv = aux_tree_id(e.v);
            require(h_.has_edge(hu, hv) && h_.weight(hu, hv) == pe.weight,
                    "bootstrap: P edge not in H");
            ++h_edges;
        }
        require(h_edges == h_.edge_count(), "bootstrap: H has extra edges");
        require(h_.edge_count() == b_->graph().edge_count(),
                "bootstrap: inner graph drift from H");
        for (const EdgeKey& e : h_.edges()) {
            NodeId du = h2dense_.at(e.u), dv = h2dense_.at(e.v);
            require(b_->graph().has_edge(du, dv) &&
                        b_->graph().weight(du, dv) == h_.weight(e.u, e.v),
                    "bootstrap: inner graph drift from H");
        }
        check_aux_size();
        tree().check_wellformed();
    }

    /// |V(H)| stays linear in the phase length times the tree height.
    void check_aux_size() const {
        if (!phase_mode_) return;
        std::size_t vh = aux_nodes().size();
        std::size_t cap =
            2 * std::max<std::size_t>(updates_this_phase_, 1) *
            static_cast<std::size_t>(a_->levels() + 3);
        require(vh <= cap, "bootstrap: auxiliary graph grew past 2u(L+3)");
    }

  private:
    void tick() {
        tc_dirty_ = true;
        ++updates_this_phase_;
        if (phase_mode_) check_aux_size();
        if (updates_this_phase_ >= k_) rollover();
    }

    void rollover() {
        ++phase_;
        phase_mode_ = true;
        updates_this_phase_ = 0;
        i_.clear();
        d_.clear();
        u_count_.clear();
        path_of_.clear();
        p_.clear();
        f_.clear();
        for (const EdgeKey& e : g_.edges()) f_[e] = g_.weight(e.u, e.v);
        h_ = DynGraph(0, kAuxWeightCap);
        h2dense_.clear();
        dense2h_.clear();
        std::string ph = "phase=" + std::to_string(phase_);
        a_ = std::make_unique<Hierarchy>(g_, a_param_, rng_.derive(ph + "/a"));
        std::size_t inner_bound = std::max<std::size_t>(
            4, k_ * (2 * static_cast<std::size_t>(a_->levels() + 3) + 1));
        // H weights are tree-level weights (at most delta) or graph weights
        // (at most W <= delta), so the inner instance never needs more.
        double inner_w = std::min(kAuxWeightCap, 2.0 * a_->delta());
        b_ = make_full_embedder(depth_ - 1, 0, inner_w, a_param_, inner_bound,
                                rng_.derive(ph + "/inner"));
        tc_dirty_ = true;
    }

    // The inner instance sees H through a dense per-phase id map: H ids are
    // sparse (encoded tree ids), and hierarchies cost by id range, not degree.
    NodeId dense_id(NodeId x) {
        auto [it, fresh] =
            h2dense_.try_emplace(x, static_cast<NodeId>(dense2h_.size()));
        if (fresh) dense2h_.push_back(x);
        return it->second;
    }

    void h_add_edge(NodeId x, NodeId y, double w) {
        h_.ensure_node(x);
        h_.ensure_node(y);
        h_.insert_edge(x, y, w);
        b_->insert_edge(dense_id(x), dense_id(y), w);
        ++h_updates_;
    }

    void h_del_edge(NodeId x, NodeId y) {
        h_.delete_edge(x, y);
        b_->delete_edge(h2dense_.at(x), h2dense_.at(y));
        ++h_updates_;
    }

    std::vector<RootStep> current_path(NodeId u) const {
        if (u >= a_->node_count()) return {};  // joined after the phase froze
        return a_->root_path(u);
    }

    void add_one_path_copy(const std::vector<RootStep>& path) {
        for (const RootStep& s : path) {
            PathEdge& pe = p_[EdgeKey(s.node, s.parent)];
            pe.weight = s.weight;
            if (pe.count++ == 0)
                h_add_edge(aux_tree_id(s.node), aux_tree_id(s.parent), s.weight);
        }
    }

    void remove_one_path_copy(const std::vector<RootStep>& path) {
        for (const RootStep& s : path) {
            EdgeKey e(s.node, s.parent);
            PathEdge& pe = p_.at(e);
            if (--pe.count == 0) {
                p_.erase(e);
                h_del_edge(aux_tree_id(e.u), aux_tree_id(e.v));
            }
        }
    }

    void add_endpoint(NodeId u) {
        if (u_count_[u]++ == 0) path_of_[u] = current_path(u);
        add_one_path_copy(path_of_[u]);
    }

    void remove_endpoint(NodeId u) {
        remove_one_path_copy(path_of_.at(u));
        if (--u_count_.at(u) == 0) {
            u_count_.erase(u);
            path_of_.erase(u);
        }
    }

    /// Swap u's stale stored path for its current one, forwarding only the
    /// net multiplicity changes to H.
    void refresh_path(NodeId u) {
        std::vector<RootStep> np = current_path(u);
        std::vector<RootStep>& op = path_of_.at(u);
        if (np == op) return;
        long c = u_count_.at(u);
        std::map<EdgeKey, std::pair<double, long>> delta;  // weight, count
        for (const RootStep& s : op) {
            auto& d = delta[EdgeKey(s.node, s.parent)];
            d.first = s.weight;
            d.second -= c;
        }
        for (const RootStep& s : np) {
            auto& d = delta[EdgeKey(s.node, s.parent)];
            d.first = s.weight;
            d.second += c;
        }
        for (const auto& [e, d] : delta) {
            if (d.second == 0) continue;
            PathEdge& pe = p_[e];
            bool was = pe.count > 0;
            pe.count += d.second;
            require(pe.count >= 0, "bootstrap: negative path multiplicity");
            if (was && pe.count == 0) {
                p_.erase(e);
                h_del_edge(aux_tree_id(e.u), aux_tree_id(e.v));
            } else if (!was && pe.count > 0) {
                pe.weight = d.first;
                h_add_edge(aux_tree_id(e.u), aux_tree_id(e.v), pe.weight);
            }
        }
        op = std::move(np);
        ++path_swaps_;
    }

    EmbedForest compose() const {
        EmbedForest tc;
        NodeId leafbound = std::max(universe_, g_.node_count());
        if (!phase_mode_) {
            tc = b_->tree();
            for (NodeId v = 0; v < leafbound; ++v)
                if (!tc.has_node(v)) tc.mark_leaf(v);
            return tc;
        }
        const EmbedForest& ta = a_->forest();
        const EmbedForest& tb = b_->tree();
        std::set<NodeId> vh = aux_nodes();
        TreeNodeId n_a = a_->node_count();

        TreeNodeId offset = leafbound;
        for (TreeNodeId t : ta.nodes()) offset = std::max(offset, t + 1);
        offset = std::max(offset, static_cast<TreeNodeId>(h_.node_count()));
        std::map<TreeNodeId, TreeNodeId> rm_ta, rm_tb;
        auto fresh_id = [&](std::map<TreeNodeId, TreeNodeId>& rm, TreeNodeId x) {
            auto [it, fresh] = rm.try_emplace(x, offset);
            if (fresh) ++offset;
            return it->second;
        };
        // Internal T_A ids inside the leaf range would alias graph nodes that
        // joined after the phase froze; move those out of the way.
        auto fin_ta = [&](TreeNodeId t) {
            if (t < n_a || t >= leafbound) return t;
            return fresh_id(rm_ta, t);
        };
        auto fin_tb = [&](TreeNodeId x) {
            if (tb.leaves().count(x)) {
                NodeId hx = dense2h_[static_cast<std::size_t>(x)];
                if (hx % 2 != 0) return (hx - 1) / 2;  // late graph node
                return fin_ta(hx / 2);                 // shared T_A node
            }
            return fresh_id(rm_tb, x);
        };

        for (const auto& [c, pw] : ta.parent_map()) {
            if (p_.count(EdgeKey(c, pw.first))) continue;
            TreeNodeId cc = fin_ta(c), pp = fin_ta(pw.first);
            tc.add_node(cc);
            tc.add_node(pp);
            tc.set_parent(cc, pp, pw.second);
        }
        for (const auto& [c, pw] : tb.parent_map()) {
            if (tb.leaves().count(c) &&
                !vh.count(dense2h_[static_cast<std::size_t>(c)]))
                continue;  // stale leaf
            TreeNodeId cc = fin_tb(c);
            TreeNodeId pp = fin_tb(pw.first);
            if (tc.has_parent(cc))
                throw CompositionCycle("composition: node acquires two parents (depth " +
                                       std::to_string(depth_) + ", tb node " +
                                       std::to_string(c) + ")");
            tc.add_node(cc);
            tc.add_node(pp);
            tc.set_parent(cc, pp, pw.second);
        }
        for (NodeId v = 0; v < leafbound; ++v) tc.mark_leaf(v);
        try {
            tc.check_wellformed();
        } catch (const InvariantViolation&) {
            throw CompositionCycle("composition: cycle detected");
        }
        return tc;
    }

    DynGraph g_;
    int depth_;
    NodeId universe_;
    double max_weight_;
    double a_param_;
    std::size_t m_bound_;
    RngStream rng_;
    std::size_t k_ = 1;

    bool phase_mode_ = false;
    int phase_ = 0;
    std::size_t updates_this_phase_ = 0;

    std::map<EdgeKey, double> f_;
    std::map<EdgeKey, double> i_;
    std::set<EdgeKey> d_;
    std::map<NodeId, long> u_count_;
    std::map<NodeId, std::vector<RootStep>> path_of_;
    std::map<EdgeKey, PathEdge> p_;
    DynGraph h_{0, kAuxWeightCap};
    std::unique_ptr<Hierarchy> a_;
    std::unique_ptr<TreeEmbedder> b_;
    std::map<NodeId, NodeId> h2dense_;
    std::vector<NodeId> dense2h_;

    long h_updates_ = 0;
    long path_swaps_ = 0;

    mutable EmbedForest tc_;
    mutable bool tc_dirty_ = true;
};

/// Outer wrapper: whenever the live edge count would exceed the bound,
/// double the bound, restart the wrapped instance with fresh randomness and
/// replay the current edges as insertions.
class DoublingEmbedder : public TreeEmbedder {
  public:
    DoublingEmbedder(int depth, int universe, double max_weight, double a,
                     std::size_t start_bound, RngStream rng)
        : depth_(depth),
          universe_(universe),
          max_weight_(max_weight),
          a_param_(a),
          rng_(std::move(rng)),
          m_bound_(std::max<std::size_t>(start_bound, 4)) {
        rebuild();
    }

    void insert_edge(NodeId u, NodeId v, double w) override {
        if (inner_->graph().edge_count() + 1 > m_bound_) {
            DynGraph snapshot = inner_->graph();
            while (snapshot.edge_count() + 1 > m_bound_) m_bound_ *= 2;
            ++restarts_;
            rebuild();
            for (const EdgeKey& e : snapshot.edges())
                inner_->insert_edge(e.u, e.v, snapshot.weight(e.u, e.v));
        }
        inner_->insert_edge(u, v, w);
    }

    void delete_edge(NodeId u, NodeId v) override { inner_->delete_edge(u, v); }
    const EmbedForest& tree() const override { return inner_->tree(); }
    const DynGraph& graph() const override { return inner_->graph(); }

    std::size_t m_bound() const { return m_bound_; }
    long restarts() const { return restarts_; }
    const TreeEmbedder& wrapped() const { return *inner_; }

  private:
    void rebuild() {
        std::string tag = "mbound=" + std::to_string(m_bound_) + "/restart=" +
                          std::to_string(restarts_);
        if (depth_ <= 1) {
            inner_ = std::make_unique<FrtRebuildEmbedder>(universe_, max_weight_,
                                                          rng_.derive(tag));
        } else {
            inner_ = std::make_unique<BootstrapEmbedder>(
                depth_, universe_, max_weight_, a_param_, m_bound_, rng_.derive(tag));
        }
    }

    int depth_;
    int universe_;
    double max_weight_;
    double a_param_;
    RngStream rng_;
    std::size_t m_bound_;
    long restarts_ = 0;
    std::unique_ptr<TreeEmbedder> inner_;
};

inline std::unique_ptr<TreeEmbedder> make_full_embedder(int depth, int universe,
                                                        double max_weight, double a,
                                                        std::size_t m_bound,
                                                        const RngStream& rng) {
    if (depth <= 1)
        return std::make_unique<FrtRebuildEmbedder>(universe, max_weight,
                                                    rng.derive("frt"));
    return std::make_unique<BootstrapEmbedder>(depth, universe, max_weight, a,
                                               m_bound, rng.derive("boot"));
}

/// Depth preset from the balancing rule sqrt(log2 n / log2 log2 (nW)),
/// floored at 1.
inline int auto_depth(int n, double w) {
    double nw = std::max(4.0, static_cast<double>(n) * w);
    double d = std::sqrt(std::log2(std::max(2.0, static_cast<double>(n))) /
                         std::max(1.0, std::log2(std::log2(nw))));
    return std::max(1, static_cast<int>(std::ceil(d)));
}

}  // namespace dyntree

#endif
