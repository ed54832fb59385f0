#ifndef DYNTREE_EMBED_DECR_HPP
#define DYNTREE_EMBED_DECR_HPP

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "forest.hpp"
#include "graph.hpp"
#include "ldd.hpp"
#include "rng.hpp"

namespace dyntree {

/// Decremental tree embedding: a stack of decompositions at geometrically
/// decreasing diameter scales delta/2^i, glued into one rooted tree. Leaves
/// are the graph vertices; each internal node is a live cluster of some
/// level, hanging off the level-above cluster that contains its
/// representative with edge weight delta/2^(i-1).
///
/// Levels where the requested diameter is too small for the beta formula run
/// the degenerate all-singletons decomposition instead, which keeps the tree
/// shape uniform without a separate code path downstream.
class Hierarchy {
  public:
    Hierarchy(const DynGraph& g, double a, RngStream rng)
        : g_(g), a_(a), rng_(std::move(rng)) {
        n_ = g.node_count();
        if (n_ == 0) throw InvalidParameter("hierarchy: empty graph");
        if (a < 1.0) throw InvalidParameter("hierarchy: a < 1");

        double wmax = 1.0;
        for (const EdgeKey& e : g.edges()) wmax = std::max(wmax, g.weight(e.u, e.v));
        L_ = ceil_log2(static_cast<double>(n_) * wmax);
        delta_ = std::ldexp(1.0, L_);

        next_tnode_ = n_;
        stubs_.assign(L_ + 1, -1);
        ldds_.resize(L_ + 1);
        tnode_of_.resize(L_ + 1);
        members_.resize(L_ + 1);
        node_cluster_.assign(L_ + 1, std::vector<ClusterId>(n_, 0));
        cluster_rep_.resize(L_ + 1);
        rep_of_.resize(L_ + 1);
        betas_.assign(L_ + 1, 0.0);
        change_count_.assign(n_, 0);

        // Skeleton: one provisional whole-graph cluster per level (id 0 in
        // every decomposition), chained root to leaves.
        for (int i = 0; i <= L_; ++i) {
            stubs_[i] = next_tnode_++;
            forest_.add_node(stubs_[i]);
            tnode_level_[stubs_[i]] = i;
            tnode_of_[i][0] = stubs_[i];
            if (i >= 1) {
                forest_.set_parent(stubs_[i], stubs_[i - 1], level_weight(i - 1));
                std::set<NodeId> all;
                for (NodeId v = 0; v < n_; ++v) all.insert(v);
                members_[i][0] = std::move(all);
                cluster_rep_[i][0] = 0;
                rep_of_[i][0] = 0;
            }
        }
        for (NodeId v = 0; v < n_; ++v) {
            forest_.mark_leaf(v);
            tnode_level_[v] = L_ + 1;
            forest_.set_parent(v, stubs_[L_], level_weight(L_));
        }

        // Finest levels first: a split at level i forwards its boundary
        // edges to levels i+1..L, which must already exist.
        std::size_t m0 = g.edge_count();
        double logm = m0 > 0 ? std::log2(static_cast<double>(m0)) : 0.0;
        for (int i = L_; i >= 1; --i) {
            double eta = level_weight(i);
            double beta = n_ >= 2
                              ? 6.0 * (a_ + 2.0) * (2.0 + logm) *
                                    std::log(static_cast<double>(n_)) / eta
                              : 1.0;
            betas_[i] = beta;
            auto hook = [this, i](const LddState& l, const SplitEvent& ev) {
                handle_split(i, l, ev);
            };
            RngStream lr = rng_.derive("level=" + std::to_string(i));
            if (beta >= 1.0) {
                ldds_[i] = std::make_unique<LddState>(
                    LddState::singletons(g_, std::move(lr), hook));
            } else {
                ldds_[i] = std::make_unique<LddState>(g_, beta, a_, std::move(lr), hook);
            }
        }
    }

    void delete_edge(const EdgeKey& e) {
        g_.delete_edge(e);  // throws on a missing edge
        for (int i = 1; i <= L_; ++i) ldds_[i]->delete_edge(e);
    }
    void delete_edge(NodeId u, NodeId v) { delete_edge(EdgeKey(u, v)); }

    int node_count() const { return n_; }
    int levels() const { return L_; }
    double delta() const { return delta_; }
    double beta_used(int i) const { return betas_.at(i); }
    const DynGraph& graph() const { return g_; }
    const EmbedForest& forest() const { return forest_; }
    const LddState& ldd(int i) const { return *ldds_.at(i); }
    TreeNodeId root() const { return stubs_[0]; }

    long change_count(NodeId v) const { return change_count_.at(v); }
    long total_changes() const {
        long s = 0;
        for (long c : change_count_) s += c;
        return s;
    }

    double tree_distance(NodeId u, NodeId v) const { return forest_.distance(u, v); }
    std::vector<RootStep> root_path(NodeId v) const { return forest_.root_path(v); }

    int tnode_level(TreeNodeId t) const { return tnode_level_.at(t); }

    /// Cross-checks the glue state against the per-level decompositions and
    /// the tree, then the scale invariants that only hold at quiescence:
    /// level views agree on boundary deletions and finer levels refine
    /// coarser ones.
    void check_invariants() const {
        forest_.check_wellformed();
        require(forest_.roots() == std::vector<TreeNodeId>{stubs_[0]},
                "hierarchy: tree is not single-rooted");
        require(static_cast<int>(forest_.leaves().size()) == n_,
                "hierarchy: leaf set mismatch");
        for (NodeId v = 0; v < n_; ++v) {
            require(forest_.leaves().count(v) > 0, "hierarchy: missing leaf");
            auto path = forest_.root_path(v);
            require(static_cast<int>(path.size()) == L_ + 1,
                    "hierarchy: leaf depth differs from level count");
            for (int k = 0; k < static_cast<int>(path.size()); ++k) {
                int child_level = L_ + 1 - k;
                require(tnode_level_.at(path[k].node) == child_level,
                        "hierarchy: path skips a level");
                require(tnode_level_.at(path[k].parent) == child_level - 1,
                        "hierarchy: parent not one level up");
                require(path[k].weight == level_weight(child_level - 1),
                        "hierarchy: off-schedule edge weight");
            }
        }
        for (int i = 1; i <= L_; ++i) {
            const LddState& d = *ldds_[i];
            d.check_invariants();
            for (NodeId v = 0; v < n_; ++v)
                require(node_cluster_[i][v] == d.cluster_of(v),
                        "hierarchy: cluster mirror out of sync");
            for (const auto& [cid, nodes] : members_[i]) {
                require(nodes == d.cluster_nodes(cid), "hierarchy: member mirror drift");
                TreeNodeId t = tnode_of_[i].at(cid);
                NodeId rep = cluster_rep_[i].at(cid);
                require(nodes.count(rep) > 0, "hierarchy: representative left its cluster");
                require(rep_of_[i].at(rep) == cid, "hierarchy: rep index inconsistent");
                require(forest_.parent(t).first == cluster_tnode(i - 1, rep),
                        "hierarchy: cluster hangs off the wrong parent");
            }
            require(members_[i].size() == d.cluster_ids().size(),
                    "hierarchy: cluster census mismatch");
        }
        // Level 1 receives only adversary deletions, so its view is G.
        if (L_ >= 1)
            require(ldds_[1]->view().edges() == g_.edges(),
                    "hierarchy: level-1 view differs from the graph");
        for (int i = 1; i <= L_; ++i) {
            for (const EdgeKey& e : ldds_[i]->inter_cluster_edges())
                for (int j = i + 1; j <= L_; ++j)
                    require(!ldds_[j]->view().has_edge(e),
                            "hierarchy: boundary edge not deleted below");
            if (i < L_)
                for (const auto& [cid, nodes] : members_[i + 1]) {
                    ClusterId coarse = node_cluster_[i][*nodes.begin()];
                    for (NodeId v : nodes)
                        require(node_cluster_[i][v] == coarse,
                                "hierarchy: finer level does not refine coarser");
                }
        }
    }

  private:
    double level_weight(int j) const { return std::ldexp(1.0, L_ - j); }

    TreeNodeId cluster_tnode(int lvl, NodeId v) const {
        if (lvl == 0) return stubs_[0];
        return tnode_of_[lvl].at(node_cluster_[lvl][v]);
    }

    bool leaf_under(NodeId v, TreeNodeId t) const {
        TreeNodeId x = v;
        while (forest_.has_parent(x)) {
            x = forest_.parent(x).first;
            if (x == t) return true;
        }
        return false;
    }

    void handle_split(int i, const LddState&, const SplitEvent& ev) {
        const NodeId rep_b = ev.child_nodes.front();  // ascending, so the min
        std::set<NodeId>& pm = members_[i].at(ev.parent);
        std::set<NodeId> bset(ev.child_nodes.begin(), ev.child_nodes.end());
        for (NodeId v : bset) pm.erase(v);
        members_[i][ev.child] = bset;
        for (NodeId v : bset) node_cluster_[i][v] = ev.child;

        TreeNodeId tb = next_tnode_++;
        forest_.add_node(tb);
        tnode_level_[tb] = i;
        tnode_of_[i][ev.child] = tb;
        forest_.set_parent(tb, cluster_tnode(i - 1, rep_b), level_weight(i - 1));
        cluster_rep_[i][ev.child] = rep_b;

        // Each split-off vertex carries its finer structure along.
        for (NodeId v : ev.child_nodes) {
            ++change_count_[v];
            if (i == L_) {
                forest_.set_parent(v, tb, level_weight(L_));
            } else {
                auto rit = rep_of_[i + 1].find(v);
                if (rit != rep_of_[i + 1].end())
                    forest_.set_parent(tnode_of_[i + 1].at(rit->second), tb,
                                       level_weight(i));
            }
        }

        // If the residual lost its representative, promote the smallest
        // remaining vertex and follow it to its current coarser cluster.
        NodeId old_rep = cluster_rep_[i].at(ev.parent);
        if (bset.count(old_rep)) {
            rep_of_[i].erase(old_rep);
            if (!ev.parent_emptied) {
                NodeId w = *pm.begin();
                cluster_rep_[i][ev.parent] = w;
                rep_of_[i][w] = ev.parent;
                TreeNodeId pt = tnode_of_[i].at(ev.parent);
                TreeNodeId target = cluster_tnode(i - 1, w);
                if (forest_.parent(pt).first != target) {
                    forest_.set_parent(pt, target, level_weight(i - 1));
                    for (NodeId v = 0; v < n_; ++v)
                        if (leaf_under(v, pt)) ++change_count_[v];
                }
            }
        }
        rep_of_[i][rep_b] = ev.child;

        if (ev.parent_emptied) {
            TreeNodeId pt = tnode_of_[i].at(ev.parent);
            forest_.clear_parent(pt);
            for (const auto& [c, pw] : forest_.parent_map())
                require(pw.first != pt, "hierarchy: emptied cluster still has children");
            forest_.remove_node(pt);
            tnode_level_.erase(pt);
            tnode_of_[i].erase(ev.parent);
            cluster_rep_[i].erase(ev.parent);
            members_[i].erase(ev.parent);
        }

        // Boundary edges stop existing for every finer level.
        for (int j = i + 1; j <= L_; ++j)
            for (const EdgeKey& e : ev.boundary_edges) ldds_[j]->delete_edge(e);
    }

    DynGraph g_;
    double a_;
    int n_ = 0;
    int L_ = 0;
    double delta_ = 1.0;
    RngStream rng_;
    EmbedForest forest_;
    TreeNodeId next_tnode_ = 0;
    std::vector<TreeNodeId> stubs_;
    std::vector<std::unique_ptr<LddState>> ldds_;
    std::vector<std::map<ClusterId, TreeNodeId>> tnode_of_;
    std::vector<std::map<ClusterId, std::set<NodeId>>> members_;
    std::vector<std::vector<ClusterId>> node_cluster_;
    std::vector<std::map<ClusterId, NodeId>> cluster_rep_;
    std::vector<std::map<NodeId, ClusterId>> rep_of_;
    std::vector<double> betas_;
    std::map<TreeNodeId, int> tnode_level_;
    std::vector<long> change_count_;
};

}  // namespace dyntree

#endif
