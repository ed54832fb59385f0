#ifndef DYNTREE_FOREST_HPP
#define DYNTREE_FOREST_HPP

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "common.hpp"

namespace dyntree {

struct RootStep {
    TreeNodeId node;    // child endpoint
    TreeNodeId parent;
    double weight;

    bool operator==(const RootStep&) const = default;
};

/// Rooted weighted forest over an arbitrary (sparse) id space. Graph
/// vertices appear as designated leaves; internal nodes carry cluster /
/// HST structure. Parent links only; paths are short (tree height is
/// logarithmic), so queries walk to the root.
class EmbedForest {
  public:
    void add_node(TreeNodeId t) { nodes_.insert(t); }

    void remove_node(TreeNodeId t) {
        require(parent_.count(t) == 0, "forest: removing node with a parent link");
        nodes_.erase(t);
        leaves_.erase(t);
    }

    void mark_leaf(TreeNodeId t) {
        nodes_.insert(t);
        leaves_.insert(t);
    }

    bool has_node(TreeNodeId t) const { return nodes_.count(t) > 0; }
    const std::set<TreeNodeId>& nodes() const { return nodes_; }
    const std::set<TreeNodeId>& leaves() const { return leaves_; }

    void set_parent(TreeNodeId child, TreeNodeId parent, double w) {
        require(nodes_.count(child) && nodes_.count(parent), "forest: unknown endpoint");
        parent_[child] = {parent, w};
    }

    void clear_parent(TreeNodeId child) { parent_.erase(child); }

    bool has_parent(TreeNodeId t) const { return parent_.count(t) > 0; }

    std::pair<TreeNodeId, double> parent(TreeNodeId t) const {
        auto it = parent_.find(t);
        require(it != parent_.end(), "forest: node has no parent");
        return it->second;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return parent_.size(); }

    TreeNodeId root_of(TreeNodeId t) const {
        while (true) {
            auto it = parent_.find(t);
            if (it == parent_.end()) return t;
            t = it->second.first;
        }
    }

    std::vector<TreeNodeId> roots() const {
        std::vector<TreeNodeId> out;
        for (TreeNodeId t : nodes_)
            if (!parent_.count(t)) out.push_back(t);
        return out;
    }

    /// Steps from `t` up to its root, in order.
    std::vector<RootStep> root_path(TreeNodeId t) const {
        std::vector<RootStep> out;
        std::size_t guard = 0;
        while (true) {
            auto it = parent_.find(t);
            if (it == parent_.end()) return out;
            out.push_back({t, it->second.first, it->second.second});
            t = it->second.first;
            require(++guard <= nodes_.size(), "forest: parent cycle");
        }
    }

    /// Weight of the unique tree path between u and v; infinity when they
    /// live in different trees. Walks both root paths and meets at the
    /// lowest common ancestor.
    double distance(TreeNodeId u, TreeNodeId v) const {
        if (u == v) return 0.0;
        std::map<TreeNodeId, double> up;  // ancestor -> distance from u
        double du = 0.0;
        TreeNodeId x = u;
        up[x] = 0.0;
        while (parent_.count(x)) {
            auto [p, w] = parent_.at(x);
            du += w;
            x = p;
            up[x] = du;
        }
        double dv = 0.0;
        TreeNodeId y = v;
        while (true) {
            auto it = up.find(y);
            if (it != up.end()) return it->second + dv;
            auto pit = parent_.find(y);
            if (pit == parent_.end()) return kInf;
            dv += pit->second.second;
            y = pit->second.first;
        }
    }

    /// Edges on any root-to-leaf path, maximized over leaves.
    std::size_t height() const {
        std::size_t h = 0;
        for (TreeNodeId t : leaves_) h = std::max(h, root_path(t).size());
        return h;
    }

    /// Acyclicity, single-parent wellformedness and leaf membership.
    void check_wellformed() const {
        for (const auto& [c, pw] : parent_) {
            require(nodes_.count(c) && nodes_.count(pw.first), "forest: dangling edge");
            require(pw.second >= 0.0, "forest: negative edge weight");
        }
        for (TreeNodeId t : nodes_) root_path(t);  // throws on a cycle
        for (TreeNodeId t : leaves_) require(nodes_.count(t) > 0, "forest: leaf not a node");
    }

    bool operator==(const EmbedForest& o) const {
        return nodes_ == o.nodes_ && leaves_ == o.leaves_ && parent_ == o.parent_;
    }

    const std::map<TreeNodeId, std::pair<TreeNodeId, double>>& parent_map() const {
        return parent_;
    }

  private:
    std::set<TreeNodeId> nodes_;
    std::set<TreeNodeId> leaves_;
    std::map<TreeNodeId, std::pair<TreeNodeId, double>> parent_;
};

struct ForestEdit {
    enum Kind { NodeAdded, NodeRemoved, EdgeAdded, EdgeRemoved } kind;
    TreeNodeId node;
    TreeNodeId parent = -1;
    double weight = 0.0;
};

/// Edit list turning `before` into `after`; the change feed consumed by the
/// harness and by upstream embedders.
inline std::vector<ForestEdit> forest_diff(const EmbedForest& before, const EmbedForest& after) {
    std::vector<ForestEdit> out;
    for (TreeNodeId t : before.nodes())
        if (!after.has_node(t)) out.push_back({ForestEdit::NodeRemoved, t});
    for (TreeNodeId t : after.nodes())
        if (!before.has_node(t)) out.push_back({ForestEdit::NodeAdded, t});
    for (const auto& [c, pw] : before.parent_map()) {
        auto it = after.parent_map().find(c);
        if (it == after.parent_map().end() || it->second != pw)
            out.push_back({ForestEdit::EdgeRemoved, c, pw.first, pw.second});
    }
    for (const auto& [c, pw] : after.parent_map()) {
        auto it = before.parent_map().find(c);
        if (it == before.parent_map().end() || it->second != pw)
            out.push_back({ForestEdit::EdgeAdded, c, pw.first, pw.second});
    }
    return out;
}

}  // namespace dyntree

#endif
