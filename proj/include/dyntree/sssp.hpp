#ifndef DYNTREE_SSSP_HPP
#define DYNTREE_SSSP_HPP

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "common.hpp"
#include "graph.hpp"

namespace dyntree {

/// Decremental 2-approximate single-source distance estimates over a private
/// graph copy. Reference implementation: exact distances recomputed lazily
/// (a deletion marks the instance dirty; the next query re-runs Dijkstra).
/// Exact distances satisfy the 2-approximation contract
///   d_H(c,v) <= delta(c,v) <= 2 d_H(c,v)
/// and are monotone non-decreasing under deletions.
///
/// Ball removals from the owning cluster are deliberately not reported here:
/// the instance keeps measuring distances in the larger private graph, which
/// is what turns the cluster's diameter bound into a weak one.
class DecrSssp {
  public:
    DecrSssp(DynGraph h, NodeId source) : h_(std::move(h)), source_(source) {
        if (!h_.has_node(source_)) throw InvalidParameter("DecrSssp: source not in graph");
    }

    NodeId source() const { return source_; }
    const DynGraph& graph() const { return h_; }

    /// Deleting an edge already absent from the private graph is a no-op:
    /// the same physical edge may be deleted from G after having left H_C.
    void delete_edge(const EdgeKey& e) {
        if (!h_.has_edge(e)) return;
        h_.delete_edge(e);
        dirty_ = true;
    }

    double estimate(NodeId v) const {
        refresh();
        return dist_[v];
    }

    /// Smallest node of `live` whose estimate exceeds the threshold, if any.
    /// The scan domain is the caller's live node set; distances are measured
    /// in the (possibly larger) private graph.
    std::optional<NodeId> any_above(const std::set<NodeId>& live, double threshold) const {
        refresh();
        for (NodeId v : live)
            if (dist_[v] > threshold) return v;
        return std::nullopt;
    }

  private:
    void refresh() const {
        if (dirty_ || dist_.empty()) {
            dist_ = h_.sssp_exact(source_);
            dirty_ = false;
        }
    }

    DynGraph h_;
    NodeId source_;
    mutable bool dirty_ = true;
    mutable std::vector<double> dist_;
};

}  // namespace dyntree

#endif
