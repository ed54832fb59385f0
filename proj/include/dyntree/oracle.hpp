#ifndef DYNTREE_ORACLE_HPP
#define DYNTREE_ORACLE_HPP

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "embed_full.hpp"
#include "rng.hpp"

namespace dyntree {

/// Fully dynamic approximate distance oracle: ceil(a*log2 n) independent
/// fully dynamic embeddings fed the same updates; a query takes the minimum
/// tree distance over the copies. Answers never undercut the true distance.
class DistanceOracle {
  public:
    DistanceOracle(int n, double max_weight, int depth, double a, RngStream rng,
                   int copies_override = 0) {
        if (n < 1) throw InvalidParameter("oracle: n < 1");
        int copies = copies_override > 0
                         ? copies_override
                         : static_cast<int>(std::ceil(
                               a * std::log2(std::max(2.0, static_cast<double>(n)))));
        copies = std::max(1, copies);
        for (int c = 0; c < copies; ++c)
            copies_.push_back(std::make_unique<DoublingEmbedder>(
                depth, n, max_weight, a, 4, rng.derive("copy=" + std::to_string(c))));
    }

    int copy_count() const { return static_cast<int>(copies_.size()); }
    const DoublingEmbedder& copy(int c) const { return *copies_.at(c); }
    const DynGraph& graph() const { return copies_.front()->graph(); }

    void insert_edge(NodeId u, NodeId v, double w) {
        for (auto& c : copies_) c->insert_edge(u, v, w);
    }

    void delete_edge(NodeId u, NodeId v) {
        for (auto& c : copies_) c->delete_edge(u, v);
    }

    double query(NodeId u, NodeId v) const {
        if (u == v) return 0.0;
        double best = kInf;
        for (const auto& c : copies_) best = std::min(best, c->tree().distance(u, v));
        return best;
    }

    std::vector<double> per_copy(NodeId u, NodeId v) const {
        std::vector<double> out;
        for (const auto& c : copies_) out.push_back(c->tree().distance(u, v));
        return out;
    }

  private:
    std::vector<std::unique_ptr<DoublingEmbedder>> copies_;
};

}  // namespace dyntree

#endif
