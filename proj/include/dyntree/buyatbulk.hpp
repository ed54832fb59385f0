#ifndef DYNTREE_BUYATBULK_HPP
#define DYNTREE_BUYATBULK_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "forest.hpp"

namespace dyntree {

struct Demand {
    NodeId s;
    NodeId t;
    double dem;

    Demand(NodeId s_, NodeId t_, double d_) : s(s_), t(t_), dem(d_) {
        if (s == t) throw InvalidParameter("demand: equal endpoints");
        if (!(d_ > 0.0)) throw InvalidParameter("demand: non-positive amount");
    }
};

/// Non-decreasing sub-additive price function with f(0) = 0: edges carrying
/// no demand cost nothing. Both properties are sampled at construction.
class PriceFn {
  public:
    static PriceFn affine(double a, double b) {
        PriceFn f;
        f.pieces_ = {{a, b}};
        f.min_mode_ = false;
        f.spec_ = "affine:" + num(a) + "," + num(b);
        f.validate();
        return f;
    }

    static PriceFn power(double c, double alpha) {
        PriceFn f;
        f.c_ = c;
        f.alpha_ = alpha;
        f.is_power_ = true;
        f.spec_ = "power:" + num(c) + "," + num(alpha);
        f.validate();
        return f;
    }

    static PriceFn min_affine(std::vector<std::pair<double, double>> pieces) {
        if (pieces.empty()) throw InvalidParameter("pricefn: empty min-affine list");
        PriceFn f;
        f.pieces_ = std::move(pieces);
        f.min_mode_ = true;
        std::string s = "minaffine:";
        for (std::size_t j = 0; j < f.pieces_.size(); ++j) {
            if (j) s += ";";
            s += num(f.pieces_[j].first) + "," + num(f.pieces_[j].second);
        }
        f.spec_ = s;
        f.validate();
        return f;
    }

    /// "affine:a,b" | "power:c,alpha" | "minaffine:a1,b1;a2,b2;..."
    static PriceFn parse(const std::string& text) {
        auto colon = text.find(':');
        if (colon == std::string::npos)
            throw InvalidParameter("pricefn: missing ':' in \"" + text + "\"");
        std::string kind = text.substr(0, colon);
        std::string body = text.substr(colon + 1);
        if (kind == "affine") {
            auto v = nums(body, ',');
            if (v.size() != 2) throw InvalidParameter("pricefn: affine wants a,b");
            return affine(v[0], v[1]);
        }
        if (kind == "power") {
            auto v = nums(body, ',');
            if (v.size() != 2) throw InvalidParameter("pricefn: power wants c,alpha");
            return power(v[0], v[1]);
        }
        if (kind == "minaffine") {
            std::vector<std::pair<double, double>> pieces;
            std::stringstream ss(body);
            std::string part;
            while (std::getline(ss, part, ';')) {
                auto v = nums(part, ',');
                if (v.size() != 2) throw InvalidParameter("pricefn: minaffine wants a,b pairs");
                pieces.emplace_back(v[0], v[1]);
            }
            return min_affine(std::move(pieces));
        }
        throw InvalidParameter("pricefn: unknown kind \"" + kind + "\"");
    }

    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        if (is_power_) return c_ * std::pow(x, alpha_);
        double best = kInf;
        for (const auto& [a, b] : pieces_) best = std::min(best, a + b * x);
        return min_mode_ ? best : pieces_.front().first + pieces_.front().second * x;
    }

    const std::string& spec() const { return spec_; }

  private:
    PriceFn() = default;

    void validate() const {
        if (is_power_) {
            if (c_ < 0.0 || alpha_ < 0.0 || alpha_ > 1.0)
                throw InvalidParameter("pricefn: power needs c >= 0, alpha in [0,1]");
        } else {
            for (const auto& [a, b] : pieces_)
                if (a < 0.0 || b < 0.0)
                    throw InvalidParameter("pricefn: negative coefficient");
        }
        const double grid[] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 64.0, 1000.0};
        const PriceFn& f = *this;
        for (double x : grid) {
            for (double y : grid) {
                if (x <= y && f(x) > f(y) + 1e-9)
                    throw InvalidParameter("pricefn: not non-decreasing");
                if (f(x + y) > f(x) + f(y) + 1e-9)
                    throw InvalidParameter("pricefn: not sub-additive");
            }
        }
    }

    static std::string num(double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    }

    static std::vector<double> nums(const std::string& body, char sep) {
        std::vector<double> out;
        std::stringstream ss(body);
        std::string part;
        while (std::getline(ss, part, sep)) {
            try {
                std::size_t used = 0;
                double x = std::stod(part, &used);
                if (used != part.size()) throw std::invalid_argument(part);
                out.push_back(x);
            } catch (const std::exception&) {
                throw InvalidParameter("pricefn: bad number \"" + part + "\"");
            }
        }
        return out;
    }

    std::vector<std::pair<double, double>> pieces_;
    bool min_mode_ = false;
    bool is_power_ = false;
    double c_ = 0.0;
    double alpha_ = 1.0;
    std::string spec_;
};

/// Exact tree optimum sum ell_e * f(c_e): each demand marks +dem at both
/// endpoints and -2dem at their lowest common ancestor, then one bottom-up
/// pass accumulates per-edge carried demand.
inline double tree_opt(const EmbedForest& t, const std::vector<Demand>& demands,
                       const PriceFn& f) {
    if (demands.empty()) return 0.0;
    std::map<TreeNodeId, double> mark;
    for (const Demand& d : demands) {
        if (!t.has_node(d.s) || !t.has_node(d.t))
            throw InvalidParameter("tree_opt: demand endpoint outside tree");
        std::map<TreeNodeId, bool> on_s_path;
        on_s_path[d.s] = true;
        TreeNodeId x = d.s;
        while (t.has_parent(x)) {
            x = t.parent(x).first;
            on_s_path[x] = true;
        }
        TreeNodeId lca = d.t;
        while (!on_s_path.count(lca)) {
            if (!t.has_parent(lca)) throw DisconnectedDemand("tree_opt: demand spans trees");
            lca = t.parent(lca).first;
        }
        mark[d.s] += d.dem;
        mark[d.t] += d.dem;
        mark[lca] -= 2.0 * d.dem;
    }
    // Deepest nodes first; each node pushes its subtree total to its parent.
    std::vector<std::pair<std::size_t, TreeNodeId>> by_depth;
    for (TreeNodeId x : t.nodes()) by_depth.emplace_back(t.root_path(x).size(), x);
    std::sort(by_depth.begin(), by_depth.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::map<TreeNodeId, double> acc;
    double total = 0.0;
    for (const auto& [depth, x] : by_depth) {
        double c = acc[x] + (mark.count(x) ? mark[x] : 0.0);
        if (t.has_parent(x)) {
            auto [p, w] = t.parent(x);
            if (c > 1e-12) total += w * f(c);
            acc[p] += c;
        }
    }
    return total;
}

/// Demand-relevant subtree: the union of the endpoints' root paths.
inline EmbedForest root_path_union(const EmbedForest& t, const std::vector<Demand>& demands) {
    EmbedForest out;
    std::set<TreeNodeId> endpoints;
    for (const Demand& d : demands) {
        endpoints.insert(d.s);
        endpoints.insert(d.t);
    }
    for (TreeNodeId v : endpoints) {
        if (!t.has_node(v)) throw InvalidParameter("bab: endpoint outside tree");
        out.mark_leaf(v);
        for (const RootStep& s : t.root_path(v)) {
            out.add_node(s.node);
            out.add_node(s.parent);
            out.set_parent(s.node, s.parent, s.weight);
        }
    }
    return out;
}

/// Buy-at-bulk estimate on a tree embedding: extract the relevant subtree
/// and price it exactly.
inline double bab_query(const EmbedForest& t, const std::vector<Demand>& demands,
                        const PriceFn& f) {
    if (demands.empty()) return 0.0;
    EmbedForest sub = root_path_union(t, demands);
    return tree_opt(sub, demands, f);
}

}  // namespace dyntree

#endif
