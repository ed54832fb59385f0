#ifndef DYNTREE_TRACE_HPP
#define DYNTREE_TRACE_HPP

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "buyatbulk.hpp"
#include "common.hpp"
#include "rng.hpp"

namespace dyntree {

struct OpInsert {
    NodeId u, v;
    double w;
};
struct OpDelete {
    NodeId u, v;
};
struct OpQueryDist {
    NodeId u, v;
};
struct OpQueryBab {
    std::vector<Demand> demands;
    std::string fn;
};
struct OpObserve {
    std::string tag;
};

using TraceOp = std::variant<OpInsert, OpDelete, OpQueryDist, OpQueryBab, OpObserve>;

/// Plain-text update/query script. One op per line:
///   n <n> <W>                      header, required first
///   i <u> <v> <w>                  insert
///   d <u> <v>                      delete
///   q <u> <v>                      distance query
///   b <k> <s t dem>{k} <fn>        buy-at-bulk query
///   o <tag>                        statistics snapshot point
/// Blank lines and '#' comments are ignored.
struct Trace {
    int n = 0;
    double w = 1.0;
    std::vector<TraceOp> ops;
};

inline Trace parse_trace(std::istream& in) {
    Trace t;
    bool have_header = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw TraceFormatError(lineno, why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (!have_header) {
            if (kind != "n") fail("expected 'n <n> <W>' header");
            if (!(ls >> t.n >> t.w) || t.n < 1 || t.w < 1.0) fail("bad header");
            have_header = true;
            continue;
        }
        if (kind == "i") {
            OpInsert op{};
            if (!(ls >> op.u >> op.v >> op.w)) fail("bad insert");
            t.ops.emplace_back(op);
        } else if (kind == "d") {
            OpDelete op{};
            if (!(ls >> op.u >> op.v)) fail("bad delete");
            t.ops.emplace_back(op);
        } else if (kind == "q") {
            OpQueryDist op{};
            if (!(ls >> op.u >> op.v)) fail("bad query");
            t.ops.emplace_back(op);
        } else if (kind == "b") {
            int k = 0;
            if (!(ls >> k) || k < 0) fail("bad demand count");
            OpQueryBab op;
            for (int j = 0; j < k; ++j) {
                NodeId s, d;
                double dem;
                if (!(ls >> s >> d >> dem)) fail("bad demand triple");
                try {
                    op.demands.emplace_back(s, d, dem);
                } catch (const InvalidParameter& e) {
                    fail(e.what());
                }
            }
            if (!(ls >> op.fn)) fail("missing price function");
            try {
                PriceFn::parse(op.fn);
            } catch (const InvalidParameter& e) {
                fail(e.what());
            }
            t.ops.emplace_back(std::move(op));
        } else if (kind == "o") {
            OpObserve op;
            if (!(ls >> op.tag)) fail("missing observe tag");
            t.ops.emplace_back(std::move(op));
        } else {
            fail("unknown op '" + kind + "'");
        }
    }
    if (!have_header) throw TraceFormatError(0, "empty trace (no header)");
    return t;
}

inline Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceFormatError(0, "cannot open trace file " + path);
    return parse_trace(in);
}

inline std::string format_trace(const Trace& t) {
    std::ostringstream os;
    os << "n " << t.n << " " << t.w << "\n";
    for (const TraceOp& op : t.ops) {
        if (const auto* i = std::get_if<OpInsert>(&op))
            os << "i " << i->u << " " << i->v << " " << i->w << "\n";
        else if (const auto* d = std::get_if<OpDelete>(&op))
            os << "d " << d->u << " " << d->v << "\n";
        else if (const auto* q = std::get_if<OpQueryDist>(&op))
            os << "q " << q->u << " " << q->v << "\n";
        else if (const auto* b = std::get_if<OpQueryBab>(&op)) {
            os << "b " << b->demands.size();
            for (const Demand& dd : b->demands)
                os << " " << dd.s << " " << dd.t << " " << dd.dem;
            os << " " << b->fn << "\n";
        } else if (const auto* o = std::get_if<OpObserve>(&op))
            os << "o " << o->tag << "\n";
    }
    return os.str();
}

/// Random trace families for the harness. Updates are fixed before any
/// algorithm seed is drawn, which keeps the adversary oblivious.
inline Trace gen_trace(const std::string& family, int n, int m, double w,
                       std::uint64_t seed) {
    if (n < 2) throw InvalidParameter("gen: n < 2");
    if (w < 1.0) throw InvalidParameter("gen: W < 1");
    RngStream rng(seed, "gen/" + family);
    Trace t;
    t.n = n;
    t.w = w;
    auto rand_weight = [&]() {
        return 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(w)));
    };
    auto observe = [&](int idx) {
        t.ops.emplace_back(OpObserve{"t" + std::to_string(idx)});
    };
    auto queries = [&](int count) {
        for (int j = 0; j < count; ++j) {
            NodeId u = static_cast<NodeId>(rng.below(n));
            NodeId v = static_cast<NodeId>(rng.below(n));
            if (u != v) t.ops.emplace_back(OpQueryDist{u, v});
        }
    };

    if (family == "rand-decr") {
        // Random spanning tree plus extra edges, then full deletion.
        std::vector<std::pair<EdgeKey, double>> edges;
        std::vector<NodeId> joined{0};
        for (NodeId v = 1; v < n; ++v) {
            NodeId u = joined[rng.below(joined.size())];
            edges.push_back({EdgeKey(u, v), rand_weight()});
            joined.push_back(v);
        }
        while (static_cast<int>(edges.size()) < m) {
            NodeId u = static_cast<NodeId>(rng.below(n));
            NodeId v = static_cast<NodeId>(rng.below(n));
            if (u == v) continue;
            EdgeKey e(u, v);
            bool dup = false;
            for (const auto& [k, wt] : edges) dup = dup || k == e;
            if (!dup) edges.push_back({e, rand_weight()});
        }
        for (const auto& [e, wt] : edges) t.ops.emplace_back(OpInsert{e.u, e.v, wt});
        observe(0);
        queries(4);
        std::vector<std::size_t> order(edges.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        for (std::size_t j = order.size(); j > 1; --j)
            std::swap(order[j - 1], order[rng.below(j)]);
        std::size_t chunk = std::max<std::size_t>(1, order.size() / 4);
        int snap = 0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            const EdgeKey& e = edges[order[j]].first;
            t.ops.emplace_back(OpDelete{e.u, e.v});
            if ((j + 1) % chunk == 0 || j + 1 == order.size()) {
                observe(++snap);
                queries(2);
            }
        }
        return t;
    }

    if (family == "rand-full") {
        std::vector<std::pair<EdgeKey, double>> live;
        int steps = std::max(2 * m, 16);
        int obs_every = std::max(1, steps / 6);
        for (int s = 0; s < steps; ++s) {
            bool ins = live.empty() ||
                       (static_cast<int>(live.size()) < m && rng.uniform01() < 0.55);
            if (ins) {
                NodeId u = static_cast<NodeId>(rng.below(n));
                NodeId v = static_cast<NodeId>(rng.below(n));
                if (u == v) continue;
                EdgeKey e(u, v);
                bool dup = false;
                for (const auto& [k, wt] : live) dup = dup || k == e;
                if (dup) continue;
                double wt = rand_weight();
                live.push_back({e, wt});
                t.ops.emplace_back(OpInsert{e.u, e.v, wt});
            } else {
                std::size_t j = rng.below(live.size());
                t.ops.emplace_back(OpDelete{live[j].first.u, live[j].first.v});
                live.erase(live.begin() + static_cast<long>(j));
            }
            if ((s + 1) % obs_every == 0) {
                observe((s + 1) / obs_every);
                queries(2);
            }
        }
        return t;
    }

    if (family == "dumbbell") {
        // Two cliques joined by a single bridge; deletions hit the bridge
        // and then thin out one side.
        int half = n / 2;
        if (half < 2) throw InvalidParameter("gen: dumbbell needs n >= 4");
        std::vector<EdgeKey> left, right;
        for (NodeId u = 0; u < half; ++u)
            for (NodeId v = u + 1; v < half; ++v) left.emplace_back(u, v);
        for (NodeId u = half; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) right.emplace_back(u, v);
        for (const EdgeKey& e : left) t.ops.emplace_back(OpInsert{e.u, e.v, 1.0});
        for (const EdgeKey& e : right) t.ops.emplace_back(OpInsert{e.u, e.v, 1.0});
        t.ops.emplace_back(OpInsert{half - 1, half, std::min(w, 2.0)});
        observe(0);
        t.ops.emplace_back(OpQueryDist{0, n - 1});
        t.ops.emplace_back(OpDelete{half - 1, half});
        observe(1);
        t.ops.emplace_back(OpQueryDist{0, n - 1});
        for (std::size_t j = left.size(); j > 1; --j)
            std::swap(left[j - 1], left[rng.below(j)]);
        for (std::size_t j = 0; j + 1 < left.size() && j < left.size() / 2; ++j)
            t.ops.emplace_back(OpDelete{left[j].u, left[j].v});
        observe(2);
        queries(3);
        return t;
    }

    throw InvalidParameter("gen: unknown family \"" + family + "\"");
}

}  // namespace dyntree

#endif
