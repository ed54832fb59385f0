#ifndef DYNTREE_HARNESS_HPP
#define DYNTREE_HARNESS_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "buyatbulk.hpp"
#include "common.hpp"
#include "embed_decr.hpp"
#include "embed_full.hpp"
#include "graph.hpp"
#include "ldd.hpp"
#include "oracle.hpp"
#include "trace.hpp"

namespace dyntree {

enum class Stack { Ldd, Decr, Full, Oracle, Bab };

inline Stack parse_stack(const std::string& s) {
    if (s == "ldd") return Stack::Ldd;
    if (s == "decr") return Stack::Decr;
    if (s == "full") return Stack::Full;
    if (s == "oracle") return Stack::Oracle;
    if (s == "bab") return Stack::Bab;
    throw InvalidParameter("unknown stack \"" + s + "\"");
}

inline std::string stack_name(Stack s) {
    switch (s) {
        case Stack::Ldd: return "ldd";
        case Stack::Decr: return "decr";
        case Stack::Full: return "full";
        case Stack::Oracle: return "oracle";
        case Stack::Bab: return "bab";
    }
    return "?";
}

struct Config {
    Stack stack = Stack::Decr;
    double beta = 0.1;        // ldd stack only
    double a = 2.0;
    int depth = 2;            // full / oracle / bab stacks
    int copies = 0;           // oracle; 0 = ceil(a log2 n)
    std::uint64_t seed = 1;
    bool check = true;        // run hard assertions at observe points
    int exact_limit = 256;    // skip exact-oracle comparisons above this n
};

/// Mergeable sum/count statistics; the Monte Carlo reducer combines worker
/// accumulators associatively in a fixed order, so reports are bit-stable.
struct Accum {
    std::map<std::string, double> sums;
    std::map<std::string, long> counts;

    void add(const std::string& key, double x) {
        sums[key] += x;
        ++counts[key];
    }

    void merge(const Accum& o) {
        for (const auto& [k, s] : o.sums) sums[k] += s;
        for (const auto& [k, c] : o.counts) counts[k] += c;
    }

    nlohmann::json to_json() const {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [k, c] : counts) {
            double s = sums.at(k);
            out[k] = {{"count", c}, {"sum", s}, {"mean", c ? s / c : 0.0}};
        }
        return out;
    }
};

inline std::vector<std::vector<double>> oracle_apsp(const DynGraph& g) {
    std::vector<std::vector<double>> d;
    d.reserve(static_cast<std::size_t>(g.node_count()));
    for (NodeId v = 0; v < g.node_count(); ++v) d.push_back(g.sssp_exact(v));
    return d;
}

namespace detail {

inline std::string edge_tag(const EdgeKey& e) {
    return std::to_string(e.u) + "-" + std::to_string(e.v);
}

class ReplayRunner {
  public:
    ReplayRunner(const Trace& t, const Config& cfg, Accum& acc)
        : t_(t), cfg_(cfg), acc_(acc), g_(t.n, t.w) {
        switch (cfg_.stack) {
            case Stack::Ldd:
            case Stack::Decr:
                break;  // decremental structures built at first non-insert op
            case Stack::Full:
            case Stack::Bab:
                emb_ = std::make_unique<DoublingEmbedder>(
                    cfg_.depth, t_.n, t_.w, cfg_.a, 4, RngStream(cfg_.seed, "full"));
                break;
            case Stack::Oracle:
                oracle_ = std::make_unique<DistanceOracle>(
                    t_.n, t_.w, cfg_.depth, cfg_.a, RngStream(cfg_.seed, "oracle"),
                    cfg_.copies);
                break;
        }
    }

    nlohmann::json run() {
        nlohmann::json queries = nlohmann::json::array();
        nlohmann::json observes = nlohmann::json::array();
        std::size_t op_index = 0;
        try {
            for (const TraceOp& op : t_.ops) {
                if (const auto* i = std::get_if<OpInsert>(&op)) {
                    apply_insert(i->u, i->v, i->w);
                } else if (const auto* d = std::get_if<OpDelete>(&op)) {
                    apply_delete(d->u, d->v);
                } else if (const auto* q = std::get_if<OpQueryDist>(&op)) {
                    if (cfg_.stack == Stack::Ldd) {
                        // Cluster decompositions answer no distance queries;
                        // shared traces stay usable across stacks.
                        acc_.add("q_skipped", 1.0);
                    } else {
                        double ans = query(q->u, q->v);
                        acc_.add("q/" + std::to_string(query_index_), ans);
                        queries.push_back({{"op", op_index},
                                           {"u", q->u},
                                           {"v", q->v},
                                           {"value", ans}});
                    }
                    ++query_index_;
                } else if (const auto* b = std::get_if<OpQueryBab>(&op)) {
                    if (cfg_.stack == Stack::Ldd || cfg_.stack == Stack::Oracle) {
                        acc_.add("b_skipped", 1.0);
                    } else {
                        double ans = bab(*b);
                        acc_.add("b/" + std::to_string(query_index_), ans);
                        queries.push_back({{"op", op_index}, {"bab", ans}});
                    }
                    ++query_index_;
                } else if (const auto* o = std::get_if<OpObserve>(&op)) {
                    observes.push_back(observe(o->tag));
                }
                ++op_index;
            }
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << e.what() << " [stack=" << stack_name(cfg_.stack)
               << " seed=" << cfg_.seed << " op=" << op_index << "/" << t_.ops.size()
               << "]";
            throw InvariantViolation(os.str());
        }
        nlohmann::json rep;
        rep["schema"] = 1;
        rep["mode"] = "replay";
        rep["stack"] = stack_name(cfg_.stack);
        rep["seed"] = cfg_.seed;
        rep["n"] = t_.n;
        rep["W"] = t_.w;
        rep["queries"] = std::move(queries);
        rep["observes"] = std::move(observes);
        return rep;
    }

  private:
    void build_decremental() {
        if (cfg_.stack == Stack::Ldd && !ldd_) {
            ldd_ = std::make_unique<LddState>(g_, cfg_.beta, cfg_.a,
                                              RngStream(cfg_.seed, "ldd"));
        } else if (cfg_.stack == Stack::Decr && !hier_) {
            hier_ = std::make_unique<Hierarchy>(g_, cfg_.a, RngStream(cfg_.seed, "decr"));
        }
        if (cfg_.stack == Stack::Ldd || cfg_.stack == Stack::Decr) frozen_ = true;
    }

    void apply_insert(NodeId u, NodeId v, double w) {
        if (frozen_)
            throw InvalidParameter("decremental stack cannot insert after first query");
        g_.insert_edge(u, v, w);
        if (emb_) emb_->insert_edge(u, v, w);
        if (oracle_) oracle_->insert_edge(u, v, w);
    }

    void apply_delete(NodeId u, NodeId v) {
        build_decremental();
        g_.delete_edge(u, v);
        if (ldd_) ldd_->delete_edge(EdgeKey(u, v));
        if (hier_) hier_->delete_edge(u, v);
        if (emb_) emb_->delete_edge(u, v);
        if (oracle_) oracle_->delete_edge(u, v);
    }

    double query(NodeId u, NodeId v) {
        build_decremental();
        switch (cfg_.stack) {
            case Stack::Ldd:
                throw InvalidParameter("ldd stack answers no distance queries");
            case Stack::Decr:
                return hier_->tree_distance(u, v);
            case Stack::Full:
            case Stack::Bab:
                return emb_->tree().distance(u, v);
            case Stack::Oracle:
                return oracle_->query(u, v);
        }
        return kInf;
    }

    double bab(const OpQueryBab& op) {
        build_decremental();
        PriceFn f = PriceFn::parse(op.fn);
        const EmbedForest* t = nullptr;
        if (emb_) t = &emb_->tree();
        else if (hier_) t = &hier_->forest();
        else throw InvalidParameter("bab query needs the full or decr stack");
        return bab_query(*t, op.demands, f);
    }

    nlohmann::json observe(const std::string& tag) {
        build_decremental();
        nlohmann::json snap;
        snap["tag"] = tag;
        snap["edges"] = g_.edge_count();
        std::optional<std::vector<std::vector<double>>> apsp;
        if (g_.node_count() <= cfg_.exact_limit) apsp = oracle_apsp(g_);

        if (ldd_) {
            if (cfg_.check) ldd_->check_invariants();
            long splits = 0, recenters = 0;
            for (const LddEvent& ev : ldd_->events())
                std::holds_alternative<SplitEvent>(ev) ? ++splits : ++recenters;
            snap["clusters"] = ldd_->cluster_ids().size();
            snap["splits"] = splits;
            snap["recenters"] = recenters;
            for (const EdgeKey& e : g_.edges()) {
                bool cut = ldd_->cluster_of(e.u) != ldd_->cluster_of(e.v);
                acc_.add("cut/" + tag + "/" + edge_tag(e), cut ? 1.0 : 0.0);
            }
        }
        const EmbedForest* tree = nullptr;
        if (hier_) {
            if (cfg_.check) hier_->check_invariants();
            tree = &hier_->forest();
            snap["height"] = tree->height();
            snap["changes_total"] = hier_->total_changes();
        }
        if (emb_) {
            tree = &emb_->tree();
            snap["height"] = tree->height();
            snap["m_bound"] = emb_->m_bound();
            snap["restarts"] = emb_->restarts();
            if (const auto* b = dynamic_cast<const BootstrapEmbedder*>(&emb_->wrapped())) {
                if (cfg_.check) b->check_invariants();
                snap["phase"] = b->phase();
                snap["h_updates"] = b->h_updates();
                snap["path_swaps"] = b->path_swaps();
            }
        }
        if (tree && apsp) {
            if (cfg_.check) check_domination(*tree, *apsp);
            for (const EdgeKey& e : g_.edges()) {
                double dg = (*apsp)[e.u][e.v];
                if (dg <= 0.0 || dg >= kInf) continue;
                acc_.add("stretch/" + tag + "/" + edge_tag(e),
                         tree->distance(e.u, e.v) / dg);
            }
        }
        if (oracle_ && apsp && cfg_.check) {
            for (NodeId u = 0; u < g_.node_count(); ++u)
                for (NodeId v = u + 1; v < g_.node_count(); ++v) {
                    double ans = oracle_->query(u, v);
                    double dg = (*apsp)[u][v];
                    if (dg < kInf)
                        require(ans + 1e-9 >= dg, "oracle answer undercuts the distance");
                    auto per = oracle_->per_copy(u, v);
                    double mn = kInf;
                    for (double x : per) mn = std::min(mn, x);
                    require(ans == mn, "oracle answer is not the per-copy minimum");
                }
        }
        return snap;
    }

    void check_domination(const EmbedForest& tree,
                          const std::vector<std::vector<double>>& apsp) const {
        for (NodeId u = 0; u < g_.node_count(); ++u)
            for (NodeId v = u + 1; v < g_.node_count(); ++v) {
                double dg = apsp[u][v];
                if (dg >= kInf) continue;
                require(tree.distance(u, v) + 1e-9 >= dg,
                        "tree distance undercuts the graph distance");
            }
    }

    const Trace& t_;
    Config cfg_;
    Accum& acc_;
    DynGraph g_;
    bool frozen_ = false;
    long query_index_ = 0;
    std::unique_ptr<LddState> ldd_;
    std::unique_ptr<Hierarchy> hier_;
    std::unique_ptr<DoublingEmbedder> emb_;
    std::unique_ptr<DistanceOracle> oracle_;
};

}  // namespace detail

inline nlohmann::json replay(const Trace& t, const Config& cfg) {
    Accum acc;
    detail::ReplayRunner runner(t, cfg, acc);
    nlohmann::json rep = runner.run();
    rep["stats"] = acc.to_json();
    return rep;
}

inline void replay_collect(const Trace& t, const Config& cfg, Accum& acc) {
    detail::ReplayRunner runner(t, cfg, acc);
    runner.run();
}

/// Seeds run in fixed blocks; workers own whole-stack instances and the
/// reducer merges block accumulators in block order, independent of thread
/// scheduling.
inline nlohmann::json montecarlo(const Trace& t, int seeds, const Config& cfg,
                                 int workers = 0) {
    if (seeds < 1) throw InvalidParameter("montecarlo: seeds < 1");
    const int block_size = 16;
    int blocks = (seeds + block_size - 1) / block_size;
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, blocks);

    std::vector<Accum> block_acc(static_cast<std::size_t>(blocks));
    std::vector<std::string> block_err(static_cast<std::size_t>(blocks));
    std::vector<std::thread> pool;
    std::vector<int> next_block{0};
    std::mutex mu;
    auto work = [&]() {
        while (true) {
            int b;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next_block[0] >= blocks) return;
                b = next_block[0]++;
            }
            std::uint64_t lo = cfg.seed + static_cast<std::uint64_t>(b) * block_size;
            std::uint64_t hi = std::min<std::uint64_t>(lo + block_size, cfg.seed + seeds);
            for (std::uint64_t s = lo; s < hi; ++s) {
                Config c = cfg;
                c.seed = s;
                try {
                    replay_collect(t, c, block_acc[static_cast<std::size_t>(b)]);
                } catch (const std::exception& e) {
                    block_err[static_cast<std::size_t>(b)] = e.what();
                    return;
                }
            }
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    for (const std::string& err : block_err)
        if (!err.empty()) throw InvariantViolation(err);

    Accum total;
    for (const Accum& a : block_acc) total.merge(a);
    nlohmann::json rep;
    rep["schema"] = 1;
    rep["mode"] = "mc";
    rep["stack"] = stack_name(cfg.stack);
    rep["seeds"] = seeds;
    rep["seed0"] = cfg.seed;
    rep["n"] = t.n;
    rep["W"] = t.w;
    rep["stats"] = total.to_json();
    return rep;
}

}  // namespace dyntree

#endif
