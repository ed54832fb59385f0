#include <doctest.h>

#include <cmath>
#include <vector>

#include <dyntree/embed_full.hpp>
#include <dyntree/graph.hpp>
#include <dyntree/rng.hpp>

#include "helpers.hpp"

using namespace dyntree;

namespace {

void check_domination(const TreeEmbedder& emb) {
    const DynGraph& g = emb.graph();
    for (NodeId u = 0; u < g.node_count(); ++u) {
        auto d = g.sssp_exact(u);
        for (NodeId v = u + 1; v < g.node_count(); ++v)
            if (d[v] < kInf) CHECK(emb.tree().distance(u, v) + 1e-9 >= d[v]);
    }
}

}  // namespace

TEST_CASE("base case rebuilds a static embedding per update") {
    FrtRebuildEmbedder emb(4, 16.0, RngStream(1, "base"));
    CHECK(emb.tree().leaves().size() == 4);  // isolated universe leaves
    emb.insert_edge(0, 1, 2.0);
    CHECK(emb.rebuilds() == 2);  // construction + one insert
    CHECK(emb.tree().distance(0, 1) >= 2.0);
    emb.delete_edge(0, 1);
    CHECK(emb.tree().distance(0, 1) == kInf);
    emb.tree().check_wellformed();
}

TEST_CASE("bootstrap rejects depth < 2 and bad a") {
    CHECK_THROWS_AS(BootstrapEmbedder(1, 4, 16.0, 2.0, 8, RngStream(1, "x")),
                    InvalidParameter);
    CHECK_THROWS_AS(BootstrapEmbedder(2, 4, 16.0, 0.5, 8, RngStream(1, "x")),
                    InvalidParameter);
}

TEST_CASE("phase length follows k = ceil(m^(1-1/depth))") {
    BootstrapEmbedder b2(2, 4, 16.0, 2.0, 16, RngStream(1, "k"));
    CHECK(b2.k() == 4);
    BootstrapEmbedder b3(3, 4, 16.0, 2.0, 27, RngStream(1, "k"));
    CHECK(b3.k() == 9);
}

TEST_CASE("pre-phase output equals the depth-1 output, same seed") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        BootstrapEmbedder boot(2, 6, 16.0, 2.0, 100000, RngStream(s, "pp"));
        FrtRebuildEmbedder ref(6, 16.0,
                               RngStream(s, "pp").derive("phase=0/inner").derive("frt"));
        auto step = [&](auto&& f) {
            f(boot);
            f(ref);
            CHECK(!boot.phase_mode());
            for (NodeId u = 0; u < 6; ++u)
                for (NodeId v = u + 1; v < 6; ++v)
                    CHECK(boot.tree().distance(u, v) == ref.tree().distance(u, v));
        };
        step([](TreeEmbedder& e) { e.insert_edge(0, 1, 2.0); });
        step([](TreeEmbedder& e) { e.insert_edge(1, 2, 1.0); });
        step([](TreeEmbedder& e) { e.insert_edge(3, 4, 5.0); });
        step([](TreeEmbedder& e) { e.delete_edge(0, 1); });
    }
}

TEST_CASE("auxiliary graph bookkeeping over one insertion and its inverse") {
    // m_bound 4, depth 2 -> k = 2: two warm-up inserts flip to phase mode.
    BootstrapEmbedder emb(2, 8, 16.0, 2.0, 4, RngStream(3, "aux"));
    emb.insert_edge(0, 1, 1.0);
    emb.insert_edge(1, 2, 2.0);
    REQUIRE(emb.phase_mode());
    CHECK(emb.phase() == 1);
    CHECK(emb.phase_updates() == 0);
    emb.check_invariants();
    CHECK(emb.aux_graph().edge_count() == 0);  // no inserts yet this phase

    emb.insert_edge(3, 4, 8.0);
    emb.check_invariants();
    CHECK(emb.inserted_edges().count(EdgeKey(3, 4)) == 1);
    CHECK(emb.aux_graph().has_edge(emb.aux_graph_id(3), emb.aux_graph_id(4)));
    // H = the edge plus the two endpoints' root paths.
    std::size_t ha = emb.decremental().forest().height();
    CHECK(emb.aux_nodes().size() <= 2 * (ha + 1));
    CHECK(emb.endpoint_counts().at(3) == 1);
    CHECK(emb.endpoint_counts().at(4) == 1);
    CHECK(!emb.stored_path(3).empty());

    emb.delete_edge(3, 4);  // exact inverse: H drains completely
    emb.check_invariants();
    CHECK(emb.aux_graph().edge_count() == 0);
    CHECK(emb.path_edges().empty());
    CHECK(emb.endpoint_counts().empty());
    CHECK(emb.inserted_edges().empty());
}

TEST_CASE("insert-free phase: composed tree equals the decremental tree") {
    RngStream gen(4, "gen");
    DynGraph g = testutil::random_connected(8, 6, 8.0, gen);  // spanning-ish
    std::vector<EdgeKey> edges = g.edges();
    std::size_t m = edges.size();
    // Choose m_bound so the phase flips exactly after the inserts: k = m.
    std::size_t m_bound = m * m;
    for (std::uint64_t s = 0; s < 5; ++s) {
        BootstrapEmbedder emb(2, 8, 8.0, 2.0, m_bound, RngStream(s, "if"));
        CHECK(emb.k() == m);
        for (const EdgeKey& e : edges) emb.insert_edge(e.u, e.v, g.weight(e.u, e.v));
        REQUIRE(emb.phase_mode());
        for (const EdgeKey& e : edges) {
            emb.delete_edge(e.u, e.v);
            emb.check_invariants();
            CHECK(emb.path_edges().empty());
            for (NodeId u = 0; u < 8; ++u)
                for (NodeId v = u + 1; v < 8; ++v)
                    CHECK(emb.tree().distance(u, v) ==
                          emb.decremental().tree_distance(u, v));
        }
    }
}

TEST_CASE("composed height never exceeds the two stacked heights") {
    RngStream gen(5, "gen");
    for (std::uint64_t s = 0; s < 4; ++s) {
        BootstrapEmbedder emb(2, 8, 8.0, 2.0, 4, RngStream(s, "hh"));
        DynGraph script = testutil::random_connected(8, 14, 8.0, gen);
        for (const EdgeKey& e : script.edges())
            emb.insert_edge(e.u, e.v, script.weight(e.u, e.v));
        auto edges = testutil::shuffled_edges(script, gen);
        for (std::size_t j = 0; j < edges.size() / 2; ++j)
            emb.delete_edge(edges[j].u, edges[j].v);
        if (emb.phase_mode()) {
            emb.check_invariants();
            std::size_t ha = emb.decremental().forest().height();
            std::size_t hb = emb.inner().tree().height();
            CHECK(emb.tree().height() <= ha + hb);
        }
    }
}

TEST_CASE("random mixed updates keep invariants and domination, depths 2 and 3") {
    for (int depth : {2, 3}) {
        for (std::uint64_t s = 0; s < 3; ++s) {
            BootstrapEmbedder emb(depth, 8, 8.0, 2.0, 4, RngStream(s, "mix"));
            RngStream drive(s, "mix-script");
            std::vector<EdgeKey> live;
            for (int step = 0; step < 60; ++step) {
                bool ins = live.empty() || drive.uniform01() < 0.6;
                if (ins) {
                    NodeId u = static_cast<NodeId>(drive.below(8));
                    NodeId v = static_cast<NodeId>(drive.below(8));
                    if (u == v || emb.graph().has_edge(u, v)) continue;
                    double w = 1.0 + static_cast<double>(drive.below(8));
                    emb.insert_edge(u, v, w);
                    live.emplace_back(u, v);
                } else {
                    std::size_t j = drive.below(live.size());
                    emb.delete_edge(live[j].u, live[j].v);
                    live.erase(live.begin() + static_cast<long>(j));
                }
                emb.check_invariants();
                check_domination(emb);
            }
        }
    }
}

TEST_CASE("doubling wrapper: threshold, replay equality, restart budget") {
    DoublingEmbedder emb(1, 8, 16.0, 2.0, 4, RngStream(7, "dbl"));
    CHECK(emb.m_bound() == 4);
    emb.insert_edge(0, 1, 1.0);
    emb.insert_edge(1, 2, 1.0);
    emb.insert_edge(2, 3, 1.0);
    emb.insert_edge(3, 4, 1.0);
    CHECK(emb.m_bound() == 4);
    CHECK(emb.restarts() == 0);
    emb.insert_edge(4, 5, 2.0);  // fifth concurrent edge: double to 8
    CHECK(emb.m_bound() == 8);
    CHECK(emb.restarts() == 1);
    CHECK(emb.graph().edge_count() == 5);
    CHECK(emb.graph().weight(4, 5) == 2.0);
    for (NodeId v = 5; v < 8; ++v)
        for (NodeId u = 0; u < v; ++u)
            if (!emb.graph().has_edge(u, v)) emb.insert_edge(u, v, 1.0);
    std::size_t max_edges = emb.graph().edge_count();
    CHECK(static_cast<double>(emb.restarts()) <=
          std::log2(static_cast<double>(max_edges)) + 1.0);
    check_domination(emb);
}

TEST_CASE("factory and depth preset") {
    auto base = make_full_embedder(1, 4, 16.0, 2.0, 4, RngStream(1, "f"));
    CHECK(dynamic_cast<FrtRebuildEmbedder*>(base.get()) != nullptr);
    auto boot = make_full_embedder(2, 4, 16.0, 2.0, 4, RngStream(1, "f"));
    CHECK(dynamic_cast<BootstrapEmbedder*>(boot.get()) != nullptr);
    CHECK(auto_depth(2, 1.0) >= 1);
    CHECK(auto_depth(1 << 20, 16.0) >= 2);
}
