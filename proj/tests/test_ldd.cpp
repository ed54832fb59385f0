#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <dyntree/graph.hpp>
#include <dyntree/ldd.hpp>
#include <dyntree/rng.hpp>

#include "helpers.hpp"

using namespace dyntree;

namespace {

DynGraph cycle(int n) {
    DynGraph g(n);
    for (NodeId v = 0; v < n; ++v) g.insert_edge(v, (v + 1) % n, 1.0);
    return g;
}

DynGraph dumbbell8() {
    // Two K4 cliques joined by the bridge (3,4).
    DynGraph g(8);
    for (NodeId u = 0; u < 4; ++u)
        for (NodeId v = u + 1; v < 4; ++v) g.insert_edge(u, v, 1.0);
    for (NodeId u = 4; u < 8; ++u)
        for (NodeId v = u + 1; v < 8; ++v) g.insert_edge(u, v, 1.0);
    g.insert_edge(3, 4, 1.0);
    return g;
}

}  // namespace

TEST_CASE("parameter formulas p and rho") {
    // 4 initial edges: p = beta / (2 + log2 4).
    DynGraph g(5);
    g.insert_edge(0, 1, 1.0);
    g.insert_edge(1, 2, 1.0);
    g.insert_edge(2, 3, 1.0);
    g.insert_edge(3, 4, 1.0);
    LddState st(g, 0.1, 1.0, RngStream(1, "p"));
    CHECK(st.p() == doctest::Approx(0.025));

    DynGraph g16(16);
    for (NodeId v = 0; v < 15; ++v) g16.insert_edge(v, v + 1, 1.0);
    // Force p = 0.025 via beta = 0.025 * (2 + log2 15).
    double beta = 0.025 * (2.0 + std::log2(15.0));
    LddState st16(g16, beta, 1.0, RngStream(1, "rho"));
    CHECK(st16.p() == doctest::Approx(0.025));
    CHECK(st16.rho() == doctest::Approx(3.0 * 40.0 * std::log(16.0)));  // ~332.71
}

TEST_CASE("parameter validation") {
    DynGraph g(2);
    g.insert_edge(0, 1, 1.0);
    CHECK_THROWS_AS(LddState(g, 0.0, 1.0, RngStream(1, "x")), InvalidParameter);
    CHECK_THROWS_AS(LddState(g, 1.0, 1.0, RngStream(1, "x")), InvalidParameter);
    CHECK_THROWS_AS(LddState(g, 0.1, 0.5, RngStream(1, "x")), InvalidParameter);
    CHECK_THROWS_AS(LddState(DynGraph(0), 0.1, 1.0, RngStream(1, "x")),
                    InvalidParameter);
}

TEST_CASE("single node and edgeless graphs come up as singletons") {
    DynGraph one(1);
    LddState st(one, 0.1, 1.0, RngStream(2, "one"));
    CHECK(st.cluster_ids().size() == 1);
    CHECK(st.cluster_center(st.cluster_of(0)) == 0);
    st.check_invariants();

    DynGraph edgeless(5);
    LddState se(edgeless, 0.1, 1.0, RngStream(2, "edgeless"));
    CHECK(se.cluster_ids().size() == 5);
    se.check_invariants();
}

TEST_CASE("singleton mode cuts every edge") {
    DynGraph g = cycle(6);
    LddState st = LddState::singletons(g, RngStream(3, "singl"));
    CHECK(st.singleton_mode());
    CHECK(st.cluster_ids().size() == 6);
    CHECK(st.inter_cluster_edges().size() == g.edge_count());
    st.check_invariants();
    // One split event per node was emitted for downstream consumers.
    CHECK(st.events().size() == 6);
}

TEST_CASE("small-diameter graph stays one cluster; intra deletions keep it") {
    DynGraph g = cycle(8);
    LddState st(g, 0.1, 2.0, RngStream(4, "c8"));
    CHECK(st.cluster_ids().size() == 1);
    st.check_invariants();
    st.delete_edge(EdgeKey(0, 1));  // still a connected path, diameter << 6 rho
    CHECK(st.cluster_ids().size() == 1);
    st.check_invariants();
}

TEST_CASE("disconnection forces a split: dumbbell bridge") {
    DynGraph g = dumbbell8();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LddState st(g, 0.1, 2.0, RngStream(seed, "bridge"));
        st.delete_edge(EdgeKey(3, 4));
        st.check_invariants();
        CHECK(st.cluster_of(0) != st.cluster_of(7));
        for (NodeId v : {1, 2, 3}) CHECK(st.cluster_of(v) == st.cluster_of(0));
        for (NodeId v : {4, 5, 6}) CHECK(st.cluster_of(v) == st.cluster_of(7));
    }
}

TEST_CASE("full deletion ends in all singletons with monotone cluster ids") {
    RngStream rng(5, "full-del");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        int n = 12;
        DynGraph g = testutil::random_connected(n, 20, 4.0, rng);
        LddState st(g, 0.1, 2.0, RngStream(seed, "fd"));
        std::vector<ClusterId> last(static_cast<std::size_t>(n));
        for (NodeId v = 0; v < n; ++v) last[static_cast<std::size_t>(v)] = st.cluster_of(v);
        for (const EdgeKey& e : testutil::shuffled_edges(g, rng)) {
            st.delete_edge(e);
            st.check_invariants();
            for (NodeId v = 0; v < n; ++v) {
                ClusterId now = st.cluster_of(v);
                // Refinement only: a node moves to strictly fresher clusters.
                CHECK(now >= last[static_cast<std::size_t>(v)]);
                last[static_cast<std::size_t>(v)] = now;
            }
        }
        CHECK(st.cluster_ids().size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("event log is consistent with the final partition") {
    RngStream rng(6, "events");
    DynGraph g = testutil::random_connected(10, 16, 2.0, rng);
    LddState st(g, 0.1, 2.0, RngStream(9, "ev"));
    for (const EdgeKey& e : testutil::shuffled_edges(g, rng)) st.delete_edge(e);
    // Replay the split events: the last cluster that claimed each node must
    // be its current one.
    std::map<NodeId, ClusterId> claimed;
    for (const LddEvent& ev : st.events())
        if (const auto* s = std::get_if<SplitEvent>(&ev))
            for (NodeId v : s->child_nodes) claimed[v] = s->child;
    for (NodeId v = 0; v < 10; ++v)
        if (claimed.count(v)) CHECK(claimed[v] == st.cluster_of(v));
}

TEST_CASE("recenter count stays within a generous a log n budget") {
    RngStream rng(7, "rec");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        int n = 16;
        DynGraph g = testutil::random_connected(n, 28, 2.0, rng);
        LddState st(g, 0.2, 2.0, RngStream(seed, "rc"));
        for (const EdgeKey& e : testutil::shuffled_edges(g, rng)) st.delete_edge(e);
        long recenters = 0;
        for (const LddEvent& ev : st.events())
            if (std::holds_alternative<RecenterEvent>(ev)) ++recenters;
        CHECK(static_cast<double>(recenters) <=
              50.0 * 2.0 * std::log(static_cast<double>(n)) *
                  static_cast<double>(st.cluster_ids().size()));
    }
}

TEST_CASE("cluster changes per node stay logarithmic-ish") {
    RngStream rng(8, "cc");
    int n = 32;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DynGraph g = testutil::random_connected(n, 64, 2.0, rng);
        LddState st(g, 0.1, 2.0, RngStream(seed, "cc"));
        for (const EdgeKey& e : testutil::shuffled_edges(g, rng)) st.delete_edge(e);
        for (NodeId v = 0; v < n; ++v)
            CHECK(static_cast<double>(st.cluster_changes()[v]) <=
                  16.0 * std::log2(static_cast<double>(n)));
    }
}

TEST_CASE("cut probability on an undeleted C_8 under the beta bound") {
    DynGraph g = cycle(8);
    const int seeds = 2000;
    const double beta = 0.2;
    std::map<EdgeKey, long> cut;
    for (std::uint64_t s = 0; s < seeds; ++s) {
        LddState st(g, beta, 2.0, RngStream(s, "cutprob"));
        for (const EdgeKey& e : g.edges())
            if (st.cluster_of(e.u) != st.cluster_of(e.v)) ++cut[e];
    }
    for (const EdgeKey& e : g.edges()) {
        double freq = static_cast<double>(cut[e]) / seeds;
        CHECK(freq <= beta + 3.0 * std::sqrt(beta / seeds));
    }
}
