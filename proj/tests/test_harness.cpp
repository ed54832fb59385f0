#include <doctest.h>

#include <sstream>
#include <string>

#include <dyntree/harness.hpp>

#include "helpers.hpp"

using namespace dyntree;

namespace {

Trace parse(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

}  // namespace

TEST_CASE("trace parsing: header, comments, ops") {
    Trace t = parse(
        "# comment\n"
        "n 4 16\n"
        "\n"
        "i 0 1 2.5\n"
        "q 0 1   # trailing comment\n"
        "b 1 0 1 3.5 affine:1,2\n"
        "d 0 1\n"
        "o checkpoint\n");
    CHECK(t.n == 4);
    CHECK(t.w == 16.0);
    CHECK(t.ops.size() == 5);
    CHECK(std::get<OpInsert>(t.ops[0]).w == 2.5);
    CHECK(std::get<OpQueryBab>(t.ops[2]).demands.size() == 1);
    CHECK(std::get<OpObserve>(t.ops[4]).tag == "checkpoint");
}

TEST_CASE("trace parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const TraceFormatError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("") == 0);                                  // empty: no header
    CHECK(line_of("i 0 1 2\n") == 1);                         // header missing
    CHECK(line_of("n 0 16\n") == 1);                          // bad n
    CHECK(line_of("n 4 16\nx 1 2\n") == 2);                   // unknown op
    CHECK(line_of("n 4 16\ni 0 1\n") == 2);                   // short insert
    CHECK(line_of("n 4 16\nq 0 1\nb 1 0 1 2\n") == 3);        // missing price fn
    CHECK(line_of("n 4 16\nb 1 0 0 2 affine:1,2\n") == 2);    // s == t demand
    CHECK(line_of("n 4 16\no\n") == 2);                       // missing tag
}

TEST_CASE("format then parse is the identity") {
    Trace t = gen_trace("rand-decr", 8, 12, 4.0, 3);
    Trace t2 = parse(format_trace(t));
    CHECK(format_trace(t2) == format_trace(t));
    CHECK(t2.n == t.n);
    CHECK(t2.ops.size() == t.ops.size());
}

TEST_CASE("generator families produce replayable traces") {
    CHECK_THROWS_AS(gen_trace("nope", 8, 12, 4.0, 1), InvalidParameter);
    CHECK_THROWS_AS(gen_trace("rand-decr", 1, 4, 4.0, 1), InvalidParameter);
    Config cfg;
    cfg.seed = 5;

    Trace decr = gen_trace("rand-decr", 10, 16, 4.0, 1);
    cfg.stack = Stack::Decr;
    nlohmann::json r1 = replay(decr, cfg);
    CHECK(r1["schema"] == 1);
    CHECK(r1["mode"] == "replay");
    CHECK(!r1["observes"].empty());

    cfg.stack = Stack::Ldd;
    nlohmann::json r2 = replay(decr, cfg);
    CHECK(r2["queries"].empty());  // ldd answers no distance queries
    CHECK(r2["stats"].contains("q_skipped"));

    Trace full = gen_trace("rand-full", 8, 10, 4.0, 2);
    cfg.stack = Stack::Full;
    nlohmann::json r3 = replay(full, cfg);
    CHECK(!r3["observes"].empty());

    Trace bell = gen_trace("dumbbell", 8, 0, 4.0, 3);
    cfg.stack = Stack::Decr;
    nlohmann::json r4 = replay(bell, cfg);
    CHECK(r4["observes"].size() == 3);
}

TEST_CASE("oracle stack replays with built-in checks") {
    Trace t = gen_trace("rand-full", 6, 8, 4.0, 4);
    Config cfg;
    cfg.stack = Stack::Oracle;
    cfg.copies = 2;
    nlohmann::json r = replay(t, cfg);
    CHECK(r["stack"] == "oracle");
}

TEST_CASE("bab queries run on full and decr stacks and are skipped elsewhere") {
    Trace t = parse(
        "n 4 8\n"
        "i 0 1 2\n"
        "i 1 2 2\n"
        "i 2 3 2\n"
        "b 1 0 3 2.0 affine:0,1\n");
    Config cfg;
    cfg.stack = Stack::Bab;
    nlohmann::json r = replay(t, cfg);
    REQUIRE(r["queries"].size() == 1);
    // f(x) = x: estimate is dem * d_T(0,3) >= dem * d_G(0,3) = 12.
    CHECK(r["queries"][0]["bab"].get<double>() >= 12.0);

    cfg.stack = Stack::Oracle;
    cfg.copies = 1;
    nlohmann::json r2 = replay(t, cfg);
    CHECK(r2["stats"].contains("b_skipped"));
}

TEST_CASE("decremental stacks reject inserts after freezing") {
    Trace t = parse(
        "n 3 8\n"
        "i 0 1 2\n"
        "d 0 1\n"
        "i 1 2 2\n");
    Config cfg;
    cfg.stack = Stack::Decr;
    CHECK_THROWS_AS(replay(t, cfg), InvariantViolation);
    cfg.stack = Stack::Full;  // fully dynamic stack is fine with it
    CHECK_NOTHROW(replay(t, cfg));
}

TEST_CASE("replay failures carry stack, seed and op position") {
    Trace t = parse("n 3 8\nd 0 1\n");  // deleting a never-inserted edge
    Config cfg;
    cfg.stack = Stack::Decr;
    cfg.seed = 9;
    try {
        replay(t, cfg);
        CHECK(false);
    } catch (const InvariantViolation& e) {
        std::string what = e.what();
        CHECK(what.find("stack=decr") != std::string::npos);
        CHECK(what.find("seed=9") != std::string::npos);
        CHECK(what.find("op=0/1") != std::string::npos);
    }
}

TEST_CASE("replay reports are bit-identical for a fixed seed") {
    Trace t = gen_trace("rand-full", 8, 10, 4.0, 6);
    for (Stack s : {Stack::Decr, Stack::Full}) {
        Trace use = s == Stack::Decr ? gen_trace("rand-decr", 8, 12, 4.0, 6) : t;
        Config cfg;
        cfg.stack = s;
        cfg.seed = 11;
        CHECK(replay(use, cfg).dump() == replay(use, cfg).dump());
    }
}

TEST_CASE("monte carlo merges blocks deterministically across worker counts") {
    Trace t = gen_trace("rand-decr", 8, 12, 4.0, 7);
    Config cfg;
    cfg.stack = Stack::Ldd;
    cfg.seed = 100;
    nlohmann::json a = montecarlo(t, 48, cfg, 1);
    nlohmann::json b = montecarlo(t, 48, cfg, 3);
    nlohmann::json c = montecarlo(t, 48, cfg, 3);
    CHECK(a.dump() == b.dump());
    CHECK(b.dump() == c.dump());
    CHECK(a["mode"] == "mc");
    CHECK(a["seeds"] == 48);
    CHECK_THROWS_AS(montecarlo(t, 0, cfg, 1), InvalidParameter);
}

TEST_CASE("oracle_apsp matches Floyd-Warshall") {
    RngStream rng(8, "apsp");
    for (int trial = 0; trial < 4; ++trial) {
        int n = 6 + static_cast<int>(rng.below(27));
        DynGraph g = testutil::random_connected(n, 2 * n, 8.0, rng);
        auto a = oracle_apsp(g);
        auto b = testutil::floyd_warshall(g);
        for (NodeId u = 0; u < n; ++u) {
            CHECK(a[u][u] == 0.0);
            for (NodeId v = 0; v < n; ++v) {
                CHECK(a[u][v] == doctest::Approx(b[u][v]));
                CHECK(a[u][v] == a[v][u]);
            }
        }
    }
}
