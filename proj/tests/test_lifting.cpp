#include <doctest.h>

#include "imm/generators.hpp"
#include "imm/lifting.hpp"

using namespace imm;

TEST_CASE("degree-3 vertices are rejected") {
    MultiGraph g = gen_complete(4);  // 3-regular
    CHECK_THROWS_AS(find_liftable_pair(g, 0), Error);
}

TEST_CASE("cut-edge incidence is rejected") {
    MultiGraph g = gen_complete(4);
    g.add_vertex(9);
    g.add_edge(9, 0);
    g.add_vertex(10);
    g.add_edge(10, 9);
    CHECK_THROWS_AS(find_liftable_pair(g, 9), Error);
}

TEST_CASE("a degree-4 vertex of a 4-edge-connected graph is liftable") {
    MultiGraph g = gen_ctr(2, 5);
    auto [e, f] = find_liftable_pair(g, 0);
    CHECK(g.is_incident(e, 0));
    CHECK(g.is_incident(f, 0));
    LiftResult lifted = lift_pair(g, e, f);
    // the definition: lambda unchanged away from the lifted vertex
    for (VertexId x : g.vertices())
        for (VertexId y : g.vertices())
            if (x < y && x != 0 && y != 0)
                CHECK(local_edge_connectivity(lifted.graph, x, y) ==
                      local_edge_connectivity(g, x, y));
}

TEST_CASE("returned pairs pass an independent full lambda recheck") {
    Rng rng(211);
    int done = 0;
    for (std::uint64_t seed = 0; done < 50; ++seed) {
        Rng local(900 + seed);
        int n = 6 + local.uniform(0, 24);
        MultiGraph g;
        try {
            g = gen_random_k_edge_connected(n, 4, 0, local);
        } catch (const Error&) {
            continue;
        }
        // pick some vertex of degree >= 6 if one exists, else any >= 4
        VertexId s = -1;
        for (VertexId v : g.vertices())
            if (g.degree(v) >= 6) {
                s = v;
                break;
            }
        if (s < 0) s = *g.vertices().begin();
        if (g.degree(s) == 3) continue;
        ++done;
        auto [e, f] = find_liftable_pair(g, s);
        LiftResult lifted = lift_pair(g, e, f);
        std::vector<VertexId> order;
        for (VertexId v : g.vertices())
            if (v != s) order.push_back(v);
        auto before = lambda_matrix(g, order);
        auto after = lambda_matrix(lifted.graph, order);
        CHECK(before == after);
    }
    std::ignore = rng;
}

TEST_CASE("reduce_degrees identity cases") {
    SUBCASE("degrees already in k..k+1") {
        MultiGraph g = gen_ctr(2, 4);  // 4-regular, 4-edge-connected
        ReductionResult res = reduce_degrees(g, 4);
        CHECK(res.script.steps.empty());
        CHECK(res.reduced == g);
    }
    SUBCASE("K_5 with k = 4 is untouched") {
        MultiGraph g = gen_complete(5);
        ReductionResult res = reduce_degrees(g, 4);
        CHECK(res.script.steps.empty());
        CHECK(res.reduced == g);
    }
    SUBCASE("non-k-edge-connected inputs are rejected") {
        MultiGraph g = gen_cycle(5);
        CHECK_THROWS_AS(reduce_degrees(g, 4), Error);
    }
}

TEST_CASE("reduce_degrees on random 4-edge-connected graphs") {
    int done = 0;
    for (std::uint64_t seed = 0; done < 25; ++seed) {
        Rng rng(3000 + seed);
        MultiGraph g;
        try {
            g = gen_random_k_edge_connected(12 + rng.uniform(0, 10), 4, 10, rng);
        } catch (const Error&) {
            continue;
        }
        ++done;
        ReductionResult res = reduce_degrees(g, 4);
        CHECK(res.reduced.vertices() == g.vertices());
        for (VertexId v : res.reduced.vertices()) {
            CHECK(res.reduced.degree(v) >= 4);
            CHECK(res.reduced.degree(v) <= 5);
        }
        CHECK(is_k_edge_connected(res.reduced, 4).ok);
        CHECK(replay_script(g, res.script) == res.reduced);

        // lift count bound: sum of excess degree / 2 plus slack
        long excess = 0;
        for (VertexId v : g.vertices()) excess += std::max(0, g.degree(v) - 5);
        CHECK(static_cast<long>(res.script.steps.size()) <=
              excess / 2 + static_cast<long>(g.vertex_count()));
    }
}

TEST_CASE("connectivity holds after every single lift of a reduction") {
    Rng rng(78);
    MultiGraph g = gen_random_k_edge_connected(12, 4, 9, rng);
    ReductionResult res = reduce_degrees(g, 4);
    MultiGraph cur = g;
    for (const LiftStep& st : res.script.steps) {
        LiftingScript one;
        one.steps = {st};
        cur = replay_script(cur, one);
        CHECK(is_k_edge_connected(cur, 4).ok);
    }
    CHECK(cur == res.reduced);
}

TEST_CASE("reduction is deterministic") {
    Rng rng(77);
    MultiGraph g = gen_random_k_edge_connected(14, 4, 9, rng);
    ReductionResult a = reduce_degrees(g, 4);
    ReductionResult b = reduce_degrees(g, 4);
    CHECK(a.reduced == b.reduced);
    CHECK(a.script.steps.size() == b.script.steps.size());
}
