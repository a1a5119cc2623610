#include <doctest.h>

#include "imm/generators.hpp"
#include "imm/multigraph.hpp"
#include "imm/oracle.hpp"

using namespace imm;

namespace {

// naive edge-list simulation used as the replay oracle: edges as (u, v)
// tuples keyed by id, no adjacency structures
struct NaiveSim {
    std::map<EdgeId, std::pair<VertexId, VertexId>> edges;
    std::set<VertexId> vertices;
    EdgeId next_id = 0;

    static NaiveSim of(const MultiGraph& g) {
        NaiveSim s;
        s.vertices = g.vertices();
        for (const auto& [id, ep] : g.edges()) s.edges[id] = ep;
        s.next_id = g.peek_next_edge_id();
        return s;
    }

    void lift(EdgeId e, EdgeId f, EdgeId created) {
        auto [a, b] = edges.at(e);
        auto [c, d] = edges.at(f);
        VertexId shared = (a == c || a == d) ? a : b;
        VertexId x = (a == shared) ? b : a;
        VertexId y = (c == shared) ? d : c;
        edges.erase(e);
        edges.erase(f);
        if (x != y) edges[created] = {x, y};
        next_id = std::max(next_id, created + 1);
    }
};

}  // namespace

TEST_CASE("lift_pair degree arithmetic") {
    MultiGraph g;
    for (int i = 0; i < 4; ++i) g.add_vertex(i);
    EdgeId su = g.add_edge(0, 1);
    EdgeId sv = g.add_edge(0, 2);
    g.add_edge(0, 3);
    g.add_edge(1, 2);

    LiftResult r = lift_pair(g, su, sv);
    CHECK(r.created.has_value());
    CHECK(r.graph.edge_count() == g.edge_count() - 1);
    CHECK(r.graph.degree(0) == g.degree(0) - 2);
    CHECK(r.graph.degree(1) == g.degree(1));
    CHECK(r.graph.degree(2) == g.degree(2));
    CHECK(r.graph.parallel_count(1, 2) == 2);
}

TEST_CASE("lift_pair parallel pair vanishes") {
    MultiGraph g;
    g.add_vertex(0);
    g.add_vertex(1);
    EdgeId e1 = g.add_edge(0, 1);
    EdgeId e2 = g.add_edge(0, 1);
    g.add_edge(0, 1);

    LiftResult r = lift_pair(g, e1, e2);
    CHECK_FALSE(r.created.has_value());
    CHECK(r.graph.edge_count() == 1);
    CHECK(r.graph.degree(0) == 1);
}

TEST_CASE("lift_pair errors") {
    MultiGraph g;
    for (int i = 0; i < 4; ++i) g.add_vertex(i);
    EdgeId a = g.add_edge(0, 1);
    EdgeId b = g.add_edge(2, 3);
    CHECK_THROWS_AS(lift_pair(g, a, b), Error);
    CHECK_THROWS_AS(lift_pair(g, a, 99), Error);
    CHECK_THROWS_AS(lift_pair(g, a, a), Error);
}

TEST_CASE("random lifting scripts replay like the naive simulation") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        MultiGraph g = gen_random_connected_multigraph(10, 8, rng);
        NaiveSim sim = NaiveSim::of(g);
        MultiGraph cur = g;
        LiftingScript script;
        for (int step = 0; step < 5; ++step) {
            // random liftable spot: vertex of degree >= 2
            std::vector<VertexId> cands;
            for (VertexId v : cur.vertices())
                if (cur.degree(v) >= 2) cands.push_back(v);
            if (cands.empty()) break;
            VertexId s = cands[rng.uniform(0, static_cast<int>(cands.size()) - 1)];
            std::vector<EdgeId> inc(cur.incident_edges(s).begin(), cur.incident_edges(s).end());
            EdgeId e = inc[rng.uniform(0, static_cast<int>(inc.size()) - 1)];
            EdgeId f = e;
            while (f == e) f = inc[rng.uniform(0, static_cast<int>(inc.size()) - 1)];
            LiftResult r = lift_pair(cur, e, f);
            LiftStep st;
            st.kind = LiftStep::LiftPair;
            st.lift_e = e;
            st.lift_f = f;
            st.created = r.created.value_or(-1);
            script.steps.push_back(st);
            if (r.created) sim.lift(e, f, *r.created);
            else sim.lift(e, f, cur.peek_next_edge_id());
            cur = std::move(r.graph);
        }
        MultiGraph replayed = replay_script(g, script);
        CHECK(replayed == cur);
        CHECK(replayed.edges().size() == sim.edges.size());
        for (const auto& [id, ep] : replayed.edges()) {
            REQUIRE(sim.edges.count(id));
            auto [a, b] = sim.edges.at(id);
            CHECK(((a == ep.first && b == ep.second) || (a == ep.second && b == ep.first)));
        }
    }
}

TEST_CASE("lift_path basics") {
    MultiGraph g;
    for (int i = 0; i < 3; ++i) g.add_vertex(i);
    EdgeId a = g.add_edge(0, 1);
    EdgeId b = g.add_edge(1, 2);

    SUBCASE("single edge is the identity on the edge multiset") {
        LiftResult r = lift_path(g, {a});
        CHECK(r.graph.edge_count() == 2);
        CHECK(r.graph.parallel_count(0, 1) == 1);
    }
    SUBCASE("two-edge path equals lift_pair") {
        LiftResult via_path = lift_path(g, {a, b});
        LiftResult via_pair = lift_pair(g, a, b);
        CHECK(via_path.graph == via_pair.graph);
    }
}

TEST_CASE("random 4-edge paths equal iterated pair lifts") {
    Rng rng(23);
    int done = 0;
    while (done < 25) {
        MultiGraph g = gen_random_connected_multigraph(12, 10, rng);
        // find a random simple 4-edge path by walking
        VertexId v = rng.uniform(0, 11);
        std::vector<EdgeId> walk;
        std::set<VertexId> seen{v};
        for (int i = 0; i < 4; ++i) {
            std::vector<EdgeId> options;
            for (EdgeId e : g.incident_edges(v))
                if (!seen.count(g.other_end(e, v))) options.push_back(e);
            if (options.empty()) break;
            EdgeId e = options[rng.uniform(0, static_cast<int>(options.size()) - 1)];
            walk.push_back(e);
            v = g.other_end(e, v);
            seen.insert(v);
        }
        if (walk.size() != 4) continue;
        ++done;

        LiftResult whole = lift_path(g, walk);
        MultiGraph iter = g;
        EdgeId acc = walk[0];
        for (std::size_t i = 1; i < walk.size(); ++i) {
            LiftResult r = lift_pair(iter, acc, walk[i]);
            REQUIRE(r.created.has_value());
            acc = *r.created;
            iter = std::move(r.graph);
        }
        // same edge multiset up to ids: compare endpoints of the created edge
        REQUIRE(whole.created.has_value());
        auto [wa, wb] = whole.graph.endpoints(*whole.created);
        auto [ia, ib] = iter.endpoints(acc);
        CHECK(std::minmax(wa, wb) == std::minmax(ia, ib));
        CHECK(whole.graph.edge_count() == iter.edge_count());
    }
}

TEST_CASE("contract single vertex is an identity") {
    Rng rng(5);
    MultiGraph g = gen_random_connected_multigraph(8, 6, rng);
    ContractResult r = contract_set(g, {3});
    CHECK(r.graph.edge_count() == g.edge_count());
    CHECK(r.graph.vertex_count() == g.vertex_count());
    CHECK(r.graph.degree(r.merged) == g.degree(3));
}

TEST_CASE("contracting one side of K_{2,3}") {
    MultiGraph g = gen_complete_bipartite(2, 3);
    // contract the size-3 part: vertices 2, 3, 4
    ContractResult r = contract_set(g, {2, 3, 4});
    CHECK(r.graph.vertex_count() == 3);
    CHECK(r.graph.parallel_count(0, r.merged) == 3);
    CHECK(r.graph.parallel_count(1, r.merged) == 3);
    CHECK(r.graph.parallel_count(0, 1) == 0);
}

TEST_CASE("contract errors") {
    MultiGraph g = gen_complete(3);
    CHECK_THROWS_AS(contract_set(g, {}), Error);
    CHECK_THROWS_AS(contract_set(g, {9}), Error);
}

TEST_CASE("cuts of a contraction pull back to cuts") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        MultiGraph g = gen_random_connected_multigraph(8, 7, rng);
        std::set<VertexId> s;
        int size = rng.uniform(2, 4);
        while (static_cast<int>(s.size()) < size) s.insert(rng.uniform(0, 7));
        ContractResult r = contract_set(g, s);

        // enumerate all vertex-side cuts of g/S and check each pulls back
        std::vector<VertexId> rest;
        for (VertexId v : r.graph.vertices())
            if (v != r.merged) rest.push_back(v);
        for (std::uint64_t mask = 0; mask < (1ull << rest.size()); ++mask) {
            std::set<VertexId> side{r.merged};
            for (std::size_t i = 0; i < rest.size(); ++i)
                if (mask & (1ull << i)) side.insert(rest[i]);
            std::set<EdgeId> cut = r.graph.edge_boundary(side);

            std::set<VertexId> pulled = s;
            for (VertexId v : side)
                if (v != r.merged) pulled.insert(v);
            CHECK(g.edge_boundary(pulled) == cut);
        }
    }
}

TEST_CASE("line graph of a triangle is a triangle") {
    MultiGraph g = gen_complete(3);
    LineGraphResult lg = line_graph(g);
    CHECK(lg.graph.vertex_count() == 3);
    CHECK(lg.graph.edge_count() == 3);
    for (VertexId v : lg.graph.vertices()) CHECK(lg.graph.degree(v) == 2);
}

TEST_CASE("line graph vertex count equals edge count") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        MultiGraph g = gen_random_multigraph(7, 12, rng);
        LineGraphResult lg = line_graph(g);
        CHECK(lg.graph.vertex_count() == g.edge_count());
        CHECK(lg.edge_to_vertex.size() == g.edge_count());
    }
}

TEST_CASE("line graph degree law") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        MultiGraph g = gen_random_multigraph(8, 14, rng);
        LineGraphResult lg = line_graph(g);
        for (const auto& [id, ep] : g.edges()) {
            int parallel = g.parallel_count(ep.first, ep.second) - 1;
            int expect = g.degree(ep.first) + g.degree(ep.second) - 2 - parallel;
            CHECK(lg.graph.degree(lg.edge_to_vertex.at(id)) == expect);
        }
    }
}

TEST_CASE("L(K_{3,3}) contains K_5 as a minor") {
    MultiGraph k33 = gen_complete_bipartite(3, 3);
    LineGraphResult lg = line_graph(k33);
    MultiGraph k5 = gen_complete(5);
    OracleBudget budget{9, 18, 120000};
    auto cert = brute_minor(lg.graph, k5, budget);
    REQUIRE(cert.has_value());
    CHECK(verify_minor(lg.graph, *cert).ok);
}

TEST_CASE("tutte bridges") {
    SUBCASE("h = g gives no bridges") {
        MultiGraph g = gen_complete(4);
        SubgraphSpec h;
        h.vertices = g.vertices();
        for (const auto& [id, ep] : g.edges()) h.edges.insert(id);
        CHECK(tutte_bridges(g, h).empty());
    }
    SUBCASE("C_6 against a single vertex is one bridge") {
        MultiGraph g = gen_cycle(6);
        SubgraphSpec h;
        h.vertices = {0};
        std::vector<Bridge> bridges = tutte_bridges(g, h);
        REQUIRE(bridges.size() == 1);
        CHECK_FALSE(bridges[0].trivial);
        CHECK(bridges[0].edge_set.size() == 6);
        CHECK(bridges[0].attachments == std::set<VertexId>{0});
        CHECK(bridges[0].nucleus.size() == 5);
    }
    SUBCASE("bridge edge sets partition E(g) minus E(h)") {
        Rng rng(13);
        for (int trial = 0; trial < 40; ++trial) {
            MultiGraph g = gen_random_connected_multigraph(9, 8, rng);
            SubgraphSpec h;
            for (VertexId v : g.vertices())
                if (rng.chance(1, 2)) h.vertices.insert(v);
            if (h.vertices.empty()) h.vertices.insert(0);
            for (const auto& [id, ep] : g.edges())
                if (h.vertices.count(ep.first) && h.vertices.count(ep.second) && rng.chance(1, 2))
                    h.edges.insert(id);

            std::vector<Bridge> bridges = tutte_bridges(g, h);
            std::set<EdgeId> covered;
            for (const Bridge& b : bridges)
                for (EdgeId e : b.edge_set) {
                    CHECK_FALSE(covered.count(e));
                    covered.insert(e);
                }
            std::set<EdgeId> expect;
            for (const auto& [id, ep] : g.edges())
                if (!h.edges.count(id)) expect.insert(id);
            CHECK(covered == expect);
        }
    }
    SUBCASE("not a subgraph errors") {
        MultiGraph g = gen_complete(3);
        SubgraphSpec h;
        h.vertices = {0, 99};
        CHECK_THROWS_AS(tutte_bridges(g, h), Error);
    }
}

TEST_CASE("nontrivial bridge nuclei are components of G - V(H)") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        MultiGraph g = gen_random_connected_multigraph(9, 8, rng);
        SubgraphSpec h;
        h.vertices = {0, 1};
        std::vector<Bridge> bridges = tutte_bridges(g, h);
        std::set<VertexId> rest;
        for (VertexId v : g.vertices())
            if (!h.vertices.count(v)) rest.insert(v);
        auto comps = induced_subgraph(g, rest).components();
        std::size_t nontrivial = 0;
        for (const Bridge& b : bridges)
            if (!b.trivial) {
                ++nontrivial;
                CHECK(std::find(comps.begin(), comps.end(), b.nucleus) != comps.end());
            }
        CHECK(nontrivial == comps.size());
    }
}
