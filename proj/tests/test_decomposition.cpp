#include <doctest.h>

#include "imm/decomposition.hpp"
#include "imm/generators.hpp"

using namespace imm;

namespace {

TreeDecomposition single_bag(const MultiGraph& g) {
    TreeDecomposition td;
    td.tree.add_vertex(0);
    td.bags[0] = g.vertices();
    return td;
}

}  // namespace

TEST_CASE("verify_td") {
    SUBCASE("single bag holds W1, W2, W4 and W5 vacuously") {
        MultiGraph g = gen_complete(4);
        TdReport rep = verify_td(g, single_bag(g));
        CHECK(rep.w1);
        CHECK(rep.w2);
        CHECK(rep.w4);
        CHECK(rep.w5);
    }
    SUBCASE("duplicate bags fail W4") {
        MultiGraph g = gen_complete(3);
        TreeDecomposition td;
        td.tree.add_vertex(0);
        td.tree.add_vertex(1);
        td.tree.add_edge(0, 1);
        td.bags[0] = g.vertices();
        td.bags[1] = g.vertices();
        TdReport rep = verify_td(g, td);
        CHECK(rep.w1);
        CHECK(rep.w2);
        CHECK_FALSE(rep.w4);
        CHECK_FALSE(rep.w5);  // the branch past either node adds nothing
    }
    SUBCASE("path of cliques with its natural decomposition") {
        MultiGraph g = gen_caterpillar_of_cliques(4, 4, 2);
        TreeDecomposition td = heuristic_td(g);
        TdReport rep = verify_td(g, td);
        CHECK(rep.w1);
        CHECK(rep.w2);
    }
    SUBCASE("malformed structures throw") {
        MultiGraph g = gen_complete(3);
        TreeDecomposition td;
        td.tree.add_vertex(0);
        td.tree.add_vertex(1);  // disconnected tree
        td.bags[0] = {0, 1, 2};
        td.bags[1] = {0};
        CHECK_THROWS_AS(verify_td(g, td), Error);
    }
}

TEST_CASE("verify_linked") {
    SUBCASE("single bag is linked") {
        MultiGraph g = gen_complete(4);
        CHECK(verify_linked(g, single_bag(g)).linked);
    }
    SUBCASE("two big bags joined through a size-1 bag use the small-bag branch") {
        // host: two triangles sharing the cut vertex 2
        MultiGraph g;
        for (int i = 0; i < 5; ++i) g.add_vertex(i);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 2);
        g.add_edge(2, 3);
        g.add_edge(3, 4);
        g.add_edge(2, 4);
        TreeDecomposition td;
        for (int i = 0; i < 3; ++i) td.tree.add_vertex(i);
        td.tree.add_edge(0, 1);
        td.tree.add_edge(1, 2);
        td.bags[0] = {0, 1, 2};
        td.bags[1] = {2};
        td.bags[2] = {2, 3, 4};
        REQUIRE(verify_td(g, td).w2);
        CHECK(verify_linked(g, td).linked);
    }
    SUBCASE("an unlinked decomposition is caught") {
        // path host, but a decomposition whose middle bag is bigger than the
        // connectivity allows
        MultiGraph g = gen_path_graph(6);
        TreeDecomposition td;
        for (int i = 0; i < 3; ++i) td.tree.add_vertex(i);
        td.tree.add_edge(0, 1);
        td.tree.add_edge(1, 2);
        td.bags[0] = {0, 1, 2};
        td.bags[1] = {2, 3, 0};
        td.bags[2] = {3, 4, 5};
        REQUIRE(verify_td(g, td).w1);
        LinkedResult lr = verify_linked(g, td);
        CHECK_FALSE(lr.linked);
        REQUIRE(lr.violation.has_value());
    }
    SUBCASE("caterpillar with explicit separator bags is linked") {
        // clique bags alone are not linked (the separators are smaller than
        // the bags); inserting the separator bags restores W3
        int blocks = 5, clique = 4, sep = 2;
        MultiGraph g = gen_caterpillar_of_cliques(blocks, clique, sep);
        TreeDecomposition plain = heuristic_td(g);
        CHECK_FALSE(verify_linked(g, plain).linked);

        TreeDecomposition td;
        int node = 0;
        std::vector<VertexId> order;
        for (int b = 0; b < blocks; ++b) {
            // block b holds vertices [b*(clique-sep), b*(clique-sep)+clique)
            std::set<VertexId> bag;
            for (int i = 0; i < clique; ++i) bag.insert(b * (clique - sep) + i);
            if (b > 0) {
                std::set<VertexId> inter;
                for (int i = 0; i < sep; ++i) inter.insert(b * (clique - sep) + i);
                td.tree.add_vertex(node);
                td.bags[node] = inter;
                if (node > 0) td.tree.add_edge(node - 1, node);
                ++node;
            }
            td.tree.add_vertex(node);
            td.bags[node] = bag;
            if (node > 0) td.tree.add_edge(node - 1, node);
            ++node;
        }
        REQUIRE(verify_td(g, td).w1);
        REQUIRE(verify_td(g, td).w2);
        CHECK(verify_linked(g, td).linked);
    }
}

TEST_CASE("heuristic_td widths") {
    SUBCASE("trees have width 1") {
        Rng rng(44);
        for (int trial = 0; trial < 20; ++trial) {
            MultiGraph g = gen_random_tree(10, rng);
            TreeDecomposition td = heuristic_td(g);
            CHECK(td.width() == 1);
            TdReport rep = verify_td(g, td);
            CHECK(rep.w1);
            CHECK(rep.w2);
        }
    }
    SUBCASE("cycles have width 2") {
        for (int n = 3; n <= 12; ++n) {
            MultiGraph g = gen_cycle(n);
            TreeDecomposition td = heuristic_td(g);
            CHECK(td.width() == 2);
            CHECK(verify_td(g, td).w1);
        }
    }
    SUBCASE("the 5x5 grid gets width at most 5") {
        MultiGraph g = gen_grid(5);
        TreeDecomposition td = heuristic_td(g);
        CHECK(td.width() <= 5);
        TdReport rep = verify_td(g, td);
        CHECK(rep.w1);
        CHECK(rep.w2);
    }
}

TEST_CASE("degree_bound_check") {
    SUBCASE("single bag satisfies both bounds") {
        MultiGraph g = gen_complete(4);
        DegreeBoundReport rep = degree_bound_check(g, single_bag(g), 3);
        CHECK(rep.tree_degree_ok);
        CHECK(rep.components_ok);
    }
    SUBCASE("random W5 decompositions meet the bound") {
        Rng rng(50);
        for (int trial = 0; trial < 25; ++trial) {
            MultiGraph g = gen_random_connected_multigraph(12, 8, rng);
            int d = 0;
            for (VertexId v : g.vertices()) d = std::max(d, g.degree(v));
            TreeDecomposition td = heuristic_td(g);
            TdReport rep = verify_td(g, td);
            if (!rep.w5) continue;
            DegreeBoundReport db = degree_bound_check(g, td, d);
            CHECK(db.tree_degree_ok);
            CHECK(db.components_ok);
        }
    }
    SUBCASE("component count equality on a star of cliques") {
        // bags: center {0}, cliques hanging off it
        MultiGraph g;
        g.add_vertex(0);
        for (int c = 0; c < 3; ++c) {
            VertexId a = 1 + 2 * c, b = 2 + 2 * c;
            g.add_vertex(a);
            g.add_vertex(b);
            g.add_edge(0, a);
            g.add_edge(0, b);
            g.add_edge(a, b);
        }
        TreeDecomposition td;
        td.tree.add_vertex(0);
        td.bags[0] = {0};
        for (int c = 0; c < 3; ++c) {
            td.tree.add_vertex(1 + c);
            td.tree.add_edge(0, 1 + c);
            td.bags[1 + c] = {0, 1 + 2 * c, 2 + 2 * c};
        }
        REQUIRE(verify_td(g, td).w2);
        DegreeBoundReport db = degree_bound_check(g, td, 4);
        CHECK(db.components_ok);
        // g - Y_center has exactly deg_T(center) = 3 components
        std::set<VertexId> rest;
        for (VertexId v : g.vertices())
            if (v != 0) rest.insert(v);
        CHECK(induced_subgraph(g, rest).components().size() == 3);
    }
}

TEST_CASE("find_gates on a path of identical-intersection bags") {
    // caterpillar: cliques of size 4 overlapping in pairs
    MultiGraph g = gen_caterpillar_of_cliques(8, 4, 2);
    TreeDecomposition td = heuristic_td(g);
    auto gates = find_gates(g, td, 4);
    REQUIRE(gates.has_value());
    CHECK(gates->s >= 2);
    CHECK(static_cast<int>(gates->gates.size()) >= 4);
    // gates all have the common size and pairwise intersection U
    for (VertexId t : gates->gates)
        CHECK(static_cast<int>(gates->td.bags.at(t).size()) == gates->s);
    for (std::size_t i = 0; i < gates->gates.size(); ++i)
        for (std::size_t j = i + 1; j < gates->gates.size(); ++j) {
            std::set<VertexId> inter;
            for (VertexId v : gates->td.bags.at(gates->gates[i]))
                if (gates->td.bags.at(gates->gates[j]).count(v)) inter.insert(v);
            CHECK(inter == gates->common);
        }
    // rails: vertex-disjoint, one gate vertex each
    CHECK(static_cast<int>(gates->rails.size()) == gates->s);
    std::set<VertexId> seen;
    for (const Path& rail : gates->rails)
        for (VertexId v : rail.vertices) CHECK(seen.insert(v).second);
}

TEST_CASE("find_gates on a ladder") {
    MultiGraph g = gen_ladder(10);
    TreeDecomposition td = heuristic_td(g);
    auto gates = find_gates(g, td, 4);
    REQUIRE(gates.has_value());
    CHECK(gates->s == 2);
    CHECK(gates->common.empty());
    CHECK(gates->rails.size() == 2);
}

TEST_CASE("rails paste together from their gate cuts") {
    MultiGraph g = gen_caterpillar_of_cliques(8, 4, 2);
    TreeDecomposition td = heuristic_td(g);
    auto gates = find_gates(g, td, 5);
    REQUIRE(gates.has_value());
    int n = static_cast<int>(gates->gates.size());
    for (std::size_t j = 0; j < gates->rails.size(); ++j) {
        const Path& rail = gates->rails[j];
        if (rail.length() == 0) continue;
        Path whole = rail.subpath(gates->rail_gate_hits[j][0], gates->rail_gate_hits[j][n - 1]);
        // pasting consecutive cuts reproduces the whole stretch
        Path pasted = rail.subpath(gates->rail_gate_hits[j][0], gates->rail_gate_hits[j][1]);
        for (int i = 1; i + 1 < n; ++i) {
            Path next = rail.subpath(gates->rail_gate_hits[j][i], gates->rail_gate_hits[j][i + 1]);
            REQUIRE(pasted.back() == next.front());
            pasted.vertices.insert(pasted.vertices.end(), next.vertices.begin() + 1,
                                   next.vertices.end());
            pasted.edges.insert(pasted.edges.end(), next.edges.begin(), next.edges.end());
        }
        CHECK(pasted == whole);
    }
}

TEST_CASE("Y-range disjointness across gate windows") {
    MultiGraph g = gen_caterpillar_of_cliques(8, 4, 2);
    TreeDecomposition td = heuristic_td(g);
    auto gates = find_gates(g, td, 5);
    REQUIRE(gates.has_value());
    int n = static_cast<int>(gates->gates.size());
    REQUIRE(n >= 4);
    // for i < i' < j < j': (Y[t_i, t_i') \ U) disjoint from (Y[t_j, t_j') \ U)
    for (int i = 0; i + 3 < n; ++i) {
        std::set<VertexId> first = gates->ranges[i];
        std::set<VertexId> second = gates->ranges[i + 2];
        for (VertexId v : first) {
            if (gates->common.count(v)) continue;
            CHECK_FALSE(second.count(v));
        }
    }
}

TEST_CASE("avoid_u_window") {
    SUBCASE("empty U accepts the first window") {
        MultiGraph g = gen_ladder(10);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 4);
        REQUIRE(gates.has_value());
        REQUIRE(gates->common.empty());
        auto win = avoid_u_window(*gates, g, 4);
        REQUIRE(win.has_value());
        CHECK(win->first == 0);
        CHECK(win->second == 4);
    }
    SUBCASE("N(U) touching the first stretch pushes the window along") {
        // the doubled cycle's fan decomposition puts an apex in every bag, so
        // U is the apex and N(U) sits at both ends of the gate run; the first
        // window is rejected, the next one accepted
        MultiGraph g = gen_ctr(2, 14);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 4);
        REQUIRE(gates.has_value());
        REQUIRE(gates->common.size() == 1);
        std::set<VertexId> nu = g.neighborhood(gates->common);
        auto win = avoid_u_window(*gates, g, 4);
        REQUIRE(win.has_value());
        CHECK(win->first > 0);
        for (int i = win->first; i + 1 < win->second; ++i)
            for (VertexId v : gates->ranges[i])
                if (!gates->common.count(v)) CHECK_FALSE(nu.count(v));
    }
}

TEST_CASE("build_ring on structured hosts") {
    SUBCASE("C_{2,m} gives a width-1 ring") {
        MultiGraph g = gen_ctr(2, 14);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 5);
        REQUIRE(gates.has_value());
        auto win = avoid_u_window(*gates, g, std::min<int>(6, gates->gates.size()));
        REQUIRE(win.has_value());
        RingDecomposition ring = build_ring(g, *gates, win->first, win->second - win->first);
        CHECK(ring.width >= 1);
        RingReport rep = verify_ring(g, ring);
        CHECK(rep.r1);
        CHECK(rep.r2);
        CHECK(rep.r3);
        CHECK(rep.r4);
    }
    SUBCASE("ladder gives a width-2 ring") {
        MultiGraph g = gen_ladder(14);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 6);
        REQUIRE(gates.has_value());
        auto win = avoid_u_window(*gates, g, std::min<int>(6, gates->gates.size()));
        REQUIRE(win.has_value());
        RingDecomposition ring = build_ring(g, *gates, win->first, win->second - win->first);
        CHECK(ring.width == 2);
        RingReport rep = verify_ring(g, ring);
        CHECK(rep.r1);
        CHECK(rep.r2);
        CHECK(rep.r3);
        CHECK(rep.r4);
    }
    SUBCASE("caterpillar rings verify") {
        MultiGraph g = gen_caterpillar_of_cliques(9, 4, 2);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 5);
        REQUIRE(gates.has_value());
        auto win = avoid_u_window(*gates, g, std::min<int>(5, gates->gates.size()));
        REQUIRE(win.has_value());
        RingDecomposition ring = build_ring(g, *gates, win->first, win->second - win->first);
        RingReport rep = verify_ring(g, ring);
        CHECK(rep.r1);
        CHECK(rep.r2);
        CHECK(rep.r3);
        CHECK(rep.r4);
    }
}

TEST_CASE("verify_ring catches structural breakage") {
    SUBCASE("C_n with single-edge segments and singleton interfaces") {
        MultiGraph g = gen_cycle(6);
        RingDecomposition ring;
        ring.width = 1;
        // G_0 = edge 5 (5-0); G_i = edge i-1 joining i-1 and i
        SubgraphSpec g0;
        g0.vertices = {5, 0};
        g0.edges = {5};
        ring.segments.push_back(g0);
        for (int i = 1; i <= 5; ++i) {
            SubgraphSpec seg;
            seg.vertices = {i - 1, i};
            seg.edges = {static_cast<EdgeId>(i - 1)};
            ring.segments.push_back(seg);
        }
        RingReport rep = verify_ring(g, ring);
        CHECK(rep.r1);
        CHECK(rep.r2);
        CHECK(rep.r3);
        CHECK(rep.r4);
    }
    SUBCASE("non-consecutive segments sharing a vertex fail R2") {
        MultiGraph g = gen_cycle(6);
        RingDecomposition ring;
        ring.width = 1;
        SubgraphSpec g0{{5, 0}, {5}};
        ring.segments.push_back(g0);
        ring.segments.push_back(SubgraphSpec{{0, 1}, {0}});
        ring.segments.push_back(SubgraphSpec{{1, 2}, {1}});
        ring.segments.push_back(SubgraphSpec{{2, 3, 0}, {2}});  // stray vertex 0
        ring.segments.push_back(SubgraphSpec{{3, 4}, {3}});
        ring.segments.push_back(SubgraphSpec{{4, 5}, {4}});
        RingReport rep = verify_ring(g, ring);
        CHECK_FALSE(rep.r2);
    }
}

TEST_CASE("absorb") {
    MultiGraph g = gen_ladder(14);
    TreeDecomposition td = heuristic_td(g);
    auto gates = find_gates(g, td, 6);
    REQUIRE(gates.has_value());
    auto win = avoid_u_window(*gates, g, std::min<int>(6, gates->gates.size()));
    REQUIRE(win.has_value());
    RingDecomposition ring = build_ring(g, *gates, win->first, win->second - win->first);
    REQUIRE(verify_ring(g, ring).valid());
    int n = ring.length();
    if (n >= 4) {
        SUBCASE("inner merge keeps the ring valid") {
            RingDecomposition merged = absorb(g, ring, 1);
            CHECK(merged.length() == n - 1);
            CHECK(merged.width == ring.width);
            CHECK(verify_ring(g, merged).valid());
        }
        SUBCASE("merging into G_0 keeps the ring valid") {
            RingDecomposition merged = absorb(g, ring, n);
            CHECK(merged.length() == n - 1);
            CHECK(verify_ring(g, merged).valid());
        }
        SUBCASE("repeated absorption down to length 3 preserves width") {
            RingDecomposition cur = ring;
            while (cur.length() > 3) {
                cur = absorb(g, cur, 1);
                CHECK(verify_ring(g, cur).valid());
                CHECK(cur.width == ring.width);
            }
            CHECK_THROWS_AS(absorb(g, cur, 1), Error);
        }
        if (n >= 5) {
            SUBCASE("absorbing twice equals merging three consecutive segments") {
                RingDecomposition twice = absorb(g, absorb(g, ring, 1), 1);
                SubgraphSpec merged = ring.segments[1];
                for (int j = 2; j <= 3; ++j) {
                    merged.vertices.insert(ring.segments[j].vertices.begin(),
                                           ring.segments[j].vertices.end());
                    merged.edges.insert(ring.segments[j].edges.begin(),
                                        ring.segments[j].edges.end());
                }
                CHECK(twice.segments[1].vertices == merged.vertices);
                CHECK(twice.segments[1].edges == merged.edges);
            }
        }
    }
}

TEST_CASE("connectify") {
    SUBCASE("already-connected chunks return immediately") {
        MultiGraph g = gen_ladder(16);
        TreeDecomposition td = heuristic_td(g);
        auto gates = find_gates(g, td, 8);
        REQUIRE(gates.has_value());
        auto win = avoid_u_window(*gates, g, std::min<int>(10, gates->gates.size()));
        REQUIRE(win.has_value());
        RingDecomposition ring = build_ring(g, *gates, win->first, win->second - win->first);
        REQUIRE(verify_ring(g, ring).valid());
        if (ring.length() >= 3) {
            RingDecomposition connected = connectify(g, ring, 3);
            CHECK(segments_connected(g, connected));
            CHECK(verify_ring(g, connected).valid());
            CHECK(connected.width == ring.width);
        }
    }
    SUBCASE("a rungless stretch splits a chunk and halves the width") {
        // hand-built ring on a ladder whose middle rungs are gone: the middle
        // chunk union falls apart into the two rows, one rail each
        int len = 22;
        std::vector<bool> rungs(len, true);
        for (int i = 7; i <= 13; ++i) rungs[i] = false;
        MultiGraph g = gen_ladder(len, rungs);

        // gates at odd columns 1, 3, ..., 19: ring of length 9
        std::vector<int> cols{1, 3, 5, 7, 9, 11, 13, 15, 17, 19};
        RingDecomposition ring;
        ring.width = 2;
        auto col_edges = [&](int a, int b) {
            // slice between columns a and b: row edges in [a, b), rungs in (a, b]
            SubgraphSpec seg;
            for (int c = a; c <= b; ++c) {
                seg.vertices.insert(c);
                seg.vertices.insert(len + c);
            }
            for (const auto& [id, ep] : g.edges()) {
                VertexId u = std::min(ep.first, ep.second), v = std::max(ep.first, ep.second);
                bool row = (v == u + 1);
                bool rung = (v == u + len);
                int cu = u % len, cv = v % len;
                if (row && cu >= a && cv <= b) seg.edges.insert(id);
                if (rung && cu > a && cu <= b) seg.edges.insert(id);
            }
            return seg;
        };
        std::vector<SubgraphSpec> inner;
        for (std::size_t i = 0; i + 1 < cols.size(); ++i)
            inner.push_back(col_edges(cols[i], cols[i + 1]));
        // G_0: everything else (the two end caps), plus the boundary gates
        SubgraphSpec g0;
        std::set<EdgeId> used;
        for (const auto& seg : inner) used.insert(seg.edges.begin(), seg.edges.end());
        for (const auto& [id, ep] : g.edges())
            if (!used.count(id)) {
                g0.edges.insert(id);
                g0.vertices.insert(ep.first);
                g0.vertices.insert(ep.second);
            }
        g0.vertices.insert(cols.front());
        g0.vertices.insert(len + cols.front());
        g0.vertices.insert(cols.back());
        g0.vertices.insert(len + cols.back());
        ring.segments.push_back(g0);
        for (auto& seg : inner) ring.segments.push_back(seg);
        // rails: the two rows across the gate span
        Path top, bottom;
        for (int c = cols.front(); c <= cols.back(); ++c) top.vertices.push_back(c);
        for (int c = cols.front(); c <= cols.back(); ++c) bottom.vertices.push_back(len + c);
        auto fill_edges = [&](Path& p) {
            for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
                for (EdgeId e : g.incident_edges(p.vertices[i]))
                    if (g.other_end(e, p.vertices[i]) == p.vertices[i + 1]) p.edges.push_back(e);
        };
        fill_edges(top);
        fill_edges(bottom);
        ring.rails = {top, bottom};

        REQUIRE(verify_ring(g, ring).valid());
        REQUIRE_FALSE(segments_connected(g, ring));
        RingDecomposition connected = connectify(g, ring, 3);
        CHECK(segments_connected(g, connected));
        CHECK(connected.width == 1);
        RingReport rep = verify_ring(g, connected);
        CHECK(rep.r2);
        CHECK(rep.r3);
        CHECK(rep.r4);
    }
}
