#include "imm/linegraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "imm/packing.hpp"

namespace imm {

VerifyResult verify_minor(const MultiGraph& host, const MinorCertificate& cert) {
    std::set<VertexId> used;
    for (VertexId pv : cert.pattern.vertices()) {
        auto it = cert.branch_sets.find(pv);
        if (it == cert.branch_sets.end() || it->second.empty())
            return {false, "pattern vertex " + std::to_string(pv) + " has no branch set"};
        for (VertexId v : it->second) {
            if (!host.has_vertex(v)) return {false, "branch vertex not in host"};
            if (!used.insert(v).second)
                return {false, "branch sets overlap at " + std::to_string(v)};
        }
        MultiGraph sub = induced_subgraph(host, it->second);
        if (!sub.connected())
            return {false, "branch set of " + std::to_string(pv) + " is disconnected"};
    }
    std::set<EdgeId> witnesses;
    for (const auto& [pe, ep] : cert.pattern.edges()) {
        auto it = cert.edge_witness.find(pe);
        if (it == cert.edge_witness.end())
            return {false, "pattern edge " + std::to_string(pe) + " has no witness"};
        if (!host.has_edge(it->second)) return {false, "witness edge not in host"};
        if (!witnesses.insert(it->second).second)
            return {false, "witness edge " + std::to_string(it->second) + " reused"};
        auto [a, b] = host.endpoints(it->second);
        const auto& sa = cert.branch_sets.at(ep.first);
        const auto& sb = cert.branch_sets.at(ep.second);
        bool fwd = sa.count(a) && sb.count(b);
        bool rev = sa.count(b) && sb.count(a);
        if (!fwd && !rev)
            return {false, "witness for " + std::to_string(pe) + " misses its branch sets"};
    }
    return {true, ""};
}

namespace {

// End edge of a host walk at one of its endpoints.
EdgeId end_edge_at(const Path& p, VertexId v) {
    if (p.edges.empty()) throw Error(ErrorCode::InvalidCertificate, "zero-length path in model");
    if (p.front() == v) return p.edges.front();
    if (p.back() == v) return p.edges.back();
    throw Error(ErrorCode::InvalidCertificate, "vertex is not a walk end");
}

}  // namespace

ImmersionToMinorResult immersion_to_minor(const MultiGraph& host, const ImmersionCertificate& cert) {
    VerifyResult vr = verify_immersion(host, cert);
    if (!vr.ok) throw Error(ErrorCode::InvalidCertificate, vr.violation);

    ImmersionToMinorResult out;
    LineGraphResult lh = line_graph(host);
    out.line_host = lh.graph;
    LineGraphResult lp = line_graph(cert.pattern);
    out.line_pattern = lp.graph;

    // Replay the implied script. Every current edge carries the host path it
    // represents; a pair lift concatenates the two carried paths, a deletion
    // drops one. Carried edge sets are the branch sets in L(host).
    MultiGraph cur = host;
    std::map<EdgeId, Path> carried;
    for (const auto& [id, ep] : host.edges())
        carried[id] = Path{{ep.first, ep.second}, {id}};

    std::set<EdgeId> wanted;
    for (const auto& [pe, p] : cert.edge_paths)
        for (EdgeId e : p.edges) wanted.insert(e);
    std::vector<EdgeId> to_delete;
    for (const auto& [id, ep] : host.edges())
        if (!wanted.count(id)) to_delete.push_back(id);
    for (EdgeId e : to_delete) {
        cur.remove_edge(e);
        carried.erase(e);
    }

    // lift each certificate path down to a single edge
    std::map<EdgeId, EdgeId> final_edge;  // pattern edge -> surviving edge of cur
    for (const auto& [pe, path] : cert.edge_paths) {
        EdgeId acc = path.edges[0];
        for (std::size_t i = 1; i < path.edges.size(); ++i) {
            EdgeId nxt = path.edges[i];
            LiftResult lifted = lift_pair(cur, acc, nxt);
            if (!lifted.created)
                throw Error(ErrorCode::InvalidCertificate, "lift collapsed to a loop");
            Path merged;
            const Path& pa = carried.at(acc);
            const Path& pb = carried.at(nxt);
            // join the carried walks at their shared endpoint
            VertexId join = (pa.back() == pb.front() || pa.back() == pb.back()) ? pa.back()
                                                                                : pa.front();
            Path left = (pa.back() == join) ? pa : pa.reversed();
            Path right = (pb.front() == join) ? pb : pb.reversed();
            merged.vertices = left.vertices;
            merged.vertices.insert(merged.vertices.end(), right.vertices.begin() + 1,
                                   right.vertices.end());
            merged.edges = left.edges;
            merged.edges.insert(merged.edges.end(), right.edges.begin(), right.edges.end());
            carried.erase(acc);
            carried.erase(nxt);
            carried[*lifted.created] = std::move(merged);
            cur = std::move(lifted.graph);
            acc = *lifted.created;
        }
        final_edge[pe] = acc;
    }

    MinorCertificate minor;
    minor.pattern = out.line_pattern;
    for (const auto& [pe, fe] : final_edge) {
        const Path& walk = carried.at(fe);
        minor.branch_sets[pe] = std::set<VertexId>(walk.edges.begin(), walk.edges.end());
    }
    // witnesses: pattern edges sharing a pattern vertex meet at the terminal,
    // where their carried walks end in distinct host edges
    std::map<std::pair<EdgeId, EdgeId>, EdgeId> line_edge_of;
    for (const auto& [id, ep] : out.line_host.edges()) {
        line_edge_of[{std::min(ep.first, ep.second), std::max(ep.first, ep.second)}] = id;
    }
    for (const auto& [le, ep] : out.line_pattern.edges()) {
        EdgeId pe1 = ep.first, pe2 = ep.second;  // line-pattern vertices are pattern edges
        auto [a1, b1] = cert.pattern.endpoints(pe1);
        auto [a2, b2] = cert.pattern.endpoints(pe2);
        VertexId shared = (a1 == a2 || a1 == b2) ? a1 : b1;
        VertexId hv = cert.terminal_map.at(shared);
        EdgeId h1 = end_edge_at(carried.at(final_edge.at(pe1)), hv);
        EdgeId h2 = end_edge_at(carried.at(final_edge.at(pe2)), hv);
        auto key = std::make_pair(std::min(h1, h2), std::max(h1, h2));
        auto it = line_edge_of.find(key);
        if (it == line_edge_of.end())
            throw Error(ErrorCode::InvalidCertificate, "missing line-host adjacency");
        minor.edge_witness[le] = it->second;
    }

    VerifyResult mv = verify_minor(out.line_host, minor);
    if (!mv.ok) throw Error(ErrorCode::InvalidCertificate, "transform output: " + mv.violation);
    out.minor = std::move(minor);
    return out;
}

bool stepwise_line_graph_invariant(const MultiGraph& host, const LiftingScript& script) {
    LineGraphResult lh = line_graph(host);

    MultiGraph cur = host;
    std::map<EdgeId, Path> carried;
    for (const auto& [id, ep] : host.edges())
        carried[id] = Path{{ep.first, ep.second}, {id}};

    auto check_state = [&]() -> bool {
        // carried walks partition their host edges
        std::set<EdgeId> seen;
        for (const auto& [e, walk] : carried) {
            if (!cur.has_edge(e)) return false;
            auto [a, b] = cur.endpoints(e);
            if (!((walk.front() == a && walk.back() == b) ||
                  (walk.front() == b && walk.back() == a)))
                return false;
            for (EdgeId he : walk.edges)
                if (!seen.insert(he).second) return false;
            // connected in L(host): consecutive walk edges share a vertex
            std::set<VertexId> lvs(walk.edges.begin(), walk.edges.end());
            if (!induced_subgraph(lh.graph, lvs).connected()) return false;
        }
        // one distinct witness adjacency per pair of adjacent working edges
        std::set<std::pair<EdgeId, EdgeId>> witnesses;
        for (auto it = cur.edges().begin(); it != cur.edges().end(); ++it)
            for (auto jt = std::next(it); jt != cur.edges().end(); ++jt) {
                auto [a1, b1] = it->second;
                auto [a2, b2] = jt->second;
                VertexId shared = -1;
                for (VertexId v : {a1, b1})
                    if (v == a2 || v == b2) {
                        shared = v;
                        break;
                    }
                if (shared < 0) continue;
                EdgeId h1 = end_edge_at(carried.at(it->first), shared);
                EdgeId h2 = end_edge_at(carried.at(jt->first), shared);
                if (h1 == h2) return false;
                if (lh.graph.parallel_count(h1, h2) != 1) return false;  // L(host) adjacency
                if (!witnesses.insert({std::min(h1, h2), std::max(h1, h2)}).second) return false;
            }
        return true;
    };

    if (!check_state()) return false;
    for (const LiftStep& st : script.steps) {
        switch (st.kind) {
            case LiftStep::DeleteEdge:
                cur.remove_edge(st.edge);
                carried.erase(st.edge);
                break;
            case LiftStep::DeleteIsolatedVertex:
                cur.remove_isolated_vertex(st.vertex);
                break;
            case LiftStep::LiftPair: {
                Path pa = carried.at(st.lift_e);
                Path pb = carried.at(st.lift_f);
                auto [eu, ev] = cur.endpoints(st.lift_e);
                auto [fu, fv] = cur.endpoints(st.lift_f);
                VertexId join = (eu == fu || eu == fv) ? eu : ev;  // lift_pair's choice
                LiftResult lifted = lift_pair(cur, st.lift_e, st.lift_f);
                carried.erase(st.lift_e);
                carried.erase(st.lift_f);
                if (lifted.created) {
                    Path left = (pa.back() == join) ? pa : pa.reversed();
                    Path right = (pb.front() == join) ? pb : pb.reversed();
                    Path merged;
                    merged.vertices = left.vertices;
                    merged.vertices.insert(merged.vertices.end(), right.vertices.begin() + 1,
                                           right.vertices.end());
                    merged.edges = left.edges;
                    merged.edges.insert(merged.edges.end(), right.edges.begin(), right.edges.end());
                    carried[*lifted.created] = std::move(merged);
                }
                cur = std::move(lifted.graph);
                break;
            }
        }
        if (!check_state()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Krausz clique cover and root recovery

namespace {

struct KrauszState {
    const MultiGraph& g;
    std::vector<std::set<VertexId>> cliques;
    std::map<VertexId, std::vector<int>> member_of;
    std::vector<std::pair<VertexId, VertexId>> edge_list;

    explicit KrauszState(const MultiGraph& graph) : g(graph) {
        for (const auto& [id, ep] : g.edges())
            edge_list.push_back({std::min(ep.first, ep.second), std::max(ep.first, ep.second)});
        std::sort(edge_list.begin(), edge_list.end());
        edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());
    }

    bool covered(VertexId u, VertexId v) const {
        auto iu = member_of.find(u);
        if (iu == member_of.end()) return false;
        for (int qi : iu->second)
            if (cliques[qi].count(v)) return true;
        return false;
    }

    int slots(VertexId v) const {
        auto it = member_of.find(v);
        return 2 - (it == member_of.end() ? 0 : static_cast<int>(it->second.size()));
    }

    bool extendable(int qi, VertexId v) const {
        if (slots(v) <= 0) return false;
        for (VertexId w : cliques[qi])
            if (g.parallel_count(v, w) == 0) return false;
        return true;
    }

    bool search(std::size_t from) {
        // first uncovered edge
        std::size_t at = from;
        while (at < edge_list.size() && covered(edge_list[at].first, edge_list[at].second)) ++at;
        if (at == edge_list.size()) return true;
        auto [u, v] = edge_list[at];

        for (int side = 0; side < 2; ++side) {
            VertexId a = side ? v : u, b = side ? u : v;
            auto it = member_of.find(a);
            if (it == member_of.end()) continue;
            for (int qi : it->second) {
                if (!extendable(qi, b)) continue;
                cliques[qi].insert(b);
                member_of[b].push_back(qi);
                if (search(at)) return true;
                member_of[b].pop_back();
                if (member_of[b].empty()) member_of.erase(b);
                cliques[qi].erase(b);
            }
        }
        if (slots(u) > 0 && slots(v) > 0) {
            cliques.push_back({u, v});
            int qi = static_cast<int>(cliques.size()) - 1;
            member_of[u].push_back(qi);
            member_of[v].push_back(qi);
            if (search(at)) return true;
            member_of[u].pop_back();
            if (member_of[u].empty()) member_of.erase(u);
            member_of[v].pop_back();
            if (member_of[v].empty()) member_of.erase(v);
            cliques.pop_back();
        }
        return false;
    }
};

}  // namespace

RootGraphResult root_graph(const MultiGraph& g, int ceiling) {
    if (static_cast<int>(g.vertex_count()) > ceiling)
        throw Error(ErrorCode::TooLarge, "root recovery ceiling exceeded");
    for (const auto& [id, ep] : g.edges())
        if (g.parallel_count(ep.first, ep.second) > 1)
            throw Error(ErrorCode::PreconditionViolated, "line graphs are simple");
    if (!g.connected()) throw Error(ErrorCode::PreconditionViolated, "need a connected graph");

    RootGraphResult out;
    if (g.vertex_count() == 1) {
        out.root.add_vertex(0);
        out.root.add_vertex(1);
        EdgeId e = out.root.add_edge(0, 1);
        out.vertex_to_root_edge[*g.vertices().begin()] = e;
        return out;
    }

    KrauszState state(g);
    if (!state.search(0)) throw Error(ErrorCode::NotALineGraph, "no Krausz clique cover exists");

    // root vertices: one per clique, plus a pendant for each singly-covered
    // g-vertex; each g-vertex becomes the root edge joining its cliques
    int next_root_vertex = 0;
    std::vector<VertexId> clique_vertex(state.cliques.size());
    for (std::size_t qi = 0; qi < state.cliques.size(); ++qi) {
        clique_vertex[qi] = next_root_vertex;
        out.root.add_vertex(next_root_vertex++);
    }
    for (VertexId v : g.vertices()) {
        const auto& qs = state.member_of.at(v);
        VertexId a, b;
        if (qs.size() == 2) {
            a = clique_vertex[qs[0]];
            b = clique_vertex[qs[1]];
        } else {
            a = clique_vertex[qs[0]];
            b = next_root_vertex;
            out.root.add_vertex(next_root_vertex++);
        }
        EdgeId e = out.root.add_edge(a, b);
        out.vertex_to_root_edge[v] = e;
    }

    // explicit-bijection check: adjacency in g must match clique sharing
    for (auto it = g.vertices().begin(); it != g.vertices().end(); ++it)
        for (auto jt = std::next(it); jt != g.vertices().end(); ++jt) {
            bool adj = g.parallel_count(*it, *jt) > 0;
            EdgeId e1 = out.vertex_to_root_edge.at(*it), e2 = out.vertex_to_root_edge.at(*jt);
            auto [a1, b1] = out.root.endpoints(e1);
            auto [a2, b2] = out.root.endpoints(e2);
            bool share = a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2;
            if (adj != share)
                throw Error(ErrorCode::NotFound, "root reconstruction failed the round-trip");
        }
    return out;
}

// ---------------------------------------------------------------------------
// High-connectivity line-graph analysis

AnalyzeResult analyze_line_graph(const MultiGraph& g, int t, int r, SearchBudget& budget) {
    AnalyzeResult out;
    if (t < 1 || r < 3) throw Error(ErrorCode::InvalidParams, "need t >= 1, r >= 3");

    RootGraphResult root;
    try {
        root = root_graph(g);
    } catch (const Error& e) {
        out.diagnostics.push_back(std::string("root recovery failed: ") + e.what());
        return out;
    }

    LineGraphAnalysis an;
    an.root = root.root;
    an.vertex_to_root_edge = root.vertex_to_root_edge;
    an.c = 15 * t - 6;
    for (VertexId v : an.root.vertices()) {
        an.max_degree = std::max(an.max_degree, an.root.degree(v));
        if (an.root.degree(v) >= an.c) an.s.insert(v);
    }
    an.connectivity_precondition = is_k_vertex_connected(g, 30 * t - 15);
    if (an.connectivity_precondition) {
        an.s_edge_connected =
            an.s.size() >= 2 ? set_k_edge_connected(an.root, an.s, an.c).ok : true;
        bool cover = true;
        for (const auto& [id, ep] : an.root.edges())
            if (!an.s.count(ep.first) && !an.s.count(ep.second)) cover = false;
        an.s_vertex_cover = cover;
        if (!an.s_edge_connected || !an.s_vertex_cover)
            out.diagnostics.push_back("input precondition failure: S checks did not hold");
    } else {
        out.diagnostics.push_back("connectivity precondition (" + std::to_string(30 * t - 15) +
                                  "-connected) not met; proceeding best-effort");
    }

    // degree-tr shortcut: a K_{tr} clique in g swallows any tr-vertex minor
    VertexId big = -1;
    for (VertexId v : an.root.vertices())
        if (an.root.degree(v) >= t * r) {
            big = v;
            break;
        }
    if (big >= 0) {
        std::map<EdgeId, VertexId> edge_to_vertex;
        for (const auto& [gv, re] : root.vertex_to_root_edge) edge_to_vertex[re] = gv;
        std::vector<VertexId> clique;
        for (EdgeId e : an.root.incident_edges(big)) clique.push_back(edge_to_vertex.at(e));
        std::sort(clique.begin(), clique.end());

        MinorCertificate cert;
        cert.pattern = line_graph(make_ctr_pattern(t, r)).graph;
        std::size_t i = 0;
        for (VertexId pv : cert.pattern.vertices()) cert.branch_sets[pv] = {clique[i++]};
        for (const auto& [pe, ep] : cert.pattern.edges()) {
            VertexId a = *cert.branch_sets[ep.first].begin();
            VertexId b = *cert.branch_sets[ep.second].begin();
            EdgeId found = -1;
            for (EdgeId e : g.incident_edges(a))
                if (g.other_end(e, a) == b) {
                    found = e;
                    break;
                }
            if (found < 0) throw Error(ErrorCode::NotFound, "clique edge missing");
            cert.edge_witness[pe] = found;
        }
        VerifyResult vr = verify_minor(g, cert);
        if (vr.ok) {
            out.diagnostics.push_back("K_tr shortcut via root vertex " + std::to_string(big));
            out.analysis = std::move(an);
            out.minor = std::move(cert);
            return out;
        }
        out.diagnostics.push_back("K_tr shortcut failed verification: " + vr.violation);
    }

    std::set<VertexId> pool = an.s;
    if (static_cast<int>(pool.size()) < r) {
        out.diagnostics.push_back("S smaller than r; widening terminal pool to V(H)");
        pool = an.root.vertices();
    }
    CtrSearchResult ctr = find_ctr_rooted(an.root, pool, t, r, budget);
    for (const std::string& st : ctr.stages) out.diagnostics.push_back("ctr: " + st);
    if (!ctr.cert) {
        out.analysis = std::move(an);
        return out;
    }

    ImmersionToMinorResult tr_res = immersion_to_minor(an.root, *ctr.cert);
    // relabel L(root) ids into g through the explicit bijection
    MinorCertificate relabeled;
    relabeled.pattern = tr_res.minor.pattern;
    for (const auto& [pv, bs] : tr_res.minor.branch_sets) {
        std::set<VertexId> mapped;
        for (VertexId hv : bs) {
            // hv is a root edge id; find the g vertex carrying it
            VertexId gv = -1;
            for (const auto& [cand, re] : root.vertex_to_root_edge)
                if (re == hv) {
                    gv = cand;
                    break;
                }
            if (gv < 0) throw Error(ErrorCode::NotFound, "root edge without a g vertex");
            mapped.insert(gv);
        }
        relabeled.branch_sets[pv] = std::move(mapped);
    }
    for (const auto& [pe, we] : tr_res.minor.edge_witness) {
        auto [e1, e2] = tr_res.line_host.endpoints(we);
        VertexId gv1 = -1, gv2 = -1;
        for (const auto& [cand, re] : root.vertex_to_root_edge) {
            if (re == e1) gv1 = cand;
            if (re == e2) gv2 = cand;
        }
        EdgeId found = -1;
        for (EdgeId e : g.incident_edges(gv1))
            if (g.other_end(e, gv1) == gv2) {
                found = e;
                break;
            }
        if (found < 0) throw Error(ErrorCode::NotFound, "line adjacency missing in g");
        relabeled.edge_witness[pe] = found;
    }
    VerifyResult vr = verify_minor(g, relabeled);
    if (!vr.ok) {
        out.diagnostics.push_back("relabeled certificate failed: " + vr.violation);
        out.analysis = std::move(an);
        return out;
    }
    out.analysis = std::move(an);
    out.minor = std::move(relabeled);
    return out;
}

}  // namespace imm
