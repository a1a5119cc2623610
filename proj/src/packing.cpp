#include "imm/packing.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "imm/lifting.hpp"

namespace imm {

namespace {

// Union-find over vertex ids.
struct Dsu {
    std::map<VertexId, VertexId> parent;
    VertexId find(VertexId v) {
        auto it = parent.find(v);
        if (it == parent.end()) {
            parent[v] = v;
            return v;
        }
        if (it->second == v) return v;
        return parent[v] = find(it->second);
    }
    bool unite(VertexId a, VertexId b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

VerifyResult verify_packing(const MultiGraph& g, const TreePacking& packing, bool steiner) {
    std::set<EdgeId> seen;
    for (std::size_t i = 0; i < packing.trees.size(); ++i) {
        const auto& tree = packing.trees[i];
        Dsu dsu;
        std::set<VertexId> tv;
        for (EdgeId e : tree) {
            if (!g.has_edge(e)) return {false, "tree edge not in host"};
            if (!seen.insert(e).second) return {false, "edge shared between trees"};
            auto [a, b] = g.endpoints(e);
            tv.insert(a);
            tv.insert(b);
            if (!dsu.unite(a, b)) return {false, "tree " + std::to_string(i) + " has a cycle"};
        }
        std::set<VertexId> need = packing.spanned;
        if (need.size() <= 1) continue;  // nothing to span, empty trees are fine
        if (steiner) {
            for (VertexId v : need)
                if (!tv.count(v))
                    return {false, "tree " + std::to_string(i) + " misses a terminal"};
        } else {
            if (tv != need) return {false, "tree " + std::to_string(i) + " does not span"};
        }
        // connectivity: edges == vertices - 1 for an acyclic graph means one piece
        if (!tv.empty() && tree.size() != tv.size() - 1)
            return {false, "tree " + std::to_string(i) + " disconnected"};
    }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// Matroid-union spanning tree packing

namespace {

struct ForestState {
    const MultiGraph& g;
    int s;
    std::vector<std::set<EdgeId>> forests;
    std::map<EdgeId, int> forest_of;  // -1 when free

    explicit ForestState(const MultiGraph& graph, int count) : g(graph), s(count), forests(count) {
        for (const auto& [id, ep] : g.edges()) forest_of[id] = -1;
    }

    std::map<VertexId, VertexId> component_labels(int i) const {
        Dsu dsu;
        for (VertexId v : g.vertices()) dsu.find(v);
        for (EdgeId e : forests[i]) {
            auto [a, b] = g.endpoints(e);
            dsu.unite(a, b);
        }
        std::map<VertexId, VertexId> label;
        for (VertexId v : g.vertices()) label[v] = dsu.find(v);
        return label;
    }

    // Path between u and v inside forest i, as edge list (empty if none).
    std::vector<EdgeId> forest_path(int i, VertexId u, VertexId v) const {
        std::map<VertexId, EdgeId> via;
        std::deque<VertexId> queue{u};
        via[u] = -1;
        while (!queue.empty()) {
            VertexId x = queue.front();
            queue.pop_front();
            if (x == v) break;
            for (EdgeId e : g.incident_edges(x)) {
                if (forest_of.at(e) != i) continue;
                VertexId y = g.other_end(e, x);
                if (via.count(y)) continue;
                via[y] = e;
                queue.push_back(y);
            }
        }
        std::vector<EdgeId> path;
        if (!via.count(v)) return path;
        for (VertexId x = v; x != u;) {
            EdgeId e = via[x];
            path.push_back(e);
            x = g.other_end(e, x);
        }
        return path;
    }

    // Augmenting search in the exchange structure. On success the swap chain
    // is applied and the union grows by one edge; on failure the scanned edge
    // set is reported (it seeds the deficiency witness).
    bool try_augment(EdgeId e0, std::set<EdgeId>* scanned_out) {
        std::map<EdgeId, std::pair<EdgeId, int>> parent;  // edge -> (who wants its slot, forest)
        std::deque<EdgeId> queue{e0};
        parent[e0] = {-1, -1};

        std::vector<std::map<VertexId, VertexId>> labels(s);
        for (int i = 0; i < s; ++i) labels[i] = component_labels(i);

        while (!queue.empty()) {
            EdgeId f = queue.front();
            queue.pop_front();
            auto [fu, fv] = g.endpoints(f);
            for (int i = 0; i < s; ++i) {
                if (forest_of.at(f) == i) continue;
                if (labels[i].at(fu) != labels[i].at(fv)) {
                    // place f in forest i, then unwind the chain
                    EdgeId cur = f;
                    int target = i;
                    for (;;) {
                        int old = forest_of.at(cur);
                        if (old >= 0) forests[old].erase(cur);
                        forests[target].insert(cur);
                        forest_of[cur] = target;
                        auto [p, pf] = parent.at(cur);
                        if (p < 0) break;
                        cur = p;
                        target = old;  // the freed slot is in cur's old forest
                    }
                    return true;
                }
                for (EdgeId h : forest_path(i, fu, fv))
                    if (!parent.count(h)) {
                        parent[h] = {f, i};
                        queue.push_back(h);
                    }
            }
        }
        if (scanned_out)
            for (const auto& [e, pr] : parent) scanned_out->insert(e);
        return false;
    }
};

}  // namespace

SpanningPackResult pack_spanning_trees(const MultiGraph& g, int s) {
    if (s < 1) throw Error(ErrorCode::InvalidParams, "need s >= 1 trees");
    if (!g.connected() || g.vertex_count() < 2) {
        // trivially infeasible unless the graph is a single vertex
        if (g.vertex_count() <= 1) {
            TreePacking packing;
            packing.spanned = g.vertices();
            packing.trees.assign(s, {});
            return {packing, std::nullopt};
        }
    }

    ForestState state(g, s);
    for (const auto& [id, ep] : g.edges()) state.try_augment(id, nullptr);

    std::size_t need = g.vertex_count() - 1;
    bool full = true;
    for (int i = 0; i < s; ++i)
        if (state.forests[i].size() != need) full = false;

    if (full) {
        TreePacking packing;
        packing.spanned = g.vertices();
        packing.trees = state.forests;
        VerifyResult vr = verify_packing(g, packing, false);
        if (!vr.ok) throw Error(ErrorCode::NotFound, "packing failed self-check: " + vr.violation);
        return {std::move(packing), std::nullopt};
    }

    // Deficient partition: merge endpoints of every edge scanned in a failed
    // search. Inside each resulting part every forest is connected, so a
    // non-spanning forest forces fewer than s(|P| - 1) crossing edges.
    Dsu dsu;
    for (VertexId v : g.vertices()) dsu.find(v);
    for (const auto& [id, ep] : g.edges()) {
        if (state.forest_of.at(id) >= 0) continue;
        std::set<EdgeId> scanned;
        if (state.try_augment(id, &scanned))
            throw Error(ErrorCode::NotFound, "saturated packing accepted an edge");
        scanned.insert(id);
        for (EdgeId e : scanned) {
            auto [a, b] = g.endpoints(e);
            dsu.unite(a, b);
        }
    }
    std::map<VertexId, std::set<VertexId>> parts;
    for (VertexId v : g.vertices()) parts[dsu.find(v)].insert(v);
    std::vector<std::set<VertexId>> partition;
    for (auto& [root, part] : parts) partition.push_back(std::move(part));

    long cross = 0;
    for (const auto& [id, ep] : g.edges())
        if (dsu.find(ep.first) != dsu.find(ep.second)) ++cross;
    if (cross >= static_cast<long>(s) * (static_cast<long>(partition.size()) - 1))
        throw Error(ErrorCode::NotFound, "witness partition is not deficient");
    return {std::nullopt, std::move(partition)};
}

// ---------------------------------------------------------------------------
// Steiner tree packing (heuristic + verifier)

namespace {

struct SteinerRound {
    std::set<EdgeId> tree;
    std::set<VertexId> tree_vertices;
};

// Grow one S-tree in the free graph, stealing swappable edges from earlier
// trees when growth stalls.
bool grow_steiner_tree(const MultiGraph& g, const std::set<VertexId>& s,
                       std::set<EdgeId>& free_edges, std::vector<std::set<EdgeId>>& earlier,
                       std::set<EdgeId>& out_tree, VertexId root) {
    std::set<VertexId> reached{root};
    std::set<EdgeId> tree;
    std::set<VertexId> todo;
    for (VertexId v : s)
        if (v != root) todo.insert(v);

    int swap_budget = static_cast<int>(g.edge_count());
    while (!todo.empty()) {
        // BFS from the tree over free edges
        std::map<VertexId, std::pair<EdgeId, VertexId>> via;
        std::deque<VertexId> queue(reached.begin(), reached.end());
        std::set<VertexId> seen = reached;
        VertexId hit = -1;
        while (!queue.empty() && hit < 0) {
            VertexId v = queue.front();
            queue.pop_front();
            for (EdgeId e : g.incident_edges(v)) {
                if (!free_edges.count(e)) continue;
                VertexId w = g.other_end(e, v);
                if (seen.count(w)) continue;
                seen.insert(w);
                via[w] = {e, v};
                if (todo.count(w)) {
                    hit = w;
                    break;
                }
                queue.push_back(w);
            }
        }
        if (hit >= 0) {
            for (VertexId x = hit; !reached.count(x);) {
                auto [e, from] = via.at(x);
                tree.insert(e);
                free_edges.erase(e);
                reached.insert(x);
                x = from;
            }
            todo.erase(hit);
            continue;
        }
        // stalled: look for a stealable edge on the frontier of the reachable
        // region; stealing is allowed when the donor tree can reconnect with
        // a free edge elsewhere
        bool stole = false;
        for (std::size_t ti = 0; ti < earlier.size() && !stole && swap_budget > 0; ++ti) {
            for (EdgeId e : earlier[ti]) {
                auto [a, b] = g.endpoints(e);
                bool ina = seen.count(a) > 0, inb = seen.count(b) > 0;
                if (ina == inb) continue;
                // does removing e leave the donor reconnectable?
                std::set<EdgeId> donor = earlier[ti];
                donor.erase(e);
                Dsu dsu;
                for (EdgeId t : donor) {
                    auto [x, y] = g.endpoints(t);
                    dsu.unite(x, y);
                }
                EdgeId patch = -1;
                for (EdgeId cand : free_edges) {
                    auto [x, y] = g.endpoints(cand);
                    if (dsu.find(g.endpoints(e).first) == dsu.find(g.endpoints(e).second)) break;
                    bool xa = dsu.find(x) == dsu.find(g.endpoints(e).first);
                    bool yb = dsu.find(y) == dsu.find(g.endpoints(e).second);
                    bool xb = dsu.find(x) == dsu.find(g.endpoints(e).second);
                    bool ya = dsu.find(y) == dsu.find(g.endpoints(e).first);
                    if ((xa && yb) || (xb && ya)) {
                        patch = cand;
                        break;
                    }
                }
                if (patch < 0) continue;
                earlier[ti].erase(e);
                earlier[ti].insert(patch);
                free_edges.erase(patch);
                free_edges.insert(e);
                --swap_budget;
                stole = true;
                break;
            }
        }
        if (!stole) return false;
    }

    // prune leaves outside S
    for (;;) {
        std::map<VertexId, std::vector<EdgeId>> deg;
        for (EdgeId e : tree) {
            auto [a, b] = g.endpoints(e);
            deg[a].push_back(e);
            deg[b].push_back(e);
        }
        bool pruned = false;
        for (const auto& [v, es] : deg)
            if (es.size() == 1 && !s.count(v)) {
                tree.erase(es[0]);
                free_edges.insert(es[0]);
                pruned = true;
            }
        if (!pruned) break;
    }
    out_tree = std::move(tree);
    return true;
}

}  // namespace

SteinerPackResult pack_steiner_trees(const MultiGraph& g, const std::set<VertexId>& s, int k) {
    if (s.size() < 2) throw Error(ErrorCode::PreconditionViolated, "need |S| >= 2");
    for (VertexId v : s)
        if (!g.has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "terminal not in graph");

    if (s == g.vertices()) {
        SpanningPackResult sp = pack_spanning_trees(g, k);
        SteinerPackResult out;
        out.packing.spanned = s;
        if (sp.packing) {
            out.packing.trees = sp.packing->trees;
            out.complete = true;
        } else {
            out.diagnostics = "spanning packing infeasible";
        }
        return out;
    }

    SteinerPackResult out;
    out.packing.spanned = s;
    std::set<EdgeId> free_edges;
    for (const auto& [id, ep] : g.edges()) free_edges.insert(id);

    std::vector<VertexId> roots(s.begin(), s.end());
    for (int round = 0; round < k; ++round) {
        std::set<EdgeId> tree;
        bool ok = false;
        for (std::size_t attempt = 0; attempt < roots.size() && !ok; ++attempt) {
            std::set<EdgeId> saved_free = free_edges;
            std::vector<std::set<EdgeId>> saved_trees = out.packing.trees;
            ok = grow_steiner_tree(g, s, free_edges, out.packing.trees, tree,
                                   roots[(round + attempt) % roots.size()]);
            if (!ok) {
                free_edges = std::move(saved_free);
                out.packing.trees = std::move(saved_trees);
            }
        }
        if (!ok) {
            out.diagnostics = "stalled after " + std::to_string(round) + " of " +
                              std::to_string(k) + " trees";
            break;
        }
        out.packing.trees.push_back(std::move(tree));
    }
    out.complete = static_cast<int>(out.packing.trees.size()) == k;
    VerifyResult vr = verify_packing(g, out.packing, true);
    if (!vr.ok) throw Error(ErrorCode::NotFound, "steiner packing self-check: " + vr.violation);
    return out;
}

// ---------------------------------------------------------------------------
// Comb / star / path extraction

namespace {

std::vector<VertexId> tree_path_vertices(const MultiGraph& tree, VertexId from, VertexId to) {
    std::map<VertexId, VertexId> parent;
    std::deque<VertexId> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        if (v == to) break;
        for (EdgeId e : tree.incident_edges(v)) {
            VertexId w = tree.other_end(e, v);
            if (!parent.count(w)) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    if (!parent.count(to)) throw Error(ErrorCode::NotFound, "tree path missing");
    std::vector<VertexId> out;
    for (VertexId v = to;; v = parent[v]) {
        out.push_back(v);
        if (v == from) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

Path tree_path(const MultiGraph& tree, VertexId from, VertexId to) {
    std::vector<VertexId> vs = tree_path_vertices(tree, from, to);
    Path p;
    p.vertices = vs;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        EdgeId found = -1;
        for (EdgeId e : tree.incident_edges(vs[i]))
            if (tree.other_end(e, vs[i]) == vs[i + 1]) {
                found = e;
                break;
            }
        p.edges.push_back(found);
    }
    return p;
}

std::vector<VertexId> tree_leaves(const MultiGraph& tree) {
    std::vector<VertexId> out;
    for (VertexId v : tree.vertices())
        if (tree.degree(v) == 1) out.push_back(v);
    return out;
}

// Minimal subtree spanning the marked set (iteratively prune unmarked leaves).
MultiGraph steiner_core(const MultiGraph& tree, const std::set<VertexId>& x) {
    MultiGraph core = tree;
    for (;;) {
        bool pruned = false;
        std::vector<VertexId> vs(core.vertices().begin(), core.vertices().end());
        for (VertexId v : vs)
            if (core.degree(v) <= 1 && !x.count(v)) {
                std::vector<EdgeId> es(core.incident_edges(v).begin(), core.incident_edges(v).end());
                for (EdgeId e : es) core.remove_edge(e);
                core.remove_isolated_vertex(v);
                pruned = true;
            }
        if (!pruned) break;
    }
    return core;
}

struct StarFind {
    int count = 0;
    VertexId center = -1;
    std::vector<Path> legs;  // one per marked branch, ordered
};

StarFind max_star(const MultiGraph& core, const std::set<VertexId>& x) {
    StarFind best;
    for (VertexId v : core.vertices()) {
        std::vector<Path> legs;
        for (EdgeId e : core.incident_edges(v)) {
            // nearest marked vertex inside this branch
            VertexId start = core.other_end(e, v);
            std::map<VertexId, std::pair<EdgeId, VertexId>> via;
            std::deque<VertexId> queue{start};
            via[start] = {e, v};
            VertexId hit = x.count(start) ? start : -1;
            while (!queue.empty() && hit < 0) {
                VertexId w = queue.front();
                queue.pop_front();
                for (EdgeId e2 : core.incident_edges(w)) {
                    VertexId u = core.other_end(e2, w);
                    if (u == v || via.count(u)) continue;
                    via[u] = {e2, w};
                    if (x.count(u)) {
                        hit = u;
                        break;
                    }
                    queue.push_back(u);
                }
            }
            if (hit < 0) continue;
            Path leg;
            std::vector<VertexId> rv;
            std::vector<EdgeId> re;
            for (VertexId w = hit; w != v;) {
                auto [pe, pw] = via.at(w);
                rv.push_back(w);
                re.push_back(pe);
                w = pw;
            }
            rv.push_back(v);
            std::reverse(rv.begin(), rv.end());
            std::reverse(re.begin(), re.end());
            leg.vertices = rv;
            leg.edges = re;
            legs.push_back(std::move(leg));
        }
        if (static_cast<int>(legs.size()) > best.count) {
            best.count = static_cast<int>(legs.size());
            best.center = v;
            best.legs = std::move(legs);
        }
    }
    return best;
}

struct CombFind {
    int count = 0;                  // teeth
    Path spine;
    std::vector<Path> teeth;        // ordered along the spine
    std::vector<VertexId> leaves;   // end, teeth tips..., end
};

CombFind max_comb(const MultiGraph& core, const std::set<VertexId>& x) {
    CombFind best;
    std::vector<VertexId> leaves = tree_leaves(core);
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b) {
            if (!x.count(leaves[a]) || !x.count(leaves[b])) continue;
            Path spine = tree_path(core, leaves[a], leaves[b]);
            std::set<VertexId> on_spine(spine.vertices.begin(), spine.vertices.end());
            std::vector<Path> teeth;
            for (std::size_t i = 1; i + 1 < spine.vertices.size(); ++i) {
                VertexId p = spine.vertices[i];
                // nearest marked vertex hanging off the spine at p
                std::map<VertexId, std::pair<EdgeId, VertexId>> via;
                std::deque<VertexId> queue;
                VertexId hit = -1;
                for (EdgeId e : core.incident_edges(p)) {
                    VertexId w = core.other_end(e, p);
                    if (on_spine.count(w)) continue;
                    via[w] = {e, p};
                    if (x.count(w)) {
                        hit = w;
                        break;
                    }
                    queue.push_back(w);
                }
                while (!queue.empty() && hit < 0) {
                    VertexId w = queue.front();
                    queue.pop_front();
                    for (EdgeId e2 : core.incident_edges(w)) {
                        VertexId u = core.other_end(e2, w);
                        if (on_spine.count(u) || via.count(u)) continue;
                        via[u] = {e2, w};
                        if (x.count(u)) {
                            hit = u;
                            break;
                        }
                        queue.push_back(u);
                    }
                }
                if (hit < 0) continue;
                Path tooth;
                std::vector<VertexId> rv;
                std::vector<EdgeId> re;
                for (VertexId w = hit; w != p;) {
                    auto [pe, pw] = via.at(w);
                    rv.push_back(w);
                    re.push_back(pe);
                    w = pw;
                }
                rv.push_back(p);
                std::reverse(rv.begin(), rv.end());
                std::reverse(re.begin(), re.end());
                tooth.vertices = rv;
                tooth.edges = re;
                teeth.push_back(std::move(tooth));
            }
            if (static_cast<int>(teeth.size()) > best.count) {
                best.count = static_cast<int>(teeth.size());
                best.spine = spine;
                best.teeth = teeth;
                best.leaves.clear();
                best.leaves.push_back(spine.front());
                for (const Path& tooth : teeth) best.leaves.push_back(tooth.back());
                best.leaves.push_back(spine.back());
            }
        }
    return best;
}

struct PathFind {
    int count = 0;
    Path path;
    std::vector<VertexId> marked;  // in path order
};

PathFind max_marked_path(const MultiGraph& core, const std::set<VertexId>& x) {
    PathFind best;
    std::vector<VertexId> leaves = tree_leaves(core);
    if (core.vertex_count() == 1) {
        VertexId v = *core.vertices().begin();
        best.path = Path{{v}, {}};
        if (x.count(v)) {
            best.count = 1;
            best.marked = {v};
        }
        return best;
    }
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b) {
            Path p = tree_path(core, leaves[a], leaves[b]);
            std::vector<VertexId> marked;
            for (VertexId v : p.vertices)
                if (x.count(v)) marked.push_back(v);
            if (static_cast<int>(marked.size()) > best.count) {
                best.count = static_cast<int>(marked.size());
                best.path = std::move(p);
                best.marked = std::move(marked);
            }
        }
    return best;
}

}  // namespace

VerifyResult verify_comb_structure(const MultiGraph& tree, const CombStructure& c,
                                   const std::set<VertexId>& x, int t) {
    for (EdgeId e : c.edges)
        if (!tree.has_edge(e)) return {false, "structure edge not in tree"};
    switch (c.kind) {
        case CombStructure::Kind::PathShape: {
            if (!c.spine.valid_in(tree) || !c.spine.vertex_simple()) return {false, "bad spine"};
            int marked = 0;
            for (VertexId v : c.spine.vertices)
                if (x.count(v)) ++marked;
            if (marked < t) return {false, "path carries too few marked vertices"};
            break;
        }
        case CombStructure::Kind::StarShape: {
            if (static_cast<int>(c.teeth.size()) < t) return {false, "star has too few legs"};
            std::set<VertexId> interior;
            for (const Path& leg : c.teeth) {
                if (leg.front() != c.center) return {false, "leg does not start at center"};
                if (!x.count(leg.back())) return {false, "star leaf outside X"};
                for (std::size_t i = 1; i < leg.vertices.size(); ++i)
                    if (!interior.insert(leg.vertices[i]).second)
                        return {false, "star legs overlap"};
            }
            break;
        }
        case CombStructure::Kind::CombShape: {
            if (static_cast<int>(c.teeth.size()) < t) return {false, "comb has too few teeth"};
            if (!x.count(c.spine.front()) || !x.count(c.spine.back()))
                return {false, "comb spine ends outside X"};
            std::set<VertexId> spine_set(c.spine.vertices.begin(), c.spine.vertices.end());
            std::set<VertexId> used;
            for (const Path& tooth : c.teeth) {
                if (!spine_set.count(tooth.front())) return {false, "tooth misses the spine"};
                if (!x.count(tooth.back())) return {false, "tooth tip outside X"};
                for (std::size_t i = 1; i < tooth.vertices.size(); ++i) {
                    if (spine_set.count(tooth.vertices[i])) return {false, "tooth re-enters spine"};
                    if (!used.insert(tooth.vertices[i]).second) return {false, "teeth overlap"};
                }
            }
            break;
        }
    }
    return {true, ""};
}

CombStructure comb_or_star(const MultiGraph& tree, const std::set<VertexId>& x, int t) {
    if (tree.vertex_count() == 0 || tree.edge_count() != tree.vertex_count() - 1 || !tree.connected())
        throw Error(ErrorCode::PreconditionViolated, "input is not a tree");
    for (VertexId v : x)
        if (!tree.has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "marked vertex missing");
    if (t < 1) throw Error(ErrorCode::InvalidParams, "need t >= 1");

    MultiGraph core = steiner_core(tree, x);

    StarFind star = max_star(core, x);
    if (star.count >= t) {
        CombStructure c;
        c.kind = CombStructure::Kind::StarShape;
        c.center = star.center;
        for (int i = 0; i < t; ++i) {
            c.teeth.push_back(star.legs[i]);
            c.marked.push_back(star.legs[i].back());
            c.edges.insert(star.legs[i].edges.begin(), star.legs[i].edges.end());
        }
        return c;
    }
    CombFind comb = max_comb(core, x);
    if (comb.count >= t) {
        CombStructure c;
        c.kind = CombStructure::Kind::CombShape;
        c.spine = comb.spine;
        c.edges.insert(comb.spine.edges.begin(), comb.spine.edges.end());
        for (int i = 0; i < comb.count; ++i) {
            c.teeth.push_back(comb.teeth[i]);
            c.edges.insert(comb.teeth[i].edges.begin(), comb.teeth[i].edges.end());
        }
        c.marked = comb.leaves;
        return c;
    }
    PathFind path = max_marked_path(core, x);
    if (path.count >= t) {
        CombStructure c;
        c.kind = CombStructure::Kind::PathShape;
        c.spine = path.path;
        c.edges.insert(path.path.edges.begin(), path.path.edges.end());
        c.marked = path.marked;
        return c;
    }
    throw Error(ErrorCode::TooFewMarked, "no structure reaches t = " + std::to_string(t));
}

// ---------------------------------------------------------------------------
// Gauge augmentation

namespace {

struct CyclicCert {
    int p = 0, m = 0;
    std::vector<VertexId> order;             // host terminals in cyclic order
    std::map<VertexId, int> pos;             // host terminal -> cyclic index
    std::vector<std::vector<Path>> lanes;    // lanes[i][l]: l-th path between order[i], order[i+1]
};

CyclicCert read_cyclic(const MultiGraph& host, const ImmersionCertificate& c) {
    std::ignore = host;
    CyclicCert out;
    out.m = static_cast<int>(c.pattern.vertex_count());
    if (out.m < 3) throw Error(ErrorCode::PreconditionViolated, "need a cycle of length >= 3");
    out.p = static_cast<int>(c.pattern.edge_count()) / out.m;
    if (!pattern_is_ctr(c.pattern, out.p, out.m))
        throw Error(ErrorCode::PreconditionViolated, "certificate pattern is not C_{p,m}");

    // walk the pattern cycle
    std::vector<VertexId> pattern_order;
    VertexId start = *c.pattern.vertices().begin();
    VertexId prev = -1, cur = start;
    do {
        pattern_order.push_back(cur);
        std::set<VertexId> nb = c.pattern.neighbors(cur);
        VertexId nxt = -1;
        for (VertexId w : nb)
            if (w != prev) {
                nxt = w;
                break;
            }
        prev = cur;
        cur = nxt;
    } while (cur != start && static_cast<int>(pattern_order.size()) <= out.m);

    out.lanes.resize(out.m);
    for (int i = 0; i < out.m; ++i) {
        VertexId pa = pattern_order[i], pb = pattern_order[(i + 1) % out.m];
        out.order.push_back(c.terminal_map.at(pa));
        std::vector<EdgeId> between;
        for (const auto& [id, ep] : c.pattern.edges())
            if ((ep.first == pa && ep.second == pb) || (ep.first == pb && ep.second == pa))
                between.push_back(id);
        for (EdgeId pe : between) {
            Path path = c.edge_paths.at(pe);
            if (path.front() != c.terminal_map.at(pa)) path = path.reversed();
            out.lanes[i].push_back(std::move(path));
        }
    }
    for (int i = 0; i < out.m; ++i) out.pos[out.order[i]] = i;
    return out;
}

// p edge-disjoint host paths running the cyclic arc from index a to index b
// in direction dir.
std::vector<Path> arc_lanes(const CyclicCert& cc, int a, int b, int dir) {
    std::vector<Path> out;
    for (int lane = 0; lane < cc.p; ++lane) {
        std::vector<VertexId> vs;
        std::vector<EdgeId> es;
        int i = a;
        vs.push_back(cc.order[a]);
        while (i != b) {
            int seg = dir > 0 ? i : (i - 1 + cc.m) % cc.m;
            Path piece = cc.lanes[seg][lane];
            if (piece.front() != vs.back()) piece = piece.reversed();
            vs.insert(vs.end(), piece.vertices.begin() + 1, piece.vertices.end());
            es.insert(es.end(), piece.edges.begin(), piece.edges.end());
            i = (i + dir + cc.m) % cc.m;
        }
        Path walk;
        walk.vertices = std::move(vs);
        walk.edges = std::move(es);
        // shortcut to a vertex-simple path
        Path simple;
        std::map<VertexId, std::size_t> seen;
        simple.vertices.push_back(walk.vertices[0]);
        seen[walk.vertices[0]] = 0;
        for (std::size_t k = 0; k < walk.edges.size(); ++k) {
            VertexId nxt = walk.vertices[k + 1];
            auto it = seen.find(nxt);
            if (it != seen.end()) {
                while (simple.vertices.size() > it->second + 1) {
                    seen.erase(simple.vertices.back());
                    simple.vertices.pop_back();
                    simple.edges.pop_back();
                }
            } else {
                simple.vertices.push_back(nxt);
                simple.edges.push_back(walk.edges[k]);
                seen[nxt] = simple.vertices.size() - 1;
            }
        }
        out.push_back(std::move(simple));
    }
    return out;
}

// Longest subsequence whose cyclic positions are monotone on some arc.
std::vector<VertexId> longest_cyclic_monotone(const std::vector<VertexId>& seq,
                                              const std::map<VertexId, int>& pos, int m) {
    std::vector<VertexId> best;
    for (int cut = 0; cut < m; ++cut)
        for (int dir = 0; dir < 2; ++dir) {
            std::vector<int> keys;
            for (VertexId v : seq) {
                int p = (pos.at(v) - cut + m) % m;
                keys.push_back(dir ? m - 1 - p : p);
            }
            // strict LIS with parent tracking
            std::size_t n = keys.size();
            std::vector<int> len(n, 1), par(n, -1);
            std::size_t besti = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < i; ++j)
                    if (keys[j] < keys[i] && len[j] + 1 > len[i]) {
                        len[i] = len[j] + 1;
                        par[i] = static_cast<int>(j);
                    }
                if (len[i] > len[besti]) besti = i;
            }
            if (len[besti] > static_cast<int>(best.size())) {
                std::vector<VertexId> chain;
                for (int i = static_cast<int>(besti); i >= 0; i = par[i]) chain.push_back(seq[i]);
                std::reverse(chain.begin(), chain.end());
                best = std::move(chain);
            }
        }
    return best;
}

MultiGraph tree_from_edges(const MultiGraph& host, const std::set<EdgeId>& edges) {
    MultiGraph t = edge_subgraph(host, edges);
    if (!t.connected() || t.edge_count() != t.vertex_count() - 1)
        throw Error(ErrorCode::PreconditionViolated, "edge set is not a tree");
    return t;
}

struct MarkedSeq {
    bool star = false;
    std::vector<VertexId> seq;  // leaves in structure order (arbitrary for stars)
};

// Widest star or comb of the tree over the marked set; the leaf sequence is
// what the gauge connectors consume.
MarkedSeq best_leaf_sequence(const MultiGraph& tree, const std::set<VertexId>& marked) {
    MultiGraph core = steiner_core(tree, marked);
    StarFind s = max_star(core, marked);
    CombFind c = max_comb(core, marked);
    MarkedSeq out;
    if (s.count >= static_cast<int>(c.leaves.size())) {
        out.star = true;
        for (const Path& leg : s.legs) out.seq.push_back(leg.back());
    } else {
        out.star = false;
        out.seq = c.leaves;
    }
    return out;
}

ImmersionCertificate assemble_cycle(const MultiGraph& host, int p1,
                                    const std::vector<VertexId>& terms,
                                    const std::vector<std::vector<Path>>& per_pair) {
    int n = static_cast<int>(terms.size());
    ImmersionCertificate cert;
    cert.pattern = make_ctr_pattern(p1, n);
    for (int i = 0; i < n; ++i) cert.terminal_map[i] = terms[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p1; ++j) cert.edge_paths[i * p1 + j] = per_pair[i][j];
    VerifyResult vr = verify_immersion(host, cert);
    if (!vr.ok) throw Error(ErrorCode::InvalidCertificate, "gauge assembly: " + vr.violation);
    return cert;
}

}  // namespace

ImmersionCertificate gauge_augment(const MultiGraph& host, const ImmersionCertificate& c,
                                   const std::set<EdgeId>& ta, const std::set<EdgeId>& tb,
                                   const std::set<EdgeId>& tc, int n) {
    if (n < 3) throw Error(ErrorCode::InvalidParams, "need n >= 3");
    VerifyResult vr = verify_immersion(host, c);
    if (!vr.ok) throw Error(ErrorCode::PreconditionViolated, "C invalid: " + vr.violation);
    CyclicCert cc = read_cyclic(host, c);

    std::set<EdgeId> c_edges;
    for (const auto& [pe, path] : c.edge_paths) c_edges.insert(path.edges.begin(), path.edges.end());
    const std::set<EdgeId>* tree_sets[3] = {&ta, &tb, &tc};
    for (int i = 0; i < 3; ++i) {
        for (EdgeId e : *tree_sets[i]) {
            if (c_edges.count(e))
                throw Error(ErrorCode::PreconditionViolated, "tree shares an edge with C");
            for (int j = i + 1; j < 3; ++j)
                if (tree_sets[j]->count(e))
                    throw Error(ErrorCode::PreconditionViolated, "trees share an edge");
        }
    }
    std::set<VertexId> x(cc.order.begin(), cc.order.end());
    MultiGraph trees[3] = {tree_from_edges(host, ta), tree_from_edges(host, tb),
                           tree_from_edges(host, tc)};
    for (const MultiGraph& t : trees)
        for (VertexId v : x)
            if (!t.has_vertex(v))
                throw Error(ErrorCode::PreconditionViolated, "tree does not span the terminals");

    // Case 1: some tree holds a path whose marked vertices admit a long
    // cyclically monotone run; the next tree closes the cycle.
    for (int ti = 0; ti < 3; ++ti) {
        PathFind pf = max_marked_path(steiner_core(trees[ti], x), x);
        if (pf.count < n) continue;
        std::vector<VertexId> ys = longest_cyclic_monotone(pf.marked, cc.pos, cc.m);
        if (static_cast<int>(ys.size()) < n) continue;
        ys.resize(n);
        int dir = 1;
        if (n >= 2) {
            int d = (cc.pos.at(ys[1]) - cc.pos.at(ys[0]) + cc.m) % cc.m;
            // monotone either way round the cycle; pick the consistent step
            int span_fwd = 0, span_bwd = 0;
            for (int i = 0; i + 1 < n; ++i) {
                span_fwd += (cc.pos.at(ys[i + 1]) - cc.pos.at(ys[i]) + cc.m) % cc.m;
                span_bwd += (cc.pos.at(ys[i]) - cc.pos.at(ys[i + 1]) + cc.m) % cc.m;
            }
            dir = span_fwd <= span_bwd ? 1 : -1;
            std::ignore = d;
        }
        int closer = (ti + 1) % 3;
        std::vector<std::vector<Path>> per_pair(n);
        for (int i = 0; i < n; ++i) {
            int a = cc.pos.at(ys[i]), b = cc.pos.at(ys[(i + 1) % n]);
            per_pair[i] = arc_lanes(cc, a, b, dir);
            Path extra = (i + 1 < n) ? pf.path.subpath(ys[i], ys[i + 1])
                                     : tree_path(trees[closer], ys[n - 1], ys[0]);
            per_pair[i].push_back(std::move(extra));
        }
        return assemble_cycle(host, cc.p + 1, ys, per_pair);
    }

    // Case 2: comb/star in the first tree, comb/star of its leaves in the
    // second, alternating connectors, third tree closes.
    MarkedSeq k = best_leaf_sequence(trees[0], x);
    std::vector<VertexId> y_seq = k.seq;
    if (!k.star)
        y_seq = longest_cyclic_monotone(y_seq, cc.pos, cc.m);
    else
        std::sort(y_seq.begin(), y_seq.end(),
                  [&](VertexId a, VertexId b) { return cc.pos.at(a) < cc.pos.at(b); });
    if (static_cast<int>(y_seq.size()) < n)
        throw Error(ErrorCode::BudgetExceeded, "first tree yields too few aligned leaves");

    std::set<VertexId> y_set(y_seq.begin(), y_seq.end());
    std::map<VertexId, int> y_rank;
    for (std::size_t i = 0; i < y_seq.size(); ++i) y_rank[y_seq[i]] = static_cast<int>(i);

    MarkedSeq j = best_leaf_sequence(trees[1], y_set);
    std::vector<VertexId> z_seq = j.seq;
    if (!j.star) {
        // keep z monotone in both structures: LIS over y-rank along j's order
        std::map<VertexId, int> rank_pos;
        for (VertexId v : z_seq) rank_pos[v] = y_rank.at(v);
        std::vector<VertexId> inc, dec;
        {
            std::size_t L = z_seq.size();
            std::vector<int> len(L, 1), par(L, -1);
            std::size_t besti = 0;
            for (std::size_t i2 = 0; i2 < L; ++i2) {
                for (std::size_t j2 = 0; j2 < i2; ++j2)
                    if (rank_pos[z_seq[j2]] < rank_pos[z_seq[i2]] && len[j2] + 1 > len[i2]) {
                        len[i2] = len[j2] + 1;
                        par[i2] = static_cast<int>(j2);
                    }
                if (len[i2] > len[besti]) besti = i2;
            }
            for (int i2 = static_cast<int>(besti); i2 >= 0; i2 = par[i2]) inc.push_back(z_seq[i2]);
            std::reverse(inc.begin(), inc.end());
        }
        {
            std::size_t L = z_seq.size();
            std::vector<int> len(L, 1), par(L, -1);
            std::size_t besti = 0;
            for (std::size_t i2 = 0; i2 < L; ++i2) {
                for (std::size_t j2 = 0; j2 < i2; ++j2)
                    if (rank_pos[z_seq[j2]] > rank_pos[z_seq[i2]] && len[j2] + 1 > len[i2]) {
                        len[i2] = len[j2] + 1;
                        par[i2] = static_cast<int>(j2);
                    }
                if (len[i2] > len[besti]) besti = i2;
            }
            for (int i2 = static_cast<int>(besti); i2 >= 0; i2 = par[i2]) dec.push_back(z_seq[i2]);
            std::reverse(dec.begin(), dec.end());
        }
        z_seq = inc.size() >= dec.size() ? inc : dec;
        if (z_seq.size() >= 2 && y_rank.at(z_seq.front()) > y_rank.at(z_seq.back()))
            std::reverse(z_seq.begin(), z_seq.end());
    } else {
        std::sort(z_seq.begin(), z_seq.end(),
                  [&](VertexId a, VertexId b) { return y_rank.at(a) < y_rank.at(b); });
    }
    if (static_cast<int>(z_seq.size()) < n)
        throw Error(ErrorCode::BudgetExceeded, "second tree yields too few aligned leaves");
    z_seq.resize(n);

    int dir = 1;
    {
        int span_fwd = 0, span_bwd = 0;
        for (int i = 0; i + 1 < n; ++i) {
            span_fwd += (cc.pos.at(z_seq[i + 1]) - cc.pos.at(z_seq[i]) + cc.m) % cc.m;
            span_bwd += (cc.pos.at(z_seq[i]) - cc.pos.at(z_seq[i + 1]) + cc.m) % cc.m;
        }
        dir = span_fwd <= span_bwd ? 1 : -1;
    }
    std::vector<std::vector<Path>> per_pair(n);
    for (int i = 0; i < n; ++i) {
        int a = cc.pos.at(z_seq[i]), b = cc.pos.at(z_seq[(i + 1) % n]);
        per_pair[i] = arc_lanes(cc, a, b, dir);
        Path extra;
        if (i + 1 == n)
            extra = tree_path(trees[2], z_seq[n - 1], z_seq[0]);
        else if (i % 2 == 0)
            extra = tree_path(trees[0], z_seq[i], z_seq[i + 1]);
        else
            extra = tree_path(trees[1], z_seq[i], z_seq[i + 1]);
        per_pair[i].push_back(std::move(extra));
    }
    return assemble_cycle(host, cc.p + 1, z_seq, per_pair);
}

ImmersionCertificate shrink_ctr(const MultiGraph& host, const ImmersionCertificate& cert, int t,
                                int r) {
    CyclicCert cc = read_cyclic(host, cert);
    if (cc.p != t) throw Error(ErrorCode::InvalidParams, "certificate is not C_{t,m}");
    if (r > cc.m || r < 3) throw Error(ErrorCode::InvalidParams, "bad target length");
    if (r == cc.m) return cert;
    std::vector<VertexId> terms(cc.order.begin(), cc.order.begin() + r);
    std::vector<std::vector<Path>> per_pair(r);
    for (int i = 0; i < r; ++i) {
        int a = i, b = (i + 1) % r == 0 ? 0 : i + 1;
        per_pair[i] = arc_lanes(cc, a, b, 1);
    }
    return assemble_cycle(host, t, terms, per_pair);
}

// ---------------------------------------------------------------------------
// C_{t,r} pipelines

namespace {

std::optional<ImmersionCertificate> double_cycle_in_union(const MultiGraph& g,
                                                          const TreePacking& packing, int r,
                                                          const std::set<VertexId>& pool,
                                                          SearchBudget& budget, bool rooted) {
    std::set<EdgeId> union4;
    for (int i = 0; i < 4; ++i)
        union4.insert(packing.trees[i].begin(), packing.trees[i].end());
    MultiGraph host4 = edge_subgraph(g, union4);
    for (VertexId v : g.vertices())
        if (!host4.has_vertex(v)) host4.add_vertex(v);
    std::optional<ImmersionCertificate> cert;
    if (!rooted) {
        cert = find_double_cycle(host4, r, budget);
    } else {
        bool exhaustive = host4.edge_count() <= 20;
        cert = chain_search_ctr(host4, 2, r, pool, budget, exhaustive);
    }
    return cert;
}

}  // namespace

namespace {

CtrSearchResult find_ctr_impl(const MultiGraph& g, const std::set<VertexId>& pool, int t, int r,
                              SearchBudget& budget, bool rooted) {
    CtrSearchResult result;
    if (t < 1 || r < 3) throw Error(ErrorCode::InvalidParams, "need t >= 1, r >= 3");

    // Stage 0: direct chain search; covers hosts that carry the target
    // outright (including C_{t,r} itself, whose edge budget cannot feed the
    // tree-packing pipeline).
    {
        bool exhaustive = g.edge_count() <= 20;
        std::optional<ImmersionCertificate> cert =
            chain_search_ctr(g, t, r, pool, budget, exhaustive);
        if (cert) {
            result.stages.push_back("direct: found");
            result.cert = std::move(cert);
            return result;
        }
        result.stages.push_back("direct: none");
        if (budget.exhausted()) {
            result.stages.push_back("budget exhausted");
            return result;
        }
    }

    if (t == 1) {
        auto conn = is_k_edge_connected(g, 2);
        if (!conn.ok) {
            result.stages.push_back("cycle: not 2-edge-connected");
            return result;
        }
        ReductionResult red = reduce_degrees(g, 2);
        std::set<VertexId> red_pool;
        for (VertexId v : pool)
            if (red.reduced.has_vertex(v)) red_pool.insert(v);
        bool exhaustive = red.reduced.edge_count() <= 20;
        std::optional<ImmersionCertificate> cert =
            chain_search_ctr(red.reduced, 1, r, red_pool, budget, exhaustive);
        if (cert) {
            ImmersionCertificate lifted = compose_through_script(g, red.script, *cert);
            if (verify_immersion(g, lifted).ok) {
                result.stages.push_back("cycle: found after degree reduction");
                result.cert = std::move(lifted);
                return result;
            }
        }
        result.stages.push_back("cycle: none");
        return result;
    }

    // t >= 2: spanning/Steiner packing, double cycle in the first four trees,
    // then gauge steps over succeeding tree triples.
    TreePacking packing;
    if (!rooted) {
        SpanningPackResult sp = pack_spanning_trees(g, 3 * t - 2);
        if (!sp.packing) {
            result.stages.push_back("packing: infeasible for " + std::to_string(3 * t - 2) +
                                    " spanning trees");
            return result;
        }
        packing = std::move(*sp.packing);
    } else {
        SteinerPackResult sp = pack_steiner_trees(g, pool, 3 * t - 2);
        if (!sp.complete) {
            result.stages.push_back("packing: " + sp.diagnostics);
            return result;
        }
        packing = std::move(sp.packing);
    }
    result.stages.push_back("packing: " + std::to_string(packing.trees.size()) + " trees");

    // longest double cycle we can afford, never below what gauge steps need
    int m_target = std::min<int>(static_cast<int>(g.vertex_count()),
                                 std::max(r + 2 * (t - 2), r));
    std::optional<ImmersionCertificate> cert;
    int m_found = 0;
    for (int m = m_target; m >= r; --m) {
        cert = double_cycle_in_union(g, packing, m, pool, budget, rooted);
        if (cert) {
            m_found = m;
            break;
        }
        if (budget.exhausted()) break;
    }
    if (!cert) {
        result.stages.push_back("double-cycle: none in tree union");
        return result;
    }
    result.stages.push_back("double-cycle: length " + std::to_string(m_found));

    for (int step = 1; step <= t - 2; ++step) {
        const auto& ta = packing.trees[3 * step + 1];
        const auto& tb = packing.trees[3 * step + 2];
        const auto& tc = packing.trees[3 * step + 3];
        int want = std::max(r, m_found - 2);  // keep as much length as survives alignment
        bool done = false;
        for (int n = want; n >= r && !done; --n) {
            try {
                ImmersionCertificate next = gauge_augment(g, *cert, ta, tb, tc, n);
                cert = std::move(next);
                m_found = n;
                done = true;
            } catch (const Error&) {
                // alignment too short at this n; retry smaller
            }
        }
        if (!done) {
            result.stages.push_back("gauge step " + std::to_string(step) + ": alignment too short");
            return result;
        }
        result.stages.push_back("gauge step " + std::to_string(step) + ": length " +
                                std::to_string(m_found));
    }

    if (m_found > r) *cert = shrink_ctr(g, *cert, t, r);
    if (!verify_immersion(g, *cert).ok) {
        result.stages.push_back("pipeline: final verification failed");
        return result;
    }
    result.stages.push_back("pipeline: found");
    result.cert = std::move(cert);
    return result;
}

}  // namespace

CtrSearchResult find_ctr(const MultiGraph& g, int t, int r, SearchBudget& budget) {
    return find_ctr_impl(g, g.vertices(), t, r, budget, false);
}

CtrSearchResult find_ctr_rooted(const MultiGraph& g, const std::set<VertexId>& s, int t, int r,
                                SearchBudget& budget) {
    if (static_cast<int>(s.size()) < r)
        throw Error(ErrorCode::PreconditionViolated, "need |S| >= r");
    return find_ctr_impl(g, s, t, r, budget, true);
}

}  // namespace imm
