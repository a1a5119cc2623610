#include "imm/connectivity.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace imm {

namespace {

// Unit-capacity flow network with paired arcs (arc i reversed by i^1).
// Augmentation is shortest-path BFS; everything is index-based and resettable
// so one build can serve many terminal pairs.
struct UnitFlow {
    struct Arc {
        int to;
        int cap;
        int orig;
        EdgeId eid;      // originating graph edge, -1 for auxiliary arcs
        VertexId vid;    // originating vertex for node-splitting arcs, -1 otherwise
    };

    int n = 0;
    std::vector<std::vector<int>> out;
    std::vector<Arc> arcs;

    explicit UnitFlow(int nodes) : n(nodes), out(nodes) {}

    int add_arc(int from, int to, int cap, int cap_rev, EdgeId eid, VertexId vid = -1) {
        int id = static_cast<int>(arcs.size());
        arcs.push_back({to, cap, cap, eid, vid});
        arcs.push_back({from, cap_rev, cap_rev, eid, vid});
        out[from].push_back(id);
        out[to].push_back(id + 1);
        return id;
    }

    void reset() {
        for (Arc& a : arcs) a.cap = a.orig;
    }

    int max_flow(int s, int t, int limit) {
        int flow = 0;
        std::vector<int> parent_arc(n);
        while (limit < 0 || flow < limit) {
            std::fill(parent_arc.begin(), parent_arc.end(), -1);
            std::deque<int> queue{s};
            parent_arc[s] = -2;
            bool reached = false;
            while (!queue.empty() && !reached) {
                int v = queue.front();
                queue.pop_front();
                for (int id : out[v]) {
                    const Arc& a = arcs[id];
                    if (a.cap <= 0 || parent_arc[a.to] != -1) continue;
                    parent_arc[a.to] = id;
                    if (a.to == t) {
                        reached = true;
                        break;
                    }
                    queue.push_back(a.to);
                }
            }
            if (!reached) break;
            for (int v = t; v != s;) {
                int id = parent_arc[v];
                arcs[id].cap -= 1;
                arcs[id ^ 1].cap += 1;
                v = arcs[id ^ 1].to;
            }
            ++flow;
        }
        return flow;
    }

    std::vector<char> residual_reachable(int s) const {
        std::vector<char> seen(n, 0);
        std::deque<int> queue{s};
        seen[s] = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int id : out[v]) {
                const Arc& a = arcs[id];
                if (a.cap > 0 && !seen[a.to]) {
                    seen[a.to] = 1;
                    queue.push_back(a.to);
                }
            }
        }
        return seen;
    }

    // Net usage of arc id (positive means flow in the stored direction).
    int used(int id) const { return arcs[id].orig - arcs[id].cap; }
};

struct Indexer {
    std::vector<VertexId> by_index;
    std::map<VertexId, int> by_id;

    explicit Indexer(const MultiGraph& g) {
        for (VertexId v : g.vertices()) {
            by_id[v] = static_cast<int>(by_index.size());
            by_index.push_back(v);
        }
    }
    int operator()(VertexId v) const { return by_id.at(v); }
    int size() const { return static_cast<int>(by_index.size()); }
};

// Edge-capacity network: both directions of every edge get capacity 1.
UnitFlow build_edge_network(const MultiGraph& g, const Indexer& ix, int extra_nodes) {
    UnitFlow net(ix.size() + extra_nodes);
    for (const auto& [id, ep] : g.edges())
        net.add_arc(ix(ep.first), ix(ep.second), 1, 1, id);
    return net;
}

// Deterministic decomposition of an edge-capacity flow into paths: at every
// step the lowest remaining edge id is taken; circulations are loop-erased.
std::vector<Path> decompose_edge_flow(const MultiGraph& g, const UnitFlow& net, const Indexer& ix,
                                      const std::set<VertexId>& sources, int total,
                                      const std::set<VertexId>& sinks) {
    // used direction per edge: from -> to (net usage +- 1)
    std::map<VertexId, std::map<EdgeId, VertexId>> avail;
    for (std::size_t i = 0; i < net.arcs.size(); i += 2) {
        int u = net.used(static_cast<int>(i));
        EdgeId eid = net.arcs[i].eid;
        if (eid < 0 || u == 0) continue;
        int from_idx = net.arcs[i ^ 1].to;
        int to_idx = net.arcs[i].to;
        if (u < 0) std::swap(from_idx, to_idx);
        avail[ix.by_index[from_idx]][eid] = ix.by_index[to_idx];
    }

    std::vector<Path> paths;
    for (VertexId a : sources) {
        while (static_cast<int>(paths.size()) < total) {
            if (avail[a].empty()) break;
            Path p;
            p.vertices.push_back(a);
            VertexId cur = a;
            std::map<VertexId, std::size_t> pos{{a, 0}};
            while (!sinks.count(cur) || cur == a) {
                auto& options = avail[cur];
                if (options.empty()) {
                    if (sinks.count(cur)) break;  // closed at a source that is also a sink
                    throw Error(ErrorCode::NotFound, "flow decomposition stuck");
                }
                auto it = options.begin();
                EdgeId eid = it->first;
                VertexId nxt = it->second;
                options.erase(it);
                auto seen = pos.find(nxt);
                if (seen != pos.end()) {
                    // erase the circulation, keep walking from nxt
                    while (p.vertices.size() > seen->second + 1) {
                        pos.erase(p.vertices.back());
                        p.vertices.pop_back();
                        p.edges.pop_back();
                    }
                    cur = nxt;
                    continue;
                }
                p.vertices.push_back(nxt);
                p.edges.push_back(eid);
                pos[nxt] = p.vertices.size() - 1;
                cur = nxt;
                if (sinks.count(cur)) break;
            }
            if (p.vertices.size() == 1) break;  // only circulations left at a
            paths.push_back(std::move(p));
        }
    }
    std::ignore = g;
    return paths;
}

}  // namespace

bool PathFamily::pairwise_edge_disjoint() const {
    std::set<EdgeId> seen;
    for (const Path& p : paths) {
        std::set<EdgeId> own;
        for (EdgeId e : p.edges) {
            if (!own.insert(e).second) return false;  // repeated inside one path
            if (!seen.insert(e).second) return false;
        }
    }
    return true;
}

std::set<EdgeId> PathFamily::all_edges() const {
    std::set<EdgeId> out;
    for (const Path& p : paths) out.insert(p.edges.begin(), p.edges.end());
    return out;
}

int local_edge_connectivity_capped(const MultiGraph& g, VertexId u, VertexId v, int cap) {
    if (u == v) throw Error(ErrorCode::SameVertex, "lambda needs distinct vertices");
    if (!g.has_vertex(u) || !g.has_vertex(v))
        throw Error(ErrorCode::UnknownVertex, "lambda endpoint missing");
    Indexer ix(g);
    UnitFlow net = build_edge_network(g, ix, 0);
    return net.max_flow(ix(u), ix(v), cap);
}

int local_edge_connectivity(const MultiGraph& g, VertexId u, VertexId v) {
    return local_edge_connectivity_capped(g, u, v, -1);
}

EdgeDisjointResult edge_disjoint_paths(const MultiGraph& g, const std::set<VertexId>& a,
                                       const std::set<VertexId>& b, int k) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySet, "path endpoints empty");
    for (VertexId v : a)
        if (b.count(v)) throw Error(ErrorCode::PreconditionViolated, "A and B must be disjoint");

    EdgeDisjointResult res;
    if (k == 0) {
        res.family = PathFamily{{}, a, b};
        return res;
    }

    Indexer ix(g);
    UnitFlow net = build_edge_network(g, ix, 2);
    int s = ix.size(), t = ix.size() + 1;
    for (VertexId v : a) net.add_arc(s, ix(v), k, 0, -1);
    for (VertexId v : b) net.add_arc(ix(v), t, k, 0, -1);

    int flow = net.max_flow(s, t, k);
    if (flow >= k) {
        PathFamily fam;
        fam.ends_a = a;
        fam.ends_b = b;
        fam.paths = decompose_edge_flow(g, net, ix, a, k, b);
        if (static_cast<int>(fam.paths.size()) != k)
            throw Error(ErrorCode::NotFound, "flow decomposition path count mismatch");
        res.family = std::move(fam);
        return res;
    }

    std::vector<char> reach = net.residual_reachable(s);
    EdgeCut cut;
    for (VertexId v : g.vertices())
        if (reach[ix(v)]) cut.side.insert(v);
    cut.cut_edges = g.edge_boundary(cut.side);
    res.cut = std::move(cut);
    return res;
}

ConnectivityResult is_k_edge_connected(const MultiGraph& g, int k) {
    if (g.vertex_count() < 2)
        throw Error(ErrorCode::PreconditionViolated, "need at least two vertices");
    return set_k_edge_connected(g, g.vertices(), k);
}

ConnectivityResult set_k_edge_connected(const MultiGraph& g, const std::set<VertexId>& s, int k) {
    if (s.size() < 2) throw Error(ErrorCode::PreconditionViolated, "need |S| >= 2");
    for (VertexId v : s)
        if (!g.has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "S not contained in graph");

    // A cut below k separating two members of S separates the fixed root from
    // one of them, so O(|S|) flows suffice.
    VertexId root = *s.begin();
    Indexer ix(g);
    UnitFlow net = build_edge_network(g, ix, 0);
    for (VertexId v : s) {
        if (v == root) continue;
        net.reset();
        int flow = net.max_flow(ix(root), ix(v), k);
        if (flow < k) {
            std::vector<char> reach = net.residual_reachable(ix(root));
            EdgeCut cut;
            for (VertexId w : g.vertices())
                if (reach[ix(w)]) cut.side.insert(w);
            cut.cut_edges = g.edge_boundary(cut.side);
            return {false, std::move(cut)};
        }
    }
    return {true, std::nullopt};
}

namespace {

// Node-splitting network: vertex v becomes v_in = 2i, v_out = 2i + 1 with a
// unit arc between them; undirected edges join out-sides to in-sides.
UnitFlow build_split_network(const MultiGraph& g, const Indexer& ix, int extra_nodes) {
    UnitFlow net(2 * ix.size() + extra_nodes);
    for (VertexId v : g.vertices())
        net.add_arc(2 * ix(v), 2 * ix(v) + 1, 1, 0, -1, v);
    for (const auto& [id, ep] : g.edges()) {
        net.add_arc(2 * ix(ep.first) + 1, 2 * ix(ep.second), 1, 0, id);
        net.add_arc(2 * ix(ep.second) + 1, 2 * ix(ep.first), 1, 0, id);
    }
    return net;
}

}  // namespace

PathFamily vertex_disjoint_paths(const MultiGraph& g, const std::set<VertexId>& a,
                                 const std::set<VertexId>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySet, "path endpoints empty");
    Indexer ix(g);
    UnitFlow net = build_split_network(g, ix, 2);
    int s = 2 * ix.size(), t = 2 * ix.size() + 1;
    for (VertexId v : a) net.add_arc(s, 2 * ix(v), 1, 0, -1);
    for (VertexId v : b) net.add_arc(2 * ix(v) + 1, t, 1, 0, -1);
    int flow = net.max_flow(s, t, -1);

    // Walk used arcs from each started source; vertex arcs give the vertex
    // sequence, edge arcs the edge sequence.
    std::map<int, std::map<EdgeId, int>> avail;  // node -> (eid orderkey -> arc id)
    std::vector<int> start_nodes;
    for (std::size_t i = 0; i < net.arcs.size(); i += 2) {
        int id = static_cast<int>(i);
        if (net.used(id) <= 0) continue;
        int from = net.arcs[id ^ 1].to;
        if (from == s) {
            start_nodes.push_back(net.arcs[id].to);
            continue;
        }
        EdgeId key = net.arcs[id].eid >= 0 ? net.arcs[id].eid : -1;
        avail[from][key] = id;
    }
    std::sort(start_nodes.begin(), start_nodes.end());

    PathFamily fam;
    fam.ends_a = a;
    fam.ends_b = b;
    for (int start : start_nodes) {
        Path p;
        int cur = start;
        while (cur != t) {
            auto& options = avail[cur];
            if (options.empty()) throw Error(ErrorCode::NotFound, "split decomposition stuck");
            auto it = options.begin();
            int id = it->second;
            options.erase(it);
            const auto& arc = net.arcs[id];
            if (arc.vid >= 0) p.vertices.push_back(arc.vid);
            else if (arc.eid >= 0) p.edges.push_back(arc.eid);
            cur = arc.to;
        }
        fam.paths.push_back(std::move(p));
    }
    if (static_cast<int>(fam.paths.size()) != flow)
        throw Error(ErrorCode::NotFound, "split decomposition count mismatch");
    return fam;
}

int vertex_disjoint_path_count(const MultiGraph& g, const std::set<VertexId>& a,
                               const std::set<VertexId>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySet, "path endpoints empty");
    Indexer ix(g);
    UnitFlow net = build_split_network(g, ix, 2);
    int s = 2 * ix.size(), t = 2 * ix.size() + 1;
    for (VertexId v : a) net.add_arc(s, 2 * ix(v), 1, 0, -1);
    for (VertexId v : b) net.add_arc(2 * ix(v) + 1, t, 1, 0, -1);
    return net.max_flow(s, t, -1);
}

int internally_disjoint_paths(const MultiGraph& g, VertexId u, VertexId v) {
    if (u == v) throw Error(ErrorCode::SameVertex, "need distinct vertices");
    Indexer ix(g);
    UnitFlow net(2 * ix.size());
    for (VertexId w : g.vertices()) {
        int cap = (w == u || w == v) ? 1000000 : 1;
        net.add_arc(2 * ix(w), 2 * ix(w) + 1, cap, 0, -1, w);
    }
    for (const auto& [id, ep] : g.edges()) {
        net.add_arc(2 * ix(ep.first) + 1, 2 * ix(ep.second), 1, 0, id);
        net.add_arc(2 * ix(ep.second) + 1, 2 * ix(ep.first), 1, 0, id);
    }
    return net.max_flow(2 * ix(u) + 1, 2 * ix(v), -1);
}

bool is_k_vertex_connected(const MultiGraph& g, int k) {
    if (k <= 0) return true;
    int n = static_cast<int>(g.vertex_count());
    if (n < k + 1) return false;
    for (auto it = g.vertices().begin(); it != g.vertices().end(); ++it)
        for (auto jt = std::next(it); jt != g.vertices().end(); ++jt) {
            if (g.parallel_count(*it, *jt) > 0) continue;
            if (internally_disjoint_paths(g, *it, *jt) < k) return false;
        }
    return true;
}

}  // namespace imm
