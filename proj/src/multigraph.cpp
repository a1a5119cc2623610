#include "imm/multigraph.hpp"

#include <algorithm>
#include <deque>

namespace imm {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnknownVertex: return "UnknownVertex";
        case ErrorCode::UnknownEdge: return "UnknownEdge";
        case ErrorCode::NonAdjacentEdges: return "NonAdjacentEdges";
        case ErrorCode::NotAPath: return "NotAPath";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::NotASubgraph: return "NotASubgraph";
        case ErrorCode::SameVertex: return "SameVertex";
        case ErrorCode::LoopEdge: return "LoopEdge";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::HypothesesViolated: return "HypothesesViolated";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::NotKEdgeConnected: return "NotKEdgeConnected";
        case ErrorCode::NotEdgeDisjoint: return "NotEdgeDisjoint";
        case ErrorCode::NotCompatible: return "NotCompatible";
        case ErrorCode::MalformedDecomposition: return "MalformedDecomposition";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::TooFewMarked: return "TooFewMarked";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::BudgetRefusal: return "BudgetRefusal";
        case ErrorCode::InvalidCertificate: return "InvalidCertificate";
        case ErrorCode::NotALineGraph: return "NotALineGraph";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void MultiGraph::add_vertex(VertexId v) {
    vertices_.insert(v);
    adj_.try_emplace(v);
    next_vertex_ = std::max(next_vertex_, v + 1);
}

EdgeId MultiGraph::add_edge(VertexId u, VertexId v) {
    EdgeId id = next_edge_;
    add_edge_with_id(id, u, v);
    return id;
}

void MultiGraph::add_edge_with_id(EdgeId id, VertexId u, VertexId v) {
    if (u == v) throw Error(ErrorCode::LoopEdge, "loop edges are not allowed");
    if (!has_vertex(u) || !has_vertex(v))
        throw Error(ErrorCode::UnknownVertex, "edge endpoint not in graph");
    if (edges_.count(id)) throw Error(ErrorCode::DuplicateId, "edge id already in use");
    edges_[id] = {u, v};
    adj_[u].insert(id);
    adj_[v].insert(id);
    next_edge_ = std::max(next_edge_, id + 1);
}

void MultiGraph::remove_edge(EdgeId e) {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw Error(ErrorCode::UnknownEdge, "no such edge");
    adj_[it->second.first].erase(e);
    adj_[it->second.second].erase(e);
    edges_.erase(it);
}

void MultiGraph::remove_isolated_vertex(VertexId v) {
    if (!has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "no such vertex");
    if (!adj_.at(v).empty())
        throw Error(ErrorCode::PreconditionViolated, "vertex is not isolated");
    vertices_.erase(v);
    adj_.erase(v);
}

std::pair<VertexId, VertexId> MultiGraph::endpoints(EdgeId e) const {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw Error(ErrorCode::UnknownEdge, "no such edge");
    return it->second;
}

VertexId MultiGraph::other_end(EdgeId e, VertexId v) const {
    auto [a, b] = endpoints(e);
    if (a == v) return b;
    if (b == v) return a;
    throw Error(ErrorCode::UnknownVertex, "vertex not an endpoint of edge");
}

bool MultiGraph::is_incident(EdgeId e, VertexId v) const {
    auto [a, b] = endpoints(e);
    return a == v || b == v;
}

const std::set<EdgeId>& MultiGraph::incident_edges(VertexId v) const {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw Error(ErrorCode::UnknownVertex, "no such vertex");
    return it->second;
}

int MultiGraph::degree(VertexId v) const { return static_cast<int>(incident_edges(v).size()); }

int MultiGraph::parallel_count(VertexId u, VertexId v) const {
    int n = 0;
    for (EdgeId e : incident_edges(u))
        if (other_end(e, u) == v) ++n;
    return n;
}

std::set<VertexId> MultiGraph::neighbors(VertexId v) const {
    std::set<VertexId> out;
    for (EdgeId e : incident_edges(v)) out.insert(other_end(e, v));
    return out;
}

std::set<VertexId> MultiGraph::neighborhood(const std::set<VertexId>& x) const {
    std::set<VertexId> out;
    for (VertexId v : x)
        for (EdgeId e : incident_edges(v)) {
            VertexId w = other_end(e, v);
            if (!x.count(w)) out.insert(w);
        }
    return out;
}

std::set<EdgeId> MultiGraph::edge_boundary(const std::set<VertexId>& x) const {
    std::set<EdgeId> out;
    for (const auto& [id, ep] : edges_) {
        bool a = x.count(ep.first) > 0, b = x.count(ep.second) > 0;
        if (a != b) out.insert(id);
    }
    return out;
}

bool MultiGraph::connected() const {
    if (vertices_.empty()) return true;
    return components().size() == 1;
}

std::vector<std::set<VertexId>> MultiGraph::components() const {
    std::vector<std::set<VertexId>> comps;
    std::set<VertexId> seen;
    for (VertexId root : vertices_) {
        if (seen.count(root)) continue;
        std::set<VertexId> comp;
        std::deque<VertexId> queue{root};
        seen.insert(root);
        while (!queue.empty()) {
            VertexId v = queue.front();
            queue.pop_front();
            comp.insert(v);
            for (EdgeId e : incident_edges(v)) {
                VertexId w = other_end(e, v);
                if (seen.insert(w).second) queue.push_back(w);
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

void MultiGraph::reserve_edge_id(EdgeId id) { next_edge_ = std::max(next_edge_, id); }

bool Path::valid_in(const MultiGraph& g) const {
    if (vertices.empty() || vertices.size() != edges.size() + 1) return false;
    for (VertexId v : vertices)
        if (!g.has_vertex(v)) return false;
    std::set<EdgeId> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!g.has_edge(edges[i])) return false;
        if (!seen.insert(edges[i]).second) return false;
        auto [a, b] = g.endpoints(edges[i]);
        if (!((a == vertices[i] && b == vertices[i + 1]) || (b == vertices[i] && a == vertices[i + 1])))
            return false;
    }
    return true;
}

bool Path::vertex_simple() const {
    std::set<VertexId> seen(vertices.begin(), vertices.end());
    return seen.size() == vertices.size();
}

Path Path::reversed() const {
    Path p;
    p.vertices.assign(vertices.rbegin(), vertices.rend());
    p.edges.assign(edges.rbegin(), edges.rend());
    return p;
}

Path Path::subpath(VertexId from, VertexId to) const {
    auto fi = std::find(vertices.begin(), vertices.end(), from);
    auto ti = std::find(vertices.begin(), vertices.end(), to);
    if (fi == vertices.end() || ti == vertices.end())
        throw Error(ErrorCode::NotAPath, "subpath endpoint not on path");
    std::size_t a = static_cast<std::size_t>(fi - vertices.begin());
    std::size_t b = static_cast<std::size_t>(ti - vertices.begin());
    bool rev = a > b;
    if (rev) std::swap(a, b);
    Path p;
    p.vertices.assign(vertices.begin() + a, vertices.begin() + b + 1);
    p.edges.assign(edges.begin() + a, edges.begin() + b);
    return rev ? p.reversed() : p;
}

namespace {

std::optional<std::vector<VertexId>> try_parse_walk(const MultiGraph& g,
                                                    const std::vector<EdgeId>& walk,
                                                    VertexId junction) {
    std::vector<VertexId> vs;
    vs.push_back(g.other_end(walk[0], junction));
    vs.push_back(junction);
    VertexId cur = junction;
    for (std::size_t i = 1; i < walk.size(); ++i) {
        if (!g.is_incident(walk[i], cur)) return std::nullopt;
        cur = g.other_end(walk[i], cur);
        vs.push_back(cur);
    }
    return vs;
}

}  // namespace

std::vector<VertexId> walk_vertices(const MultiGraph& g, const std::vector<EdgeId>& walk) {
    if (walk.empty()) throw Error(ErrorCode::NotAPath, "empty edge list");
    std::set<EdgeId> seen;
    for (EdgeId e : walk) {
        if (!g.has_edge(e)) throw Error(ErrorCode::UnknownEdge, "walk edge not in graph");
        if (!seen.insert(e).second) throw Error(ErrorCode::NotAPath, "repeated edge in walk");
    }
    if (walk.size() == 1) {
        auto [a, b] = g.endpoints(walk[0]);
        return {a, b};
    }
    // The junction of the first two edges fixes the orientation; a parallel
    // first pair leaves it ambiguous, so both readings get a chance.
    auto [a0, b0] = g.endpoints(walk[0]);
    auto [a1, b1] = g.endpoints(walk[1]);
    bool a_shared = (a0 == a1 || a0 == b1), b_shared = (b0 == a1 || b0 == b1);
    if (!a_shared && !b_shared)
        throw Error(ErrorCode::NotAPath, "consecutive walk edges do not share a vertex");
    if (a_shared) {
        auto vs = try_parse_walk(g, walk, a0);
        if (vs) return *vs;
    }
    if (b_shared) {
        auto vs = try_parse_walk(g, walk, b0);
        if (vs) return *vs;
    }
    throw Error(ErrorCode::NotAPath, "consecutive walk edges do not share a vertex");
}

Path simplify_walk(const MultiGraph& g, const std::vector<EdgeId>& walk, VertexId from, VertexId to) {
    if (walk.empty()) {
        if (from != to) throw Error(ErrorCode::NotAPath, "empty walk with distinct ends");
        return Path{{from}, {}};
    }
    std::vector<VertexId> vs = walk_vertices(g, walk);
    std::vector<EdgeId> es = walk;
    if (vs.front() != from) {
        std::reverse(vs.begin(), vs.end());
        std::reverse(es.begin(), es.end());
    }
    if (vs.front() != from || vs.back() != to)
        throw Error(ErrorCode::NotAPath, "walk does not join the stated ends");
    // Loop erasure: drop the cycle between repeated visits.
    std::vector<VertexId> out_v;
    std::vector<EdgeId> out_e;
    std::map<VertexId, std::size_t> pos;
    out_v.push_back(vs[0]);
    pos[vs[0]] = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
        VertexId nxt = vs[i + 1];
        auto it = pos.find(nxt);
        if (it != pos.end()) {
            std::size_t keep = it->second;
            while (out_v.size() > keep + 1) {
                pos.erase(out_v.back());
                out_v.pop_back();
                out_e.pop_back();
            }
        } else {
            out_v.push_back(nxt);
            out_e.push_back(es[i]);
            pos[nxt] = out_v.size() - 1;
        }
    }
    return Path{std::move(out_v), std::move(out_e)};
}

Path concat_paths(const MultiGraph& g, const Path& a, const Path& b) {
    if (a.back() != b.front()) throw Error(ErrorCode::NotAPath, "paths do not share a junction");
    std::vector<EdgeId> walk = a.edges;
    walk.insert(walk.end(), b.edges.begin(), b.edges.end());
    return simplify_walk(g, walk, a.front(), b.back());
}

bool is_subgraph_of(const MultiGraph& g, const SubgraphSpec& h) {
    for (VertexId v : h.vertices)
        if (!g.has_vertex(v)) return false;
    for (EdgeId e : h.edges) {
        if (!g.has_edge(e)) return false;
        auto [a, b] = g.endpoints(e);
        if (!h.vertices.count(a) || !h.vertices.count(b)) return false;
    }
    return true;
}

MultiGraph induced_subgraph(const MultiGraph& g, const std::set<VertexId>& vs) {
    MultiGraph out;
    for (VertexId v : vs) {
        if (!g.has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "induced set not in graph");
        out.add_vertex(v);
    }
    for (const auto& [id, ep] : g.edges())
        if (vs.count(ep.first) && vs.count(ep.second)) out.add_edge_with_id(id, ep.first, ep.second);
    return out;
}

MultiGraph edge_subgraph(const MultiGraph& g, const std::set<EdgeId>& es) {
    MultiGraph out;
    for (EdgeId e : es) {
        auto [a, b] = g.endpoints(e);
        if (!out.has_vertex(a)) out.add_vertex(a);
        if (!out.has_vertex(b)) out.add_vertex(b);
        out.add_edge_with_id(e, a, b);
    }
    return out;
}

LiftResult lift_pair(const MultiGraph& g, EdgeId e, EdgeId f) {
    if (e == f) throw Error(ErrorCode::NonAdjacentEdges, "lift pair must be two distinct edges");
    auto [eu, ev] = g.endpoints(e);
    auto [fu, fv] = g.endpoints(f);
    VertexId shared;
    if (eu == fu || eu == fv)
        shared = eu;
    else if (ev == fu || ev == fv)
        shared = ev;
    else
        throw Error(ErrorCode::NonAdjacentEdges, "edges share no endpoint");

    VertexId a = (eu == shared) ? ev : eu;
    VertexId b = (fu == shared) ? fv : fu;

    LiftResult res{g, std::nullopt};
    res.graph.remove_edge(e);
    res.graph.remove_edge(f);
    if (a != b) res.created = res.graph.add_edge(a, b);
    return res;
}

LiftResult lift_path(const MultiGraph& g, const std::vector<EdgeId>& path) {
    std::vector<VertexId> vs = walk_vertices(g, path);  // validates the walk
    LiftResult res{g, std::nullopt};
    for (EdgeId e : path) res.graph.remove_edge(e);
    if (vs.front() != vs.back()) res.created = res.graph.add_edge(vs.front(), vs.back());
    return res;
}

MultiGraph replay_script(const MultiGraph& src, const LiftingScript& script) {
    MultiGraph g = src;
    for (const LiftStep& st : script.steps) {
        switch (st.kind) {
            case LiftStep::DeleteEdge:
                g.remove_edge(st.edge);
                break;
            case LiftStep::DeleteIsolatedVertex:
                g.remove_isolated_vertex(st.vertex);
                break;
            case LiftStep::LiftPair: {
                LiftResult r = lift_pair(g, st.lift_e, st.lift_f);
                if (r.created.has_value() != (st.created >= 0))
                    throw Error(ErrorCode::InvalidCertificate, "script loop case mismatch");
                if (r.created && *r.created != st.created)
                    throw Error(ErrorCode::InvalidCertificate, "script created-edge id mismatch");
                g = std::move(r.graph);
                break;
            }
        }
    }
    return g;
}

ContractResult contract_set(const MultiGraph& g, const std::set<VertexId>& s) {
    if (s.empty()) throw Error(ErrorCode::EmptySet, "contracting empty set");
    for (VertexId v : s)
        if (!g.has_vertex(v)) throw Error(ErrorCode::UnknownVertex, "contract set not in graph");

    ContractResult res;
    VertexId merged = g.peek_next_vertex_id();
    res.merged = merged;
    for (VertexId v : g.vertices())
        if (!s.count(v)) res.graph.add_vertex(v);
    res.graph.add_vertex(merged);
    res.graph.reserve_edge_id(g.peek_next_edge_id());
    for (const auto& [id, ep] : g.edges()) {
        VertexId a = s.count(ep.first) ? merged : ep.first;
        VertexId b = s.count(ep.second) ? merged : ep.second;
        if (a == b) continue;  // loops vanish
        res.graph.add_edge_with_id(id, a, b);
    }
    return res;
}

LineGraphResult line_graph(const MultiGraph& g) {
    LineGraphResult res;
    for (const auto& [id, ep] : g.edges()) {
        res.graph.add_vertex(id);
        res.edge_to_vertex[id] = id;
    }
    // Adjacent iff sharing an endpoint; parallel edges give one adjacency.
    for (auto it = g.edges().begin(); it != g.edges().end(); ++it)
        for (auto jt = std::next(it); jt != g.edges().end(); ++jt) {
            auto [a, b] = it->second;
            auto [c, d] = jt->second;
            if (a == c || a == d || b == c || b == d) res.graph.add_edge(it->first, jt->first);
        }
    return res;
}

std::vector<Bridge> tutte_bridges(const MultiGraph& g, const SubgraphSpec& h) {
    if (!is_subgraph_of(g, h)) throw Error(ErrorCode::NotASubgraph, "h is not a subgraph of g");

    std::vector<Bridge> out;
    std::set<VertexId> hv = h.vertices;
    std::set<VertexId> seen;
    // Nontrivial bridges: one per component of G - V(H).
    for (VertexId root : g.vertices()) {
        if (hv.count(root) || seen.count(root)) continue;
        std::set<VertexId> nucleus;
        std::deque<VertexId> queue{root};
        seen.insert(root);
        while (!queue.empty()) {
            VertexId v = queue.front();
            queue.pop_front();
            nucleus.insert(v);
            for (EdgeId e : g.incident_edges(v)) {
                VertexId w = g.other_end(e, v);
                if (hv.count(w)) continue;
                if (seen.insert(w).second) queue.push_back(w);
            }
        }
        Bridge b;
        b.trivial = false;
        b.nucleus = nucleus;
        for (VertexId v : nucleus)
            for (EdgeId e : g.incident_edges(v)) {
                b.edge_set.insert(e);
                VertexId w = g.other_end(e, v);
                if (hv.count(w)) b.attachments.insert(w);
            }
        out.push_back(std::move(b));
    }
    // Trivial bridges: leftover edges with both ends in V(H).
    for (const auto& [id, ep] : g.edges()) {
        if (h.edges.count(id)) continue;
        if (hv.count(ep.first) && hv.count(ep.second)) {
            Bridge b;
            b.trivial = true;
            b.edge_set = {id};
            b.attachments = {ep.first, ep.second};
            out.push_back(std::move(b));
        }
    }
    return out;
}

}  // namespace imm
