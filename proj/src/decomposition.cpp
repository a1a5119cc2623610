#include "imm/decomposition.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace imm {

namespace {

std::vector<VertexId> tree_path(const MultiGraph& tree, VertexId from, VertexId to) {
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
    if (!parent.count(to)) throw Error(ErrorCode::MalformedDecomposition, "tree is disconnected");
    std::vector<VertexId> path;
    for (VertexId v = to;; v = parent[v]) {
        path.push_back(v);
        if (v == from) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

void check_structure(const MultiGraph& g, const TreeDecomposition& td) {
    if (td.tree.vertex_count() == 0)
        throw Error(ErrorCode::MalformedDecomposition, "empty decomposition tree");
    if (td.tree.edge_count() != td.tree.vertex_count() - 1 || !td.tree.connected())
        throw Error(ErrorCode::MalformedDecomposition, "decomposition tree is not a tree");
    for (VertexId t : td.tree.vertices())
        if (!td.bags.count(t))
            throw Error(ErrorCode::MalformedDecomposition, "tree vertex without bag");
    for (const auto& [t, bag] : td.bags) {
        if (!td.tree.has_vertex(t))
            throw Error(ErrorCode::MalformedDecomposition, "bag keyed to non-tree vertex");
        for (VertexId v : bag)
            if (!g.has_vertex(v))
                throw Error(ErrorCode::MalformedDecomposition, "bag member not a host vertex");
    }
}

}  // namespace

int TreeDecomposition::width() const {
    int w = -1;
    for (const auto& [t, bag] : bags) w = std::max(w, static_cast<int>(bag.size()) - 1);
    return w;
}

TdReport verify_td(const MultiGraph& g, const TreeDecomposition& td) {
    check_structure(g, td);
    TdReport rep;

    // W1: bags cover V(g) and every edge fits inside some bag.
    std::set<VertexId> covered;
    for (const auto& [t, bag] : td.bags) covered.insert(bag.begin(), bag.end());
    rep.w1 = covered == g.vertices();
    if (rep.w1)
        for (const auto& [id, ep] : g.edges()) {
            bool inside = false;
            for (const auto& [t, bag] : td.bags)
                if (bag.count(ep.first) && bag.count(ep.second)) {
                    inside = true;
                    break;
                }
            if (!inside) {
                rep.w1 = false;
                rep.detail = "edge " + std::to_string(id) + " not inside any bag";
                break;
            }
        }

    // W2: the trace of every host vertex induces a connected subtree.
    rep.w2 = true;
    for (VertexId v : g.vertices()) {
        std::set<VertexId> trace;
        for (const auto& [t, bag] : td.bags)
            if (bag.count(v)) trace.insert(t);
        if (trace.empty()) {
            rep.w2 = false;
            break;
        }
        std::set<VertexId> seen;
        std::deque<VertexId> queue{*trace.begin()};
        seen.insert(*trace.begin());
        while (!queue.empty()) {
            VertexId t = queue.front();
            queue.pop_front();
            for (EdgeId e : td.tree.incident_edges(t)) {
                VertexId t2 = td.tree.other_end(e, t);
                if (trace.count(t2) && seen.insert(t2).second) queue.push_back(t2);
            }
        }
        if (seen != trace) {
            rep.w2 = false;
            rep.detail = "trace of vertex " + std::to_string(v) + " disconnected";
            break;
        }
    }

    // W4: all bags distinct.
    rep.w4 = true;
    for (auto it = td.bags.begin(); it != td.bags.end() && rep.w4; ++it)
        for (auto jt = std::next(it); jt != td.bags.end(); ++jt)
            if (it->second == jt->second) {
                rep.w4 = false;
                rep.detail = "bags " + std::to_string(it->first) + " and " +
                             std::to_string(jt->first) + " coincide";
                break;
            }

    // W5: every branch at t0 contributes a vertex outside Y_t0.
    rep.w5 = true;
    for (VertexId t0 : td.tree.vertices()) {
        const auto& y0 = td.bags.at(t0);
        for (EdgeId e0 : td.tree.incident_edges(t0)) {
            VertexId start = td.tree.other_end(e0, t0);
            std::set<VertexId> seen{start};
            std::deque<VertexId> queue{start};
            bool fresh = false;
            while (!queue.empty() && !fresh) {
                VertexId t = queue.front();
                queue.pop_front();
                for (VertexId v : td.bags.at(t))
                    if (!y0.count(v)) {
                        fresh = true;
                        break;
                    }
                for (EdgeId e : td.tree.incident_edges(t)) {
                    VertexId t2 = td.tree.other_end(e, t);
                    if (t2 == t0 || seen.count(t2)) continue;
                    seen.insert(t2);
                    queue.push_back(t2);
                }
            }
            if (!fresh) {
                rep.w5 = false;
                rep.detail = "branch at tree vertex " + std::to_string(t0) + " adds nothing";
                break;
            }
        }
        if (!rep.w5) break;
    }
    return rep;
}

LinkedResult verify_linked(const MultiGraph& g, const TreeDecomposition& td, int full_ceiling) {
    TdReport base = verify_td(g, td);
    if (!base.w1 || !base.w2)
        throw Error(ErrorCode::MalformedDecomposition, "W1/W2 must hold before linkedness");

    std::vector<VertexId> nodes(td.tree.vertices().begin(), td.tree.vertices().end());
    std::size_t n = nodes.size();
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({nodes[i], nodes[j]});
    if (static_cast<int>(n) > full_ceiling) {
        std::size_t cap = static_cast<std::size_t>(full_ceiling) * full_ceiling;
        std::size_t stride = std::max<std::size_t>(1, pairs.size() / cap);
        std::vector<std::pair<VertexId, VertexId>> sampled;
        for (std::size_t i = 0; i < pairs.size(); i += stride) sampled.push_back(pairs[i]);
        pairs = std::move(sampled);
    }

    for (auto [t, t2] : pairs) {
        // Any family of disjoint bag-to-bag paths crosses every bag on the
        // tree path, so max paths <= min bag; linked means they are equal.
        std::vector<VertexId> tp = tree_path(td.tree, t, t2);
        int min_bag = 1 << 29;
        for (VertexId u : tp) min_bag = std::min(min_bag, static_cast<int>(td.bags.at(u).size()));
        if (min_bag == 0) continue;
        int paths = vertex_disjoint_path_count(g, td.bags.at(t), td.bags.at(t2));
        if (paths < min_bag) return {false, LinkedViolation{t, t2, paths + 1}};
    }
    return {true, std::nullopt};
}

namespace {

TreeDecomposition elimination_td(const MultiGraph& g, bool min_fill) {
    std::map<VertexId, std::set<VertexId>> adj;
    for (VertexId v : g.vertices()) adj[v] = g.neighbors(v);

    TreeDecomposition td;
    std::vector<std::pair<VertexId, std::set<VertexId>>> order;  // (vertex, bag rest)
    std::map<VertexId, int> position;

    std::map<VertexId, std::set<VertexId>> work = adj;
    while (!work.empty()) {
        VertexId best = -1;
        long best_key = -1;
        for (const auto& [v, nb] : work) {
            long fill = 0;
            if (min_fill) {
                for (auto it = nb.begin(); it != nb.end(); ++it)
                    for (auto jt = std::next(it); jt != nb.end(); ++jt)
                        if (!work.at(*it).count(*jt)) ++fill;
            } else {
                fill = static_cast<long>(nb.size());
            }
            if (best < 0 || fill < best_key) {
                best = v;
                best_key = fill;
            }
        }
        std::set<VertexId> nb = work.at(best);
        position[best] = static_cast<int>(order.size());
        order.push_back({best, nb});
        for (VertexId u : nb) {
            work.at(u).erase(best);
            for (VertexId w : nb)
                if (w != u) work.at(u).insert(w);
        }
        work.erase(best);
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
        td.tree.add_vertex(static_cast<VertexId>(i));
        std::set<VertexId> bag = order[i].second;
        bag.insert(order[i].first);
        td.bags[static_cast<VertexId>(i)] = bag;
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& rest = order[i].second;
        if (rest.empty()) {
            if (i + 1 < order.size()) td.tree.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(i + 1));
            continue;
        }
        int first_pos = 1 << 29;
        for (VertexId u : rest) first_pos = std::min(first_pos, position.at(u));
        td.tree.add_edge(static_cast<VertexId>(i), first_pos);
    }
    return td;
}

}  // namespace

TreeDecomposition heuristic_td(const MultiGraph& g) {
    if (g.vertex_count() == 0) throw Error(ErrorCode::PreconditionViolated, "empty graph");
    TreeDecomposition fill = elimination_td(g, true);
    TreeDecomposition degree = elimination_td(g, false);
    return fill.width() <= degree.width() ? fill : degree;
}

DegreeBoundReport degree_bound_check(const MultiGraph& g, const TreeDecomposition& td, int d) {
    DegreeBoundReport rep;
    int w = td.width();
    rep.max_tree_degree = 0;
    for (VertexId t : td.tree.vertices())
        rep.max_tree_degree = std::max(rep.max_tree_degree, td.tree.degree(t));
    rep.tree_degree_ok = rep.max_tree_degree <= (w + 1) * d;

    rep.components_ok = true;
    for (VertexId t : td.tree.vertices()) {
        std::set<VertexId> rest;
        for (VertexId v : g.vertices())
            if (!td.bags.at(t).count(v)) rest.insert(v);
        if (rest.empty()) {
            if (td.tree.degree(t) > 0) rep.components_ok = false;
            continue;
        }
        MultiGraph sub = induced_subgraph(g, rest);
        if (static_cast<int>(sub.components().size()) < td.tree.degree(t)) rep.components_ok = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gates and rails

namespace {

std::vector<VertexId> longest_tree_path(const MultiGraph& tree) {
    auto farthest = [&](VertexId from) {
        std::map<VertexId, int> dist;
        std::deque<VertexId> queue{from};
        dist[from] = 0;
        VertexId best = from;
        while (!queue.empty()) {
            VertexId v = queue.front();
            queue.pop_front();
            if (dist[v] > dist[best] || (dist[v] == dist[best] && v < best)) best = v;
            for (EdgeId e : tree.incident_edges(v)) {
                VertexId w = tree.other_end(e, v);
                if (!dist.count(w)) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        return best;
    };
    VertexId a = farthest(*tree.vertices().begin());
    VertexId b = farthest(a);
    return tree_path(tree, a, b);
}

// Subdivide the path with intersection bags so separators show up as bags of
// their own; gate sizes then match what rails can actually deliver.
void normalize_path(TreeDecomposition& td, std::vector<VertexId>& path) {
    std::vector<VertexId> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        out.push_back(path[i]);
        const auto& a = td.bags.at(path[i]);
        const auto& b = td.bags.at(path[i + 1]);
        std::set<VertexId> inter;
        for (VertexId v : a)
            if (b.count(v)) inter.insert(v);
        if (inter == a || inter == b || inter.empty()) continue;
        EdgeId joining = -1;
        for (EdgeId e : td.tree.incident_edges(path[i]))
            if (td.tree.other_end(e, path[i]) == path[i + 1]) {
                joining = e;
                break;
            }
        VertexId fresh = td.tree.peek_next_vertex_id();
        td.tree.add_vertex(fresh);
        td.tree.remove_edge(joining);
        td.tree.add_edge(path[i], fresh);
        td.tree.add_edge(fresh, path[i + 1]);
        td.bags[fresh] = inter;
        out.push_back(fresh);
    }
    out.push_back(path.back());
    path = out;
}

struct Refined {
    std::vector<std::size_t> positions;
    std::set<VertexId> common;
};

bool constant_pairwise(const std::vector<std::set<VertexId>>& bags,
                       const std::vector<std::size_t>& idx, std::set<VertexId>& common_out) {
    if (idx.size() < 2) {
        common_out.clear();
        return true;
    }
    std::set<VertexId> common;
    for (VertexId v : bags[idx[0]])
        if (bags[idx[1]].count(v)) common.insert(v);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            std::set<VertexId> inter;
            for (VertexId v : bags[idx[a]])
                if (bags[idx[b]].count(v)) inter.insert(v);
            if (inter != common) return false;
        }
    common_out = std::move(common);
    return true;
}

// Constant-pairwise-intersection refinement: either peel the most frequent
// vertex and recurse inside its trace, step around it, or space the picks
// wider than any trace (W2 makes traces consecutive, so spaced bags are
// pairwise disjoint). The longest outcome wins.
Refined refine_constant_intersection(const std::vector<std::set<VertexId>>& bags,
                                     std::vector<std::size_t> idx) {
    Refined rf;
    std::set<VertexId> common;
    if (constant_pairwise(bags, idx, common)) {
        rf.positions = std::move(idx);
        rf.common = std::move(common);
        return rf;
    }
    std::map<VertexId, int> freq;
    for (std::size_t i : idx)
        for (VertexId v : bags[i]) ++freq[v];
    VertexId pivot = -1;
    int best = 1;
    for (const auto& [v, c] : freq)
        if (c > best) {
            best = c;
            pivot = v;
        }

    std::vector<std::size_t> with, without;
    for (std::size_t i : idx)
        (bags[i].count(pivot) ? with : without).push_back(i);

    std::vector<std::set<VertexId>> stripped = bags;
    for (std::size_t i : with) stripped[i].erase(pivot);
    Refined a = refine_constant_intersection(stripped, with);
    a.common.insert(pivot);
    Refined b = refine_constant_intersection(bags, std::move(without));

    Refined c;
    for (std::size_t i = 0; i < idx.size(); i += static_cast<std::size_t>(best))
        c.positions.push_back(idx[i]);

    Refined* winner = &a;
    if (b.positions.size() > winner->positions.size()) winner = &b;
    if (c.positions.size() > winner->positions.size()) winner = &c;
    return std::move(*winner);
}

}  // namespace

std::optional<GatesReport> find_gates(const MultiGraph& g, const TreeDecomposition& td, int n_min) {
    check_structure(g, td);
    if (n_min < 2) n_min = 2;

    GatesReport report;
    report.td = td;
    std::vector<VertexId> path = longest_tree_path(report.td.tree);
    if (path.size() >= 3) normalize_path(report.td, path);
    report.path = path;
    if (path.size() < static_cast<std::size_t>(n_min) + 2) return std::nullopt;

    std::vector<VertexId> interior(path.begin() + 1, path.end() - 1);
    std::vector<std::set<VertexId>> bags;
    for (VertexId t : interior) bags.push_back(report.td.bags.at(t));

    int width = report.td.width();
    struct Candidate {
        int s;
        std::vector<std::size_t> positions;
        std::set<VertexId> common;
    };
    std::vector<Candidate> candidates;
    for (int s = 1; s <= width + 1; ++s) {
        // maximal windows where every interior bag has size >= s
        std::size_t i = 0;
        while (i < bags.size()) {
            if (static_cast<int>(bags[i].size()) < s) {
                ++i;
                continue;
            }
            std::size_t j = i;
            std::vector<std::size_t> exact;
            while (j < bags.size() && static_cast<int>(bags[j].size()) >= s) {
                if (static_cast<int>(bags[j].size()) == s) exact.push_back(j);
                ++j;
            }
            if (static_cast<int>(exact.size()) >= 2) {
                Refined rf = refine_constant_intersection(bags, exact);
                std::set<VertexId> common;
                if (static_cast<int>(rf.positions.size()) >= 2 &&
                    constant_pairwise(bags, rf.positions, common))
                    candidates.push_back({s, rf.positions, common});
            }
            i = j;
        }
    }
    // most gates first; ties toward the smaller gate size
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.positions.size() != b.positions.size()) return a.positions.size() > b.positions.size();
        return a.s < b.s;
    });

    for (const Candidate& cand : candidates) {
        if (static_cast<int>(cand.positions.size()) < n_min) continue;
        std::vector<VertexId> gates;
        for (std::size_t p : cand.positions) gates.push_back(interior[p]);

        const auto& first_bag = report.td.bags.at(gates.front());
        const auto& last_bag = report.td.bags.at(gates.back());
        PathFamily rails_fam = vertex_disjoint_paths(g, first_bag, last_bag);
        if (static_cast<int>(rails_fam.size()) != cand.s) continue;

        // each rail must meet each gate exactly once
        std::vector<std::vector<VertexId>> hits(rails_fam.size());
        bool ok = true;
        for (std::size_t j = 0; j < rails_fam.paths.size() && ok; ++j) {
            for (VertexId gt : gates) {
                const auto& bag = report.td.bags.at(gt);
                VertexId hit = -1;
                int count = 0;
                for (VertexId v : rails_fam.paths[j].vertices)
                    if (bag.count(v)) {
                        hit = v;
                        ++count;
                    }
                if (count != 1) {
                    ok = false;
                    break;
                }
                hits[j].push_back(hit);
            }
        }
        if (!ok) continue;

        report.gates = gates;
        report.s = cand.s;
        report.common = cand.common;
        report.rails = rails_fam.paths;
        report.rail_gate_hits = hits;

        // ranges Y[t_i, t_{i+1}) between consecutive gates
        std::map<VertexId, std::size_t> path_pos;
        for (std::size_t i = 0; i < path.size(); ++i) path_pos[path[i]] = i;
        // attachment of hanging subtrees to the path
        std::map<VertexId, VertexId> attach;
        std::deque<VertexId> queue;
        for (VertexId p : path) {
            attach[p] = p;
            queue.push_back(p);
        }
        while (!queue.empty()) {
            VertexId t = queue.front();
            queue.pop_front();
            for (EdgeId e : report.td.tree.incident_edges(t)) {
                VertexId t2 = report.td.tree.other_end(e, t);
                if (!attach.count(t2)) {
                    attach[t2] = attach[t];
                    queue.push_back(t2);
                }
            }
        }
        report.ranges.clear();
        for (std::size_t gi = 0; gi + 1 < gates.size(); ++gi) {
            std::size_t lo = path_pos.at(gates[gi]), hi = path_pos.at(gates[gi + 1]);
            std::set<VertexId> range;
            for (const auto& [t, at] : attach) {
                std::size_t pos = path_pos.at(at);
                bool in_range = (t == at) ? (pos >= lo && pos <= hi) : (pos >= lo && pos < hi);
                if (!in_range) continue;
                const auto& bag = report.td.bags.at(t);
                range.insert(bag.begin(), bag.end());
            }
            report.ranges.push_back(std::move(range));
        }
        return report;
    }
    return std::nullopt;
}

std::optional<std::pair<int, int>> avoid_u_window(const GatesReport& report, const MultiGraph& g,
                                                  int m) {
    int n = static_cast<int>(report.gates.size());
    if (m < 2 || m > n) return std::nullopt;
    std::set<VertexId> nu = g.neighborhood(report.common);
    for (int k = 0; k + m <= n; ++k) {
        bool ok = true;
        for (int i = k; i + 1 < k + m && ok; ++i)
            for (VertexId v : report.ranges[i]) {
                if (report.common.count(v)) continue;
                if (nu.count(v)) {
                    ok = false;
                    break;
                }
            }
        if (ok) return std::make_pair(k, k + m);
    }
    return std::nullopt;
}

RingDecomposition build_ring(const MultiGraph& g, const GatesReport& report, int window_start,
                             int window_len) {
    int n_gates = static_cast<int>(report.gates.size());
    if (window_len < 4 || window_start < 0 || window_start + window_len > n_gates)
        throw Error(ErrorCode::WindowTooSmall, "need at least 4 gates inside the report");
    int n = window_len - 1;  // ring length

    RingDecomposition ring;
    ring.width = report.s - static_cast<int>(report.common.size());
    ring.segments.resize(n + 1);

    std::set<EdgeId> inner_edges;
    for (int i = 1; i <= n; ++i) {
        const std::set<VertexId>& range = report.ranges[window_start + i - 1];
        const std::set<VertexId>& far_gate =
            report.td.bags.at(report.gates[window_start + i]);
        SubgraphSpec seg;
        for (VertexId v : range)
            if (!report.common.count(v)) seg.vertices.insert(v);
        for (const auto& [id, ep] : g.edges()) {
            if (!seg.vertices.count(ep.first) || !seg.vertices.count(ep.second)) continue;
            if (far_gate.count(ep.first) && far_gate.count(ep.second)) continue;
            seg.edges.insert(id);
            inner_edges.insert(id);
        }
        ring.segments[i] = std::move(seg);
    }

    SubgraphSpec g0;
    for (const auto& [id, ep] : g.edges())
        if (!inner_edges.count(id)) {
            g0.edges.insert(id);
            g0.vertices.insert(ep.first);
            g0.vertices.insert(ep.second);
        }
    const auto& first_gate = report.td.bags.at(report.gates[window_start]);
    const auto& last_gate = report.td.bags.at(report.gates[window_start + window_len - 1]);
    g0.vertices.insert(first_gate.begin(), first_gate.end());
    g0.vertices.insert(last_gate.begin(), last_gate.end());
    std::set<VertexId> seen;
    for (const auto& seg : ring.segments) seen.insert(seg.vertices.begin(), seg.vertices.end());
    seen.insert(g0.vertices.begin(), g0.vertices.end());
    for (VertexId v : g.vertices())
        if (!seen.count(v)) g0.vertices.insert(v);
    ring.segments[0] = std::move(g0);

    // rails restricted to the window, dropping the zero-length ones at U
    for (std::size_t j = 0; j < report.rails.size(); ++j) {
        const Path& rail = report.rails[j];
        if (rail.length() == 0 && report.common.count(rail.front())) continue;
        VertexId from = report.rail_gate_hits[j][window_start];
        VertexId to = report.rail_gate_hits[j][window_start + window_len - 1];
        ring.rails.push_back(rail.subpath(from, to));
    }
    return ring;
}

std::vector<std::set<VertexId>> ring_interfaces(const RingDecomposition& ring) {
    int n = ring.length();
    std::vector<std::set<VertexId>> out;
    for (int i = 1; i <= n + 1; ++i) {
        const auto& a = ring.segments[i - 1].vertices;
        const auto& b = ring.segments[i % (n + 1)].vertices;
        std::set<VertexId> inter;
        for (VertexId v : a)
            if (b.count(v)) inter.insert(v);
        out.push_back(std::move(inter));
    }
    return out;
}

RingReport verify_ring(const MultiGraph& g, const RingDecomposition& ring) {
    RingReport rep;
    int n = ring.length();
    if (n < 3) {
        rep.detail = "ring length below 3";
        return rep;
    }
    for (const auto& seg : ring.segments) {
        for (VertexId v : seg.vertices)
            if (!g.has_vertex(v)) {
                rep.detail = "segment vertex not in host";
                return rep;
            }
        for (EdgeId e : seg.edges) {
            if (!g.has_edge(e)) {
                rep.detail = "segment edge not in host";
                return rep;
            }
            auto [a, b] = g.endpoints(e);
            if (!seg.vertices.count(a) || !seg.vertices.count(b)) {
                rep.detail = "segment edge leaves its vertex set";
                return rep;
            }
        }
    }

    std::set<VertexId> vs;
    std::set<EdgeId> es;
    for (const auto& seg : ring.segments) {
        vs.insert(seg.vertices.begin(), seg.vertices.end());
        es.insert(seg.edges.begin(), seg.edges.end());
    }
    rep.r1 = vs == g.vertices() && es.size() == g.edge_count();

    rep.r2 = true;
    for (int i = 0; i <= n && rep.r2; ++i)
        for (int j = i + 1; j <= n && rep.r2; ++j) {
            bool consecutive = (j == i + 1) || (i == 0 && j == n);
            if (consecutive) {
                for (EdgeId e : ring.segments[i].edges)
                    if (ring.segments[j].edges.count(e)) {
                        rep.r2 = false;
                        rep.detail = "consecutive segments share an edge";
                        break;
                    }
            } else {
                for (VertexId v : ring.segments[i].vertices)
                    if (ring.segments[j].vertices.count(v)) {
                        rep.r2 = false;
                        rep.detail = "non-consecutive segments share vertex " + std::to_string(v);
                        break;
                    }
            }
        }

    auto interfaces = ring_interfaces(ring);
    rep.r3 = true;
    for (const auto& w : interfaces)
        if (static_cast<int>(w.size()) != ring.width) {
            rep.r3 = false;
            rep.detail = "interface size " + std::to_string(w.size()) + " != width";
            break;
        }

    rep.r4 = true;
    for (int i = 1; i <= n && rep.r4; ++i) {
        MultiGraph seg;
        for (VertexId v : ring.segments[i].vertices) seg.add_vertex(v);
        for (EdgeId e : ring.segments[i].edges) {
            auto [a, b] = g.endpoints(e);
            seg.add_edge_with_id(e, a, b);
        }
        const auto& wi = interfaces[i - 1];
        const auto& wj = interfaces[i];
        if (wi.empty() || wj.empty()) {
            rep.r4 = false;
            break;
        }
        if (vertex_disjoint_path_count(seg, wi, wj) < ring.width) {
            rep.r4 = false;
            rep.detail = "segment " + std::to_string(i) + " lacks width disjoint paths";
        }
    }
    return rep;
}

RingDecomposition absorb(const MultiGraph& g, const RingDecomposition& ring, int i) {
    std::ignore = g;
    int n = ring.length();
    if (n - 1 < 3) throw Error(ErrorCode::TooShort, "absorption would drop length below 3");
    if (i < 1 || i > n) throw Error(ErrorCode::InvalidParams, "absorb index out of range");

    RingDecomposition out;
    out.width = ring.width;
    out.rails = ring.rails;
    auto merge = [](const SubgraphSpec& a, const SubgraphSpec& b) {
        SubgraphSpec m = a;
        m.vertices.insert(b.vertices.begin(), b.vertices.end());
        m.edges.insert(b.edges.begin(), b.edges.end());
        return m;
    };
    if (i == n) {
        out.segments.push_back(merge(ring.segments[0], ring.segments[n]));
        for (int j = 1; j < n; ++j) out.segments.push_back(ring.segments[j]);
    } else {
        for (int j = 0; j < i; ++j) out.segments.push_back(ring.segments[j]);
        out.segments.push_back(merge(ring.segments[i], ring.segments[i + 1]));
        for (int j = i + 2; j <= n; ++j) out.segments.push_back(ring.segments[j]);
    }
    return out;
}

bool segments_connected(const MultiGraph& g, const RingDecomposition& ring) {
    for (int i = 1; i <= ring.length(); ++i) {
        MultiGraph seg;
        for (VertexId v : ring.segments[i].vertices) seg.add_vertex(v);
        for (EdgeId e : ring.segments[i].edges) {
            auto [a, b] = g.endpoints(e);
            seg.add_edge_with_id(e, a, b);
        }
        if (!seg.connected()) return false;
    }
    return true;
}

RingDecomposition connectify(const MultiGraph& g, const RingDecomposition& ring, int m) {
    if (m < 3) throw Error(ErrorCode::InvalidParams, "need m >= 3 groups");
    RingDecomposition cur = ring;
    for (;;) {
        int n = cur.length();
        if (n < 3) throw Error(ErrorCode::TooShort, "ring too short to connectify");
        int groups = std::min(m, n);

        // chunk G_1..G_n into `groups` consecutive unions
        std::vector<std::pair<int, int>> spans;  // [from, to] segment indices
        int base = n / groups, extra = n % groups, at = 1;
        for (int gi = 0; gi < groups; ++gi) {
            int len = base + (gi < extra ? 1 : 0);
            spans.push_back({at, at + len - 1});
            at += len;
        }

        int bad = -1;
        std::vector<SubgraphSpec> unions(spans.size());
        for (std::size_t gi = 0; gi < spans.size(); ++gi) {
            SubgraphSpec u;
            for (int j = spans[gi].first; j <= spans[gi].second; ++j) {
                u.vertices.insert(cur.segments[j].vertices.begin(), cur.segments[j].vertices.end());
                u.edges.insert(cur.segments[j].edges.begin(), cur.segments[j].edges.end());
            }
            MultiGraph sub;
            for (VertexId v : u.vertices) sub.add_vertex(v);
            for (EdgeId e : u.edges) {
                auto [a, b] = g.endpoints(e);
                sub.add_edge_with_id(e, a, b);
            }
            unions[gi] = std::move(u);
            if (bad < 0 && !sub.connected()) bad = static_cast<int>(gi);
        }

        if (bad < 0) {
            RingDecomposition out;
            out.width = cur.width;
            out.rails = cur.rails;
            out.segments.push_back(cur.segments[0]);
            for (auto& u : unions) out.segments.push_back(std::move(u));
            return out;
        }

        if (cur.rails.empty())
            throw Error(ErrorCode::PreconditionViolated, "disconnected chunk but no rails carried");

        // restrict to the component of the bad chunk holding the fewest rails
        MultiGraph sub;
        for (VertexId v : unions[bad].vertices) sub.add_vertex(v);
        for (EdgeId e : unions[bad].edges) {
            auto [a, b] = g.endpoints(e);
            sub.add_edge_with_id(e, a, b);
        }
        std::vector<std::set<VertexId>> comps = sub.components();
        int best_comp = -1;
        std::size_t best_count = 0;
        for (std::size_t ci = 0; ci < comps.size(); ++ci) {
            std::size_t count = 0;
            for (const Path& rail : cur.rails)
                for (VertexId v : rail.vertices)
                    if (comps[ci].count(v)) {
                        ++count;
                        break;
                    }
            if (count == 0) continue;
            if (best_comp < 0 || count < best_count) {
                best_comp = static_cast<int>(ci);
                best_count = count;
            }
        }
        if (best_comp < 0)
            throw Error(ErrorCode::PreconditionViolated, "no component carries a rail");
        const std::set<VertexId>& k = comps[best_comp];

        RingDecomposition next;
        next.width = static_cast<int>(best_count);
        for (int j = spans[bad].first; j <= spans[bad].second; ++j) {
            SubgraphSpec seg;
            for (VertexId v : cur.segments[j].vertices)
                if (k.count(v)) seg.vertices.insert(v);
            for (EdgeId e : cur.segments[j].edges) {
                auto [a, b] = g.endpoints(e);
                if (k.count(a) && k.count(b)) seg.edges.insert(e);
            }
            next.segments.push_back(std::move(seg));
        }
        // new G_0: everything not inside the kept component's segments
        std::set<EdgeId> kept;
        for (const auto& seg : next.segments) kept.insert(seg.edges.begin(), seg.edges.end());
        SubgraphSpec g0;
        for (const auto& [id, ep] : g.edges())
            if (!kept.count(id)) {
                g0.edges.insert(id);
                g0.vertices.insert(ep.first);
                g0.vertices.insert(ep.second);
            }
        std::set<VertexId> seen;
        for (const auto& seg : next.segments) seen.insert(seg.vertices.begin(), seg.vertices.end());
        seen.insert(g0.vertices.begin(), g0.vertices.end());
        for (VertexId v : g.vertices())
            if (!seen.count(v)) g0.vertices.insert(v);
        next.segments.insert(next.segments.begin(), std::move(g0));

        for (const Path& rail : cur.rails) {
            // the rail's stretch inside K becomes the restricted rail
            std::vector<VertexId> inside;
            for (VertexId v : rail.vertices)
                if (k.count(v)) inside.push_back(v);
            if (inside.empty()) continue;
            next.rails.push_back(rail.subpath(inside.front(), inside.back()));
        }
        if (next.length() == cur.length() && next.width == cur.width &&
            next.segments[1].vertices == cur.segments[1].vertices)
            throw Error(ErrorCode::NotFound, "connectify made no progress");
        cur = std::move(next);
    }
}

}  // namespace imm
