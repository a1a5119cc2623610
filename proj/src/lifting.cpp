#include "imm/lifting.hpp"

#include <algorithm>
#include <deque>

namespace imm {

namespace {

// Self-contained unit flow over a fixed vertex indexing. reduce_degrees calls
// lambda thousands of times on near-identical graphs, so the network is built
// once per graph and reset between terminal pairs.
struct PairFlow {
    int n;
    std::vector<std::vector<int>> out;
    struct Arc { int to; int cap; };
    std::vector<Arc> arcs;

    explicit PairFlow(int nodes) : n(nodes), out(nodes) {}

    void add_edge(int u, int v) {
        int id = static_cast<int>(arcs.size());
        arcs.push_back({v, 1});
        arcs.push_back({u, 1});
        out[u].push_back(id);
        out[v].push_back(id + 1);
    }

    void reset() {
        for (std::size_t i = 0; i < arcs.size(); i += 2) {
            arcs[i].cap = 1;
            arcs[i + 1].cap = 1;
        }
    }

    // Max flow capped at `limit`; early-stops as soon as the cap is met.
    int max_flow(int s, int t, int limit) {
        int flow = 0;
        std::vector<int> parent(n);
        while (limit < 0 || flow < limit) {
            std::fill(parent.begin(), parent.end(), -1);
            std::deque<int> queue{s};
            parent[s] = -2;
            bool reached = false;
            while (!queue.empty() && !reached) {
                int v = queue.front();
                queue.pop_front();
                for (int id : out[v]) {
                    if (arcs[id].cap <= 0 || parent[arcs[id].to] != -1) continue;
                    parent[arcs[id].to] = id;
                    if (arcs[id].to == t) {
                        reached = true;
                        break;
                    }
                    queue.push_back(arcs[id].to);
                }
            }
            if (!reached) break;
            for (int v = t; v != s;) {
                int id = parent[v];
                arcs[id].cap -= 1;
                arcs[id ^ 1].cap += 1;
                v = arcs[id ^ 1].to;
            }
            ++flow;
        }
        return flow;
    }
};

// Network over every vertex of g (paths may route anywhere, including
// through the lifted vertex) with the measured pairs indexed separately.
std::map<VertexId, int> full_index(const MultiGraph& g) {
    std::map<VertexId, int> index;
    for (VertexId v : g.vertices()) index[v] = static_cast<int>(index.size());
    return index;
}

PairFlow build_flow(const MultiGraph& g, const std::map<VertexId, int>& index) {
    PairFlow net(static_cast<int>(index.size()));
    for (const auto& [id, ep] : g.edges()) net.add_edge(index.at(ep.first), index.at(ep.second));
    return net;
}

// Does the lifted graph preserve lambda(x, y) for every listed pair? Compares
// against the base matrix with early abort; lifting never increases lambda
// for pairs avoiding s, so matching the base value is enough.
bool preserves_lambda(const MultiGraph& lifted, const std::vector<VertexId>& order,
                      const std::vector<std::vector<int>>& base) {
    auto index = full_index(lifted);
    PairFlow net = build_flow(lifted, index);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            net.reset();
            int want = base[i][j];
            if (net.max_flow(index.at(order[i]), index.at(order[j]), want) < want) return false;
        }
    return true;
}

bool incident_to_cut_edge(const MultiGraph& g, VertexId s) {
    for (EdgeId e : g.incident_edges(s)) {
        auto [a, b] = g.endpoints(e);
        if (g.parallel_count(a, b) > 1) continue;
        MultiGraph h = g;
        h.remove_edge(e);
        // cut-edge iff its removal separates its own endpoints
        if (local_edge_connectivity_capped(h, a, b, 1) == 0) return true;
    }
    return false;
}

}  // namespace

std::vector<std::vector<int>> lambda_matrix(const MultiGraph& g, const std::vector<VertexId>& order) {
    auto index = full_index(g);
    PairFlow net = build_flow(g, index);
    std::size_t n = order.size();
    std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            net.reset();
            m[i][j] = m[j][i] = net.max_flow(index.at(order[i]), index.at(order[j]), -1);
        }
    return m;
}

std::pair<EdgeId, EdgeId> find_liftable_pair(const MultiGraph& g, VertexId s) {
    if (!g.has_vertex(s)) throw Error(ErrorCode::UnknownVertex, "no such vertex");
    if (!g.connected()) throw Error(ErrorCode::PreconditionViolated, "graph must be connected");
    if (g.degree(s) == 3)
        throw Error(ErrorCode::HypothesesViolated, "d(s) = 3 is excluded by Mader's theorem");
    if (g.degree(s) < 2)
        throw Error(ErrorCode::HypothesesViolated, "no edge pair available at s");
    if (incident_to_cut_edge(g, s))
        throw Error(ErrorCode::HypothesesViolated, "s is incident to a cut-edge");

    std::vector<VertexId> order;
    for (VertexId v : g.vertices())
        if (v != s) order.push_back(v);
    auto base = lambda_matrix(g, order);

    std::vector<EdgeId> at_s(g.incident_edges(s).begin(), g.incident_edges(s).end());
    for (std::size_t i = 0; i < at_s.size(); ++i)
        for (std::size_t j = i + 1; j < at_s.size(); ++j) {
            LiftResult lifted = lift_pair(g, at_s[i], at_s[j]);
            if (preserves_lambda(lifted.graph, order, base)) return {at_s[i], at_s[j]};
        }
    throw Error(ErrorCode::NotFound, "no liftable pair found; Mader's theorem guarantees one");
}

ReductionResult reduce_degrees(const MultiGraph& g, int k) {
    if (k <= 1) throw Error(ErrorCode::PreconditionViolated, "need k > 1");
    auto conn = is_k_edge_connected(g, k);
    if (!conn.ok) throw Error(ErrorCode::NotKEdgeConnected, "input is not k-edge-connected");

    ReductionResult res;
    res.k = k;
    res.reduced = g;
    for (;;) {
        VertexId target = -1;
        for (VertexId v : res.reduced.vertices())
            if (res.reduced.degree(v) >= k + 2) {
                target = v;
                break;
            }
        if (target < 0) break;
        auto [e, f] = find_liftable_pair(res.reduced, target);
        LiftResult lifted = lift_pair(res.reduced, e, f);
        LiftStep step;
        step.kind = LiftStep::LiftPair;
        step.lift_e = e;
        step.lift_f = f;
        step.created = lifted.created.value_or(-1);
        res.script.steps.push_back(step);
        res.reduced = std::move(lifted.graph);
    }
    return res;
}

}  // namespace imm
