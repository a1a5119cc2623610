#include "imm/oracle.hpp"

#include <algorithm>
#include <functional>

#include "imm/budget.hpp"

namespace imm {

namespace {

void enforce(const MultiGraph& g, const OracleBudget& budget) {
    if (static_cast<int>(g.vertex_count()) > budget.max_vertices ||
        static_cast<int>(g.edge_count()) > budget.max_edges)
        throw Error(ErrorCode::BudgetRefusal, "instance exceeds the oracle ceiling");
}

struct Clock {
    SearchBudget inner;
    explicit Clock(std::int64_t ms) : inner(-1, ms) {}
    void tick() {
        if (!inner.tick()) throw Error(ErrorCode::BudgetRefusal, "oracle wall clock exceeded");
    }
};

// All vertex-simple a-b paths avoiding `used`, lexicographic, complete.
bool for_each_path(const MultiGraph& g, VertexId a, VertexId b, std::set<EdgeId>& used,
                   Clock& clock, const std::function<bool(const Path&)>& emit) {
    Path cur;
    cur.vertices.push_back(a);
    std::set<VertexId> on_path{a};
    bool keep_going = true;

    std::function<void(VertexId)> dfs = [&](VertexId v) {
        clock.tick();
        if (!keep_going) return;
        if (v == b) {
            keep_going = emit(cur);
            return;
        }
        for (EdgeId e : g.incident_edges(v)) {
            if (!keep_going) return;
            if (used.count(e)) continue;
            VertexId w = g.other_end(e, v);
            if (on_path.count(w)) continue;
            cur.vertices.push_back(w);
            cur.edges.push_back(e);
            on_path.insert(w);
            dfs(w);
            on_path.erase(w);
            cur.edges.pop_back();
            cur.vertices.pop_back();
        }
    };
    dfs(a);
    return keep_going;
}

}  // namespace

std::optional<ImmersionCertificate> brute_immersion(const MultiGraph& g, const MultiGraph& h,
                                                    const OracleBudget& budget) {
    enforce(g, budget);
    if (h.vertex_count() > g.vertex_count() || h.edge_count() > g.edge_count())
        return std::nullopt;
    Clock clock(budget.max_millis);

    // pattern vertices by descending degree, host candidates need the degree
    std::vector<VertexId> pattern_vertices(h.vertices().begin(), h.vertices().end());
    std::sort(pattern_vertices.begin(), pattern_vertices.end(), [&](VertexId a, VertexId b) {
        if (h.degree(a) != h.degree(b)) return h.degree(a) > h.degree(b);
        return a < b;
    });
    std::vector<EdgeId> pattern_edges;
    for (const auto& [id, ep] : h.edges()) pattern_edges.push_back(id);

    std::map<VertexId, VertexId> terminal;
    std::set<VertexId> taken;
    std::map<EdgeId, Path> routed;
    std::set<EdgeId> used;
    std::optional<ImmersionCertificate> found;

    std::function<bool(std::size_t)> route = [&](std::size_t ei) -> bool {
        if (ei == pattern_edges.size()) {
            ImmersionCertificate cert;
            cert.pattern = h;
            cert.terminal_map = terminal;
            cert.edge_paths = routed;
            if (verify_immersion(g, cert).ok) {
                found = std::move(cert);
                return true;
            }
            return false;
        }
        auto [pa, pb] = h.endpoints(pattern_edges[ei]);
        VertexId a = terminal.at(pa), b = terminal.at(pb);
        bool done = false;
        for_each_path(g, a, b, used, clock, [&](const Path& p) {
            routed[pattern_edges[ei]] = p;
            for (EdgeId e : p.edges) used.insert(e);
            done = route(ei + 1);
            for (EdgeId e : p.edges) used.erase(e);
            routed.erase(pattern_edges[ei]);
            return !done;
        });
        return done;
    };

    std::function<bool(std::size_t)> place = [&](std::size_t vi) -> bool {
        clock.tick();
        if (vi == pattern_vertices.size()) return route(0);
        VertexId pv = pattern_vertices[vi];
        for (VertexId cand : g.vertices()) {
            if (taken.count(cand)) continue;
            if (g.degree(cand) < h.degree(pv)) continue;
            terminal[pv] = cand;
            taken.insert(cand);
            if (place(vi + 1)) return true;
            taken.erase(cand);
            terminal.erase(pv);
        }
        return false;
    };

    place(0);
    return found;
}

std::optional<MinorCertificate> brute_minor(const MultiGraph& g, const MultiGraph& h,
                                            const OracleBudget& budget) {
    enforce(g, budget);
    if (h.vertex_count() > g.vertex_count()) return std::nullopt;
    Clock clock(budget.max_millis);

    std::vector<VertexId> host_vertices(g.vertices().begin(), g.vertices().end());
    std::vector<VertexId> pattern_vertices(h.vertices().begin(), h.vertices().end());
    int k = static_cast<int>(pattern_vertices.size());
    std::map<VertexId, int> assign;  // host vertex -> pattern index, -1 unused

    auto complete_check = [&]() -> std::optional<MinorCertificate> {
        MinorCertificate cert;
        cert.pattern = h;
        for (int i = 0; i < k; ++i) cert.branch_sets[pattern_vertices[i]] = {};
        for (const auto& [v, ai] : assign)
            if (ai >= 0) cert.branch_sets[pattern_vertices[ai]].insert(v);
        for (int i = 0; i < k; ++i) {
            const auto& bs = cert.branch_sets[pattern_vertices[i]];
            if (bs.empty()) return std::nullopt;
            if (!induced_subgraph(g, bs).connected()) return std::nullopt;
        }
        // distinct witnesses, smallest ids first
        std::set<EdgeId> taken;
        for (const auto& [pe, ep] : h.edges()) {
            const auto& sa = cert.branch_sets[ep.first];
            const auto& sb = cert.branch_sets[ep.second];
            EdgeId pick = -1;
            for (const auto& [id, gep] : g.edges()) {
                if (taken.count(id)) continue;
                bool fwd = sa.count(gep.first) && sb.count(gep.second);
                bool rev = sa.count(gep.second) && sb.count(gep.first);
                if (fwd || rev) {
                    pick = id;
                    break;
                }
            }
            if (pick < 0) return std::nullopt;
            taken.insert(pick);
            cert.edge_witness[pe] = pick;
        }
        if (!verify_minor(g, cert).ok) return std::nullopt;
        return cert;
    };

    std::optional<MinorCertificate> found;
    std::function<bool(std::size_t)> enumerate = [&](std::size_t vi) -> bool {
        clock.tick();
        if (vi == host_vertices.size()) {
            found = complete_check();
            return found.has_value();
        }
        std::size_t rest = host_vertices.size() - vi;
        int missing = 0;
        std::set<int> present;
        for (const auto& [v, ai] : assign)
            if (ai >= 0) present.insert(ai);
        missing = k - static_cast<int>(present.size());
        if (static_cast<std::size_t>(missing) > rest) return false;

        for (int ai = -1; ai < k; ++ai) {
            assign[host_vertices[vi]] = ai;
            if (enumerate(vi + 1)) return true;
        }
        assign.erase(host_vertices[vi]);
        return false;
    };
    enumerate(0);
    return found;
}

EdgeCut brute_min_cut(const MultiGraph& g, const std::set<VertexId>& a,
                      const std::set<VertexId>& b) {
    if (g.edge_count() > 20) throw Error(ErrorCode::TooLarge, "brute cut ceiling is 20 edges");
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySet, "cut needs nonempty sides");
    for (VertexId v : a)
        if (b.count(v)) throw Error(ErrorCode::PreconditionViolated, "sides must be disjoint");

    // isolated vertices never change a boundary, so only edge-incident
    // vertices join the enumeration
    std::vector<VertexId> free_vertices;
    for (VertexId v : g.vertices())
        if (!a.count(v) && !b.count(v) && g.degree(v) > 0) free_vertices.push_back(v);
    if (free_vertices.size() > 30)
        throw Error(ErrorCode::TooLarge, "brute cut enumeration limit");

    EdgeCut best;
    bool have = false;
    for (std::uint64_t mask = 0; mask < (1ull << free_vertices.size()); ++mask) {
        std::set<VertexId> side = a;
        for (std::size_t i = 0; i < free_vertices.size(); ++i)
            if (mask & (1ull << i)) side.insert(free_vertices[i]);
        std::set<EdgeId> cut = g.edge_boundary(side);
        if (!have || cut.size() < best.cut_edges.size()) {
            best.side = std::move(side);
            best.cut_edges = std::move(cut);
            have = true;
        }
    }
    return best;
}

}  // namespace imm
