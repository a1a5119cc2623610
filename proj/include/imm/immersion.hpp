#pragma once

#include <optional>

#include "imm/budget.hpp"
#include "imm/connectivity.hpp"
#include "imm/multigraph.hpp"

namespace imm {

/// Witness that `pattern` immerses in a host graph: distinct terminals plus
/// pairwise edge-disjoint host paths, one per pattern edge.
struct ImmersionCertificate {
    MultiGraph pattern;
    std::map<VertexId, VertexId> terminal_map;  // pattern vertex -> host vertex
    std::map<EdgeId, Path> edge_paths;          // pattern edge -> host path
};

struct VerifyResult {
    bool ok = true;
    std::string violation;
};

/// Full check: terminal injectivity, per-path endpoints and validity,
/// vertex-simplicity, pairwise edge-disjointness. Reports the first failure.
VerifyResult verify_immersion(const MultiGraph& host, const ImmersionCertificate& cert);

/// Cycle of r vertices with each edge in a parallel class of size t; vertices
/// 0..r-1, class edges get ids i*t..i*t+t-1 between i and (i+1) mod r.
MultiGraph make_ctr_pattern(int t, int r);
bool pattern_is_ctr(const MultiGraph& g, int t, int r);

struct CommonVertex {
    VertexId v;
    std::size_t index_first, index_second;
};

struct PairAlignment {
    std::size_t first, second;
    std::vector<CommonVertex> common_internal;
    bool aligned = true;
};

struct AlignmentReport {
    std::vector<PairAlignment> pairs;
    bool aligned = true;
};

AlignmentReport alignment_report(const PathFamily& family);

/// Repeated swap-at-unaligned-pair until the family is pairwise aligned. Each
/// swap strictly decreases the total edge count, so this terminates. Output
/// has the same cardinality and uses a subset of the input edges.
PathFamily uncross(const PathFamily& family);
std::size_t uncross_swap_count(const PathFamily& family, PathFamily& out);

struct CompatiblePair {
    std::size_t first, second;
    std::vector<VertexId> common;  // in path order, endpoints included
};

/// Aligned pair of same-endpoint paths meeting in >= r vertices, endpoints
/// included, or nullopt.
std::optional<CompatiblePair> find_compatible(const PathFamily& family, int r);

/// An r-compatible family of 4 xy-paths yields C_{2,r}: lift the aligned
/// pair's segments between consecutive common vertices, close with the whole
/// of the other two paths.
ImmersionCertificate compatible_to_c2r(const MultiGraph& host, const PathFamily& family, int r);

struct CompletionResult {
    std::optional<ImmersionCertificate> cert;
    std::optional<EdgeCut> cut;
};

/// Append two edge-disjoint x-y paths found in host minus the partial
/// P_{2,r}'s edges, turning it into C_{2,r}.
CompletionResult complete_double_path(const MultiGraph& host, const ImmersionCertificate& partial,
                                      VertexId x, VertexId y);

/// Double-cycle search: ring-decomposition machinery when the host
/// cooperates, then budgeted terminal-chain search (exhaustive at tiny
/// scale). Returned certificates always verify; none can mean budget ran out.
std::optional<ImmersionCertificate> find_double_cycle(const MultiGraph& g, int r, SearchBudget& budget);

/// The ring-decomposition route on its own: reduce degrees, extract gates and
/// a ring, pull width-plus-one cross paths, uncross, pigeonhole an aligned
/// pair meeting r times, and close with a completion flow. Sound but narrow;
/// find_double_cycle falls back to the chain search when this declines.
std::optional<ImmersionCertificate> double_cycle_via_ring(const MultiGraph& g, int r,
                                                          SearchBudget& budget);

/// Terminal-chain search for C_{t,r} with all terminals drawn from pool.
/// Exhaustive (complete) when exhaustive = true, otherwise greedy flow
/// routing with backtracking over terminal choices.
std::optional<ImmersionCertificate> chain_search_ctr(const MultiGraph& g, int t, int r,
                                                     const std::set<VertexId>& pool,
                                                     SearchBudget& budget, bool exhaustive);

/// Expand a certificate found in a lifted graph back to the original host by
/// replaying the script's edge expansions.
ImmersionCertificate compose_through_script(const MultiGraph& host, const LiftingScript& script,
                                            const ImmersionCertificate& cert_in_reduced);

struct RailsCycle {
    std::vector<Path> rails;
    std::vector<VertexId> cycle_vertices;  // closed: front == back
    std::vector<EdgeId> cycle_edges;
};

/// Tiny-scale exhaustive search for the rails-plus-joining-cycle
/// configuration: w vertex-disjoint entry_i-exit_i paths and a cycle that is
/// edge-disjoint from all of them yet meets at least two in a vertex.
std::optional<RailsCycle> rails_cycle_search(const MultiGraph& block,
                                             const std::vector<VertexId>& entries,
                                             const std::vector<VertexId>& exits, int w,
                                             SearchBudget& budget);

}  // namespace imm
