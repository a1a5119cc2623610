#pragma once

#include <optional>

#include "imm/budget.hpp"
#include "imm/immersion.hpp"
#include "imm/multigraph.hpp"

namespace imm {

struct TreePacking {
    std::vector<std::set<EdgeId>> trees;
    std::set<VertexId> spanned;  // V(g) for spanning packs, S for Steiner packs
};

/// Each tree spans `spanned`, is acyclic and connected, and the trees are
/// pairwise edge-disjoint.
VerifyResult verify_packing(const MultiGraph& g, const TreePacking& packing, bool steiner);

struct SpanningPackResult {
    std::optional<TreePacking> packing;
    // Tutte/Nash-Williams witness when infeasible: a partition with fewer
    // than s(|P| - 1) crossing edges.
    std::optional<std::vector<std::set<VertexId>>> deficient_partition;
};

/// Matroid-union packing of s edge-disjoint spanning trees (exact: finds them
/// whenever they exist).
SpanningPackResult pack_spanning_trees(const MultiGraph& g, int s);

struct SteinerPackResult {
    TreePacking packing;           // may hold fewer than k trees
    bool complete = false;
    std::string diagnostics;
};

/// Greedy S-tree packing with edge-swap repair; verified output, best-effort
/// count.
SteinerPackResult pack_steiner_trees(const MultiGraph& g, const std::set<VertexId>& s, int k);

struct CombStructure {
    enum class Kind { PathShape, StarShape, CombShape } kind;
    std::set<EdgeId> edges;
    std::vector<VertexId> marked;  // ordered marked vertices / leaves in X
    Path spine;                    // path and comb shapes
    VertexId center = -1;          // star shape
    std::vector<Path> teeth;       // star legs or comb teeth, aligned with marked
};

VerifyResult verify_comb_structure(const MultiGraph& tree, const CombStructure& c,
                                   const std::set<VertexId>& x, int t);

/// In a tree with marked set X: a vertex with >= t marked branches gives a
/// subdivided star, >= t branch events along a spine give a subdivided comb,
/// otherwise a path with >= t marked vertices. Throws TooFewMarked when t is
/// out of reach.
CombStructure comb_or_star(const MultiGraph& tree, const std::set<VertexId>& x, int t);

/// One gauge step: C_{p,m} certificate plus three spanning trees of its
/// terminals yields a C_{p+1,n} certificate using only C's paths and the
/// trees' own edges.
ImmersionCertificate gauge_augment(const MultiGraph& host, const ImmersionCertificate& c,
                                   const std::set<EdgeId>& ta, const std::set<EdgeId>& tb,
                                   const std::set<EdgeId>& tc, int n);

struct CtrSearchResult {
    std::optional<ImmersionCertificate> cert;
    std::vector<std::string> stages;  // stage-labelled progress/failure notes
};

/// C_{t,r} pipeline: direct chain search, then (t = 1) cycle search or
/// (t >= 2) spanning-tree packing, double cycle in the first four trees, and
/// t - 2 gauge steps over the remaining tree triples.
CtrSearchResult find_ctr(const MultiGraph& g, int t, int r, SearchBudget& budget);

/// Rooted variant: terminals restricted to S; Steiner trees replace spanning
/// trees.
CtrSearchResult find_ctr_rooted(const MultiGraph& g, const std::set<VertexId>& s, int t, int r,
                                SearchBudget& budget);

/// Drop terminals of a C_{t,R} certificate down to C_{t,r}, r <= R, by
/// concatenating the freed arcs.
ImmersionCertificate shrink_ctr(const MultiGraph& host, const ImmersionCertificate& cert, int t,
                                int r);

}  // namespace imm
