#pragma once

#include "imm/connectivity.hpp"
#include "imm/multigraph.hpp"

namespace imm {

struct ReductionResult {
    MultiGraph reduced;
    LiftingScript script;
    int k = 0;
};

/// First pair {e, f} at s, in lexicographic edge-id order, whose lift keeps
/// lambda(x, y) unchanged for every pair x, y != s. Existence is guaranteed by
/// Mader's theorem when s avoids cut-edges and d(s) != 3.
std::pair<EdgeId, EdgeId> find_liftable_pair(const MultiGraph& g, VertexId s);

/// Lift down to the degree-{k, k+1} immersion on the same vertex set:
/// repeatedly take the lowest-id vertex of degree >= k + 2 and apply a
/// liftable pair there. Output stays k-edge-connected.
ReductionResult reduce_degrees(const MultiGraph& g, int k);

/// All-pairs local edge-connectivity over a fixed vertex order; the lifting
/// verifier compares these matrices before and after a candidate lift.
std::vector<std::vector<int>> lambda_matrix(const MultiGraph& g, const std::vector<VertexId>& order);

}  // namespace imm
