#pragma once

#include <optional>

#include "imm/multigraph.hpp"

namespace imm {

struct EdgeCut {
    std::set<VertexId> side;
    std::set<EdgeId> cut_edges;
};

struct PathFamily {
    std::vector<Path> paths;
    std::set<VertexId> ends_a, ends_b;

    std::size_t size() const { return paths.size(); }
    bool pairwise_edge_disjoint() const;
    std::set<EdgeId> all_edges() const;
};

/// Local edge-connectivity lambda(u, v; g): unit-capacity max flow.
int local_edge_connectivity(const MultiGraph& g, VertexId u, VertexId v);

/// Same, but stop augmenting once `cap` is reached (cap < 0 means no cap).
int local_edge_connectivity_capped(const MultiGraph& g, VertexId u, VertexId v, int cap);

struct EdgeDisjointResult {
    std::optional<PathFamily> family;           // k paths when feasible
    std::optional<EdgeCut> cut;                 // witness of size < k otherwise
    bool feasible() const { return family.has_value(); }
};

/// k pairwise edge-disjoint A-to-B paths by flow decomposition, or an
/// infeasible witness cut. Decomposition follows lowest edge id first.
EdgeDisjointResult edge_disjoint_paths(const MultiGraph& g, const std::set<VertexId>& a,
                                       const std::set<VertexId>& b, int k);

struct ConnectivityResult {
    bool ok = false;
    std::optional<EdgeCut> witness;  // cut of size < k when !ok
};

ConnectivityResult is_k_edge_connected(const MultiGraph& g, int k);

/// True iff no edge set of size < k separates two members of S. Implemented
/// with a fixed root: lambda(r, v) >= k for all v in S suffices.
ConnectivityResult set_k_edge_connected(const MultiGraph& g, const std::set<VertexId>& s, int k);

/// Maximum family of pairwise vertex-disjoint A-to-B paths via node-splitting
/// flow. Vertices in both A and B become zero-length paths.
PathFamily vertex_disjoint_paths(const MultiGraph& g, const std::set<VertexId>& a,
                                 const std::set<VertexId>& b);

int vertex_disjoint_path_count(const MultiGraph& g, const std::set<VertexId>& a,
                               const std::set<VertexId>& b);

/// Internally vertex-disjoint u-v paths (endpoints shared), for vertex
/// connectivity checks.
int internally_disjoint_paths(const MultiGraph& g, VertexId u, VertexId v);

/// Vertex connectivity >= k test for simple graphs.
bool is_k_vertex_connected(const MultiGraph& g, int k);

}  // namespace imm
