#pragma once

#include <optional>

#include "imm/connectivity.hpp"
#include "imm/multigraph.hpp"

namespace imm {

struct TreeDecomposition {
    MultiGraph tree;
    std::map<VertexId, std::set<VertexId>> bags;

    int width() const;
};

struct TdReport {
    bool w1 = false, w2 = false, w4 = false, w5 = false;
    std::string detail;
    bool lean_shape() const { return w1 && w2 && w4 && w5; }
};

/// Checks W1 (cover + edges), W2 (connected traces), W4 (distinct bags),
/// W5 (branch contributes a vertex). Structural junk throws.
TdReport verify_td(const MultiGraph& g, const TreeDecomposition& td);

struct LinkedViolation {
    VertexId t = -1, t2 = -1;
    int k = 0;
};

struct LinkedResult {
    bool linked = true;
    std::optional<LinkedViolation> violation;
};

/// W3: for every tree pair and every k, either k disjoint bag-to-bag paths or
/// a small bag between. Full quadratic check up to `full_ceiling` tree nodes,
/// deterministic sampling beyond.
LinkedResult verify_linked(const MultiGraph& g, const TreeDecomposition& td, int full_ceiling = 200);

/// Min-fill elimination-order decomposition; valid W1/W2, no width optimality
/// claim.
TreeDecomposition heuristic_td(const MultiGraph& g);

struct DegreeBoundReport {
    bool tree_degree_ok = false;   // Delta(T) <= (w+1) d
    bool components_ok = false;    // g - Y_t has >= deg_T(t) components
    int max_tree_degree = 0;
};

DegreeBoundReport degree_bound_check(const MultiGraph& g, const TreeDecomposition& td, int d);

/// Gates along a tree path: equal bag size s, everything between at least s,
/// constant pairwise intersection U, plus s vertex-disjoint rails threaded
/// through every gate (zero-length rails sit at U).
struct GatesReport {
    TreeDecomposition td;                    // path-normalized copy used below
    std::vector<VertexId> path;              // tree path in td
    std::vector<VertexId> gates;             // ordered subset of path
    int s = 0;
    std::set<VertexId> common;               // U
    std::vector<Path> rails;
    std::vector<std::vector<VertexId>> rail_gate_hits;  // rail j -> gate vertex per gate
    std::vector<std::set<VertexId>> ranges;  // Y[t_i, t_{i+1}) per consecutive gate pair
};

std::optional<GatesReport> find_gates(const MultiGraph& g, const TreeDecomposition& td, int n_min);

/// First window of m consecutive gates whose Y-range minus U avoids N(U);
/// returns the gate index range [k, k+m).
std::optional<std::pair<int, int>> avoid_u_window(const GatesReport& report, const MultiGraph& g,
                                                  int m);

struct RingDecomposition {
    std::vector<SubgraphSpec> segments;  // segments[0] is G_0
    int width = 0;
    std::vector<Path> rails;             // optional: threaded rails for G_1..G_n

    int length() const { return static_cast<int>(segments.size()) - 1; }
};

std::vector<std::set<VertexId>> ring_interfaces(const RingDecomposition& ring);

/// Segments G_i = G[Y[t_i, t_{i+1}) \ U] \ E(G[Y_{t_{i+1}}]) over the window's
/// gates; G_0 takes everything else plus the two boundary gates.
RingDecomposition build_ring(const MultiGraph& g, const GatesReport& report, int window_start,
                             int window_len);

struct RingReport {
    bool r1 = false, r2 = false, r3 = false, r4 = false;
    std::string detail;
    bool valid() const { return r1 && r2 && r3 && r4; }
};

RingReport verify_ring(const MultiGraph& g, const RingDecomposition& ring);

/// Merge segments i and i+1 (cyclically; i = n merges G_n into G_0). Length
/// drops by one, width is preserved.
RingDecomposition absorb(const MultiGraph& g, const RingDecomposition& ring, int i);

/// Chunk into m groups; if every union is connected that is the answer,
/// otherwise restrict to the component of a disconnected chunk holding the
/// fewest rails (width at most halves) and repeat.
RingDecomposition connectify(const MultiGraph& g, const RingDecomposition& ring, int m);

bool segments_connected(const MultiGraph& g, const RingDecomposition& ring);

}  // namespace imm
