#pragma once

#include <optional>

#include "imm/budget.hpp"
#include "imm/immersion.hpp"
#include "imm/multigraph.hpp"

namespace imm {

/// Branch-set model of pattern as a minor of a host: disjoint connected
/// branch sets plus one distinct host edge per pattern edge.
struct MinorCertificate {
    MultiGraph pattern;
    std::map<VertexId, std::set<VertexId>> branch_sets;  // pattern vertex -> host vertices
    std::map<EdgeId, EdgeId> edge_witness;               // pattern edge -> host edge
};

VerifyResult verify_minor(const MultiGraph& host, const MinorCertificate& cert);

struct ImmersionToMinorResult {
    MinorCertificate minor;        // L(pattern) as a minor of L(host)
    MultiGraph line_host;          // L(host); minor certificate ids live here
    MultiGraph line_pattern;       // L(pattern); vertex ids are pattern edge ids
};

/// Replay the certificate's implied delete/lift script, mapping edge deletion
/// to vertex deletion and pair lifts to contraction in the line graph. The
/// accumulated branch sets witness L(pattern) as a minor of L(host).
ImmersionToMinorResult immersion_to_minor(const MultiGraph& host, const ImmersionCertificate& cert);

/// Replay a script while checking, after every step, that the carried branch
/// sets still model the line graph of the working graph inside L(host):
/// disjoint connected branch sets, one distinct witness adjacency per pair of
/// working edges sharing an endpoint.
bool stepwise_line_graph_invariant(const MultiGraph& host, const LiftingScript& script);

struct RootGraphResult {
    MultiGraph root;
    std::map<VertexId, EdgeId> vertex_to_root_edge;  // g vertex -> edge of root
};

/// Krausz-style backtracking over clique covers (each vertex in at most two
/// cliques, every edge inside one) recovering some H with L(H) isomorphic to
/// g. Throws NotALineGraph when the search exhausts, TooLarge over the
/// ceiling.
RootGraphResult root_graph(const MultiGraph& g, int ceiling = 60);

struct LineGraphAnalysis {
    MultiGraph root;                             // recovered H
    std::map<VertexId, EdgeId> vertex_to_root_edge;
    std::set<VertexId> s;                        // high-degree vertex set in H
    int c = 0;                                   // threshold 15t - 6
    bool connectivity_precondition = false;      // g is (30t-15)-connected
    bool s_edge_connected = false;               // S is c-edge-connected in H
    bool s_vertex_cover = false;                 // H - S edgeless
    int max_degree = 0;
};

struct AnalyzeResult {
    std::optional<MinorCertificate> minor;  // L(C_{t,r}) minor in g
    std::optional<LineGraphAnalysis> analysis;
    std::vector<std::string> diagnostics;
};

/// High-connectivity line-graph analysis: recover a root H, form S = {v : deg >= 15t-6}, run
/// the proof's checks, then either take the K_{tr}-clique shortcut or the
/// rooted C_{t,r} pipeline followed by the minor transform.
AnalyzeResult analyze_line_graph(const MultiGraph& g, int t, int r, SearchBudget& budget);

}  // namespace imm
