#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imm {

using VertexId = int;
using EdgeId = int;

enum class ErrorCode {
    UnknownVertex,
    UnknownEdge,
    NonAdjacentEdges,
    NotAPath,
    EmptySet,
    NotASubgraph,
    SameVertex,
    LoopEdge,
    DuplicateId,
    HypothesesViolated,
    NotFound,
    NotKEdgeConnected,
    NotEdgeDisjoint,
    NotCompatible,
    MalformedDecomposition,
    TooLarge,
    WindowTooSmall,
    TooShort,
    TooFewMarked,
    PreconditionViolated,
    BudgetExceeded,
    BudgetRefusal,
    InvalidCertificate,
    NotALineGraph,
    InvalidParams,
    ParseError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// Loopless multigraph with stable vertex and edge identities. Parallel edges
/// are distinct records; edge ids are never reused, so replayed scripts and
/// certificates keep their references valid.
class MultiGraph {
public:
    MultiGraph() = default;

    void add_vertex(VertexId v);
    EdgeId add_edge(VertexId u, VertexId v);
    void add_edge_with_id(EdgeId id, VertexId u, VertexId v);
    void remove_edge(EdgeId e);
    void remove_isolated_vertex(VertexId v);

    bool has_vertex(VertexId v) const { return vertices_.count(v) > 0; }
    bool has_edge(EdgeId e) const { return edges_.count(e) > 0; }

    std::pair<VertexId, VertexId> endpoints(EdgeId e) const;
    VertexId other_end(EdgeId e, VertexId v) const;
    bool is_incident(EdgeId e, VertexId v) const;

    const std::set<VertexId>& vertices() const { return vertices_; }
    const std::map<EdgeId, std::pair<VertexId, VertexId>>& edges() const { return edges_; }
    const std::set<EdgeId>& incident_edges(VertexId v) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    int degree(VertexId v) const;
    int parallel_count(VertexId u, VertexId v) const;
    std::set<VertexId> neighbors(VertexId v) const;

    /// Neighborhood N(X): vertices outside X adjacent to a member of X.
    std::set<VertexId> neighborhood(const std::set<VertexId>& x) const;
    /// Edge boundary delta(X): edges with exactly one end in X.
    std::set<EdgeId> edge_boundary(const std::set<VertexId>& x) const;

    bool connected() const;
    std::vector<std::set<VertexId>> components() const;

    EdgeId peek_next_edge_id() const { return next_edge_; }
    VertexId peek_next_vertex_id() const { return next_vertex_; }
    void reserve_edge_id(EdgeId id);

    bool operator==(const MultiGraph& other) const {
        return vertices_ == other.vertices_ && edges_ == other.edges_;
    }

private:
    std::set<VertexId> vertices_;
    std::map<EdgeId, std::pair<VertexId, VertexId>> edges_;
    std::map<VertexId, std::set<EdgeId>> adj_;
    EdgeId next_edge_ = 0;
    VertexId next_vertex_ = 0;
};

/// Ordered vertex/edge alternation inside a host graph. A zero-length path is
/// a single vertex. vertices.size() == edges.size() + 1 always.
struct Path {
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;

    VertexId front() const { return vertices.front(); }
    VertexId back() const { return vertices.back(); }
    std::size_t length() const { return edges.size(); }
    bool valid_in(const MultiGraph& g) const;
    bool vertex_simple() const;
    Path reversed() const;
    /// Subpath between two vertices that occur on this path (in path order).
    Path subpath(VertexId from, VertexId to) const;

    bool operator==(const Path& o) const { return vertices == o.vertices && edges == o.edges; }
};

/// Concatenate walks sharing endpoints, then shortcut to a vertex-simple path
/// between the walk's ends using only walk edges.
Path simplify_walk(const MultiGraph& g, const std::vector<EdgeId>& walk, VertexId from, VertexId to);
Path concat_paths(const MultiGraph& g, const Path& a, const Path& b);

/// Explicit subgraph: vertex set plus edge set, no implicit closure.
struct SubgraphSpec {
    std::set<VertexId> vertices;
    std::set<EdgeId> edges;
};

/// Checks endpoints of every listed edge lie in the listed vertices and both
/// sets belong to g.
bool is_subgraph_of(const MultiGraph& g, const SubgraphSpec& h);
MultiGraph induced_subgraph(const MultiGraph& g, const std::set<VertexId>& vs);
MultiGraph edge_subgraph(const MultiGraph& g, const std::set<EdgeId>& es);

struct Bridge {
    bool trivial = false;
    std::set<EdgeId> edge_set;
    std::set<VertexId> attachments;
    std::set<VertexId> nucleus;  // empty for trivial bridges
};

struct LiftStep {
    enum Kind { DeleteEdge, DeleteIsolatedVertex, LiftPair } kind;
    EdgeId edge = -1;           // DeleteEdge
    VertexId vertex = -1;       // DeleteIsolatedVertex
    EdgeId lift_e = -1, lift_f = -1;
    EdgeId created = -1;        // -1 when the lift produced a loop and nothing was added
};

/// Ordered lift/delete steps. Replaying from the source graph is
/// deterministic and must be well-defined at every step.
struct LiftingScript {
    std::vector<LiftStep> steps;
};

struct LiftResult {
    MultiGraph graph;
    std::optional<EdgeId> created;  // nullopt in the loop case
};

/// Lift the pair {e, f} at their shared vertex: delete both, add a fresh edge
/// joining the far endpoints. A resulting loop is deleted immediately.
LiftResult lift_pair(const MultiGraph& g, EdgeId e, EdgeId f);

/// Lift a walk with no repeated edges: delete all its edges and join the ends
/// with a fresh edge (nothing is added when the ends coincide).
LiftResult lift_path(const MultiGraph& g, const std::vector<EdgeId>& path);

MultiGraph replay_script(const MultiGraph& src, const LiftingScript& script);

struct ContractResult {
    MultiGraph graph;
    VertexId merged;  // the fresh vertex replacing S
};

/// Contract a vertex set to a single fresh vertex; loops vanish, parallel
/// edges to outside vertices are kept as parallel edges with original ids.
ContractResult contract_set(const MultiGraph& g, const std::set<VertexId>& s);

struct LineGraphResult {
    MultiGraph graph;                       // simple graph on E(g)
    std::map<EdgeId, VertexId> edge_to_vertex;
};

/// Line graph: one vertex per edge of g, adjacency iff the edges share an
/// endpoint. Parallel edges of g contribute a single adjacency.
LineGraphResult line_graph(const MultiGraph& g);

/// Partition of E(g)\E(h) into Tutte bridges of the subgraph h.
std::vector<Bridge> tutte_bridges(const MultiGraph& g, const SubgraphSpec& h);

/// Walk the edge list and recover the vertex sequence; throws NotAPath if the
/// edges do not chain.
std::vector<VertexId> walk_vertices(const MultiGraph& g, const std::vector<EdgeId>& walk);

}  // namespace imm
