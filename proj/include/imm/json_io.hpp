#pragma once

#include <string>

#include <json.hpp>

#include "imm/decomposition.hpp"
#include "imm/immersion.hpp"
#include "imm/linegraph.hpp"
#include "imm/multigraph.hpp"
#include "imm/packing.hpp"

namespace imm {

using nlohmann::json;

// Graph format: {"vertices":[int...],"edges":[{"id":int,"u":int,"v":int}...]}
json graph_to_json(const MultiGraph& g);
MultiGraph graph_from_json(const json& j);

json script_to_json(const LiftingScript& s);
LiftingScript script_from_json(const json& j);

// {"pattern":..., "terminals":{hVertex:gVertex}, "paths":{hEdgeId:[gEdgeId,...]}}
json immersion_to_json(const ImmersionCertificate& c);
ImmersionCertificate immersion_from_json(const json& j, const MultiGraph& host);

// {"tree":..., "bags":{node:[v,...]}}
json td_to_json(const TreeDecomposition& td);
TreeDecomposition td_from_json(const json& j);

// {"segments":[{"vertices":[...],"edges":[...]}...]}
json ring_to_json(const RingDecomposition& ring);
RingDecomposition ring_from_json(const json& j);

// {"trees":[[edgeId,...],...]}
json packing_to_json(const TreePacking& p);
TreePacking packing_from_json(const json& j);

// {"pattern":..., "branchSets":{patternVertex:[hostVertex,...]},
//  "edgeWitness":{patternEdge:hostEdge}}
json minor_to_json(const MinorCertificate& c);
MinorCertificate minor_from_json(const json& j);

// Self-describing envelope {"kind":..., "payload":...} shared by every
// artifact file so one verifier entry point covers them all.
json make_envelope(const std::string& kind, json payload);
std::pair<std::string, json> read_envelope(const json& j);

void write_envelope_file(const std::string& path, const std::string& kind, const json& payload);
json read_json_file(const std::string& path);

std::string graph_to_dot(const MultiGraph& g);
std::string immersion_to_dot(const MultiGraph& host, const ImmersionCertificate& cert);

}  // namespace imm
