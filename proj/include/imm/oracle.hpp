#pragma once

#include <cstdint>
#include <optional>

#include "imm/connectivity.hpp"
#include "imm/immersion.hpp"
#include "imm/linegraph.hpp"
#include "imm/multigraph.hpp"

namespace imm {

/// Hard ceilings for the exhaustive oracles. Exceeding them refuses outright
/// rather than truncating, so option-none answers stay definitive.
struct OracleBudget {
    int max_vertices = 8;
    int max_edges = 16;
    std::int64_t max_millis = 30000;
};

/// Exhaustive immersion test: every injective terminal placement, every
/// edge-disjoint routing. None means no immersion exists.
std::optional<ImmersionCertificate> brute_immersion(const MultiGraph& g, const MultiGraph& h,
                                                    const OracleBudget& budget);

/// Exhaustive branch-set search for h as a minor of g.
std::optional<MinorCertificate> brute_minor(const MultiGraph& g, const MultiGraph& h,
                                            const OracleBudget& budget);

/// Minimum A-B edge cut by subset enumeration.
EdgeCut brute_min_cut(const MultiGraph& g, const std::set<VertexId>& a,
                      const std::set<VertexId>& b);

}  // namespace imm
