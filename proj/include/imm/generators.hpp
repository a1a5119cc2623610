#pragma once

#include <cstdint>
#include <random>

#include "imm/multigraph.hpp"

namespace imm {

/// Deterministic RNG: mt19937_64 is fully specified by the standard, and the
/// hand-rolled uniform below avoids distribution implementations that differ
/// across standard libraries. Same seed, same instances, everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    bool chance(int num, int den) { return uniform(1, den) <= num; }

private:
    std::mt19937_64 eng_;
};

/// g x g grid J_g, row-major vertex ids.
MultiGraph gen_grid(int g);

/// C_{t,r}: r-cycle with each edge in a parallel class of size t.
MultiGraph gen_ctr(int t, int r);

/// K_{a,b} complete bipartite.
MultiGraph gen_complete_bipartite(int a, int b);

MultiGraph gen_complete(int n);

MultiGraph gen_cycle(int n);

MultiGraph gen_path_graph(int n);

/// 2 x len grid; rung i present iff rungs[i] (all rungs when empty).
MultiGraph gen_ladder(int len, const std::vector<bool>& rungs = {});

/// Union of ceil(k/2) random spanning trees plus random cycles, re-sampled
/// until is_k_edge_connected accepts; max_degree <= 0 means unconstrained.
MultiGraph gen_random_k_edge_connected(int n, int k, int max_degree, Rng& rng);

/// Chain of cliques of size `clique`, consecutive cliques overlapping in
/// `sep` shared vertices.
MultiGraph gen_caterpillar_of_cliques(int blocks, int clique, int sep);

MultiGraph gen_random_tree(int n, Rng& rng);

MultiGraph gen_random_multigraph(int max_vertices, int max_edges, Rng& rng);

MultiGraph gen_random_connected_multigraph(int n, int extra_edges, Rng& rng);

}  // namespace imm
