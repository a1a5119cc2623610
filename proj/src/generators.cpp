#include "imm/generators.hpp"

#include <algorithm>

#include "imm/connectivity.hpp"

namespace imm {

MultiGraph gen_grid(int g) {
    if (g < 1) throw Error(ErrorCode::InvalidParams, "grid size must be positive");
    MultiGraph out;
    auto id = [g](int row, int col) { return row * g + col; };
    for (int row = 0; row < g; ++row)
        for (int col = 0; col < g; ++col) out.add_vertex(id(row, col));
    for (int row = 0; row < g; ++row)
        for (int col = 0; col < g; ++col) {
            if (col + 1 < g) out.add_edge(id(row, col), id(row, col + 1));
            if (row + 1 < g) out.add_edge(id(row, col), id(row + 1, col));
        }
    return out;
}

MultiGraph gen_ctr(int t, int r) {
    if (t < 1 || r < 3) throw Error(ErrorCode::InvalidParams, "C_{t,r} generator needs r >= 3");
    MultiGraph out;
    for (int i = 0; i < r; ++i) out.add_vertex(i);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < t; ++j) out.add_edge(i, (i + 1) % r);
    return out;
}

MultiGraph gen_complete_bipartite(int a, int b) {
    MultiGraph out;
    for (int i = 0; i < a + b; ++i) out.add_vertex(i);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) out.add_edge(i, a + j);
    return out;
}

MultiGraph gen_complete(int n) {
    MultiGraph out;
    for (int i = 0; i < n; ++i) out.add_vertex(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.add_edge(i, j);
    return out;
}

MultiGraph gen_cycle(int n) {
    if (n < 3) throw Error(ErrorCode::InvalidParams, "cycle needs n >= 3");
    MultiGraph out;
    for (int i = 0; i < n; ++i) out.add_vertex(i);
    for (int i = 0; i < n; ++i) out.add_edge(i, (i + 1) % n);
    return out;
}

MultiGraph gen_path_graph(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidParams, "path needs n >= 1");
    MultiGraph out;
    for (int i = 0; i < n; ++i) out.add_vertex(i);
    for (int i = 0; i + 1 < n; ++i) out.add_edge(i, i + 1);
    return out;
}

MultiGraph gen_ladder(int len, const std::vector<bool>& rungs) {
    if (len < 2) throw Error(ErrorCode::InvalidParams, "ladder needs len >= 2");
    MultiGraph out;
    for (int i = 0; i < 2 * len; ++i) out.add_vertex(i);
    for (int i = 0; i + 1 < len; ++i) {
        out.add_edge(i, i + 1);                    // top row
        out.add_edge(len + i, len + i + 1);        // bottom row
    }
    for (int i = 0; i < len; ++i) {
        bool keep = rungs.empty() ? true : (i < static_cast<int>(rungs.size()) ? rungs[i] : true);
        if (keep) out.add_edge(i, len + i);
    }
    return out;
}

MultiGraph gen_random_tree(int n, Rng& rng) {
    MultiGraph out;
    for (int i = 0; i < n; ++i) out.add_vertex(i);
    for (int i = 1; i < n; ++i) out.add_edge(i, rng.uniform(0, i - 1));
    return out;
}

namespace {

// random spanning tree over an explicit vertex list
void add_random_spanning_tree(MultiGraph& g, const std::vector<VertexId>& vs, Rng& rng) {
    std::vector<VertexId> shuffled = vs;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform(0, static_cast<int>(i) - 1)]);
    for (std::size_t i = 1; i < shuffled.size(); ++i)
        g.add_edge(shuffled[i], shuffled[rng.uniform(0, static_cast<int>(i) - 1)]);
}

}  // namespace

MultiGraph gen_random_k_edge_connected(int n, int k, int max_degree, Rng& rng) {
    if (n < 2 || k < 1) throw Error(ErrorCode::InvalidParams, "need n >= 2, k >= 1");
    for (int attempt = 0; attempt < 200; ++attempt) {
        MultiGraph g;
        std::vector<VertexId> vs;
        for (int i = 0; i < n; ++i) {
            g.add_vertex(i);
            vs.push_back(i);
        }
        for (int i = 0; i < (k + 1) / 2; ++i) add_random_spanning_tree(g, vs, rng);
        // random cycles thicken the cuts left thin by the trees
        int cycles = 1 + k / 2;
        for (int c = 0; c < cycles; ++c) {
            std::vector<VertexId> shuffled = vs;
            for (std::size_t i = shuffled.size(); i > 1; --i)
                std::swap(shuffled[i - 1], shuffled[rng.uniform(0, static_cast<int>(i) - 1)]);
            int len = rng.uniform(3, n);
            for (int i = 0; i < len; ++i) g.add_edge(shuffled[i], shuffled[(i + 1) % len]);
        }
        if (max_degree > 0) {
            bool ok = true;
            for (VertexId v : g.vertices())
                if (g.degree(v) > max_degree) ok = false;
            if (!ok) continue;
        }
        if (is_k_edge_connected(g, k).ok) return g;
    }
    throw Error(ErrorCode::NotFound, "generator failed to hit the connectivity target");
}

MultiGraph gen_caterpillar_of_cliques(int blocks, int clique, int sep) {
    if (blocks < 1 || clique < 2 || sep < 1 || sep >= clique)
        throw Error(ErrorCode::InvalidParams, "bad caterpillar parameters");
    MultiGraph g;
    // consecutive cliques overlap in `sep` shared vertices
    std::vector<std::vector<VertexId>> block_vertices(blocks);
    int next = 0;
    std::vector<VertexId> prev_tail;
    for (int b = 0; b < blocks; ++b) {
        std::vector<VertexId>& cur = block_vertices[b];
        cur = prev_tail;
        while (static_cast<int>(cur.size()) < clique) {
            g.add_vertex(next);
            cur.push_back(next++);
        }
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                if (b > 0 && std::count(prev_tail.begin(), prev_tail.end(), cur[i]) &&
                    std::count(prev_tail.begin(), prev_tail.end(), cur[j]))
                    continue;  // shared pair already wired inside the previous clique
                g.add_edge(cur[i], cur[j]);
            }
        prev_tail.assign(cur.end() - sep, cur.end());
    }
    return g;
}

MultiGraph gen_random_multigraph(int max_vertices, int max_edges, Rng& rng) {
    int n = rng.uniform(2, std::max(2, max_vertices));
    int m = rng.uniform(1, std::max(1, max_edges));
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    for (int i = 0; i < m; ++i) {
        int u = rng.uniform(0, n - 1);
        int v = rng.uniform(0, n - 1);
        if (u == v) continue;
        g.add_edge(u, v);
    }
    return g;
}

MultiGraph gen_random_connected_multigraph(int n, int extra_edges, Rng& rng) {
    MultiGraph g = gen_random_tree(n, rng);
    for (int i = 0; i < extra_edges; ++i) {
        int u = rng.uniform(0, n - 1);
        int v = rng.uniform(0, n - 1);
        if (u == v) continue;
        g.add_edge(u, v);
    }
    return g;
}

}  // namespace imm
