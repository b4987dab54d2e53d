#pragma once

#include <vector>

#include "scnet/complex.hpp"
#include "scnet/graph.hpp"
#include "scnet/lifting.hpp"
#include "scnet/numerics.hpp"

namespace scnet::testutil {

/** Erdos-Renyi style random graph. */
inline Graph random_graph(Rng& rng, int n, double p)
{
    Graph g;
    g.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p))
                g.add_edge(u, v);
    g.normalise();
    return g;
}

/**
 * Random small complex: clique lift of a random graph, which covers vertices,
 * edges, triangles and occasionally tetrahedra.
 */
inline SimplicialComplex random_complex(Rng& rng, int max_vertices = 10, double edge_p = 0.4,
                                        int max_dim = 3)
{
    const int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_vertices - 2)));
    Graph g = random_graph(rng, n, edge_p);
    return clique_lift(g, max_dim);
}

/** Random permutation of 0..n-1. */
inline std::vector<int> random_permutation(Rng& rng, int n)
{
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i)
        perm[i] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[static_cast<int>(rng.below(i + 1))]);
    return perm;
}

}  // namespace scnet::testutil
