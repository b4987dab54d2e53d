#pragma once

#include <stdexcept>
#include <vector>

#include "scnet/complex.hpp"
#include "scnet/graph.hpp"

namespace scnet {

namespace detail {

/**
 * Enumerate all cliques of g with at most max_size vertices by incremental
 * expansion: a clique is grown only by neighbours larger than its current
 * maximum, so each clique is generated exactly once and the cost tracks the
 * sparsity of the graph.
 */
template <typename Visit>
void enumerate_cliques(const Graph& g, int max_size, Visit&& visit)
{
    const auto adj = g.adjacency_lists();
    std::vector<int> clique;

    auto extend = [&](auto&& self, const std::vector<int>& cands) -> void {
        visit(clique);
        if (static_cast<int>(clique.size()) >= max_size)
            return;
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
            const int v = cands[ci];
            // candidates adjacent to v and beyond it keep the ordering invariant
            std::vector<int> next;
            for (std::size_t cj = ci + 1; cj < cands.size(); ++cj)
                if (g.has_edge(v, cands[cj]))
                    next.push_back(cands[cj]);
            clique.push_back(v);
            self(self, next);
            clique.pop_back();
        }
    };

    for (int v = 0; v < g.n; ++v) {
        clique.assign(1, v);
        std::vector<int> cands;
        for (int u : adj[v])
            if (u > v)
                cands.push_back(u);
        extend(extend, cands);
    }
}

}  // namespace detail

/**
 * Clique complex of g up to dimension max_dim: every (k+1)-clique becomes a
 * k-simplex. The result is closed by construction since subsets of cliques
 * are cliques.
 */
inline SimplicialComplex clique_lift(const Graph& g, int max_dim)
{
    if (max_dim < 1)
        throw std::invalid_argument("clique_lift: max_dim must be >= 1");
    std::vector<std::vector<std::vector<int>>> by_dim(
        static_cast<std::size_t>(max_dim) + 1);
    detail::enumerate_cliques(g, max_dim + 1, [&](const std::vector<int>& clique) {
        by_dim[clique.size() - 1].push_back(clique);
    });
    while (!by_dim.empty() && by_dim.back().empty())
        by_dim.pop_back();
    return build_complex(by_dim);
}

/** Exact number of k-cliques of g. */
inline long long count_cliques(const Graph& g, int k)
{
    if (k < 1)
        throw std::invalid_argument("count_cliques: k must be >= 1");
    long long count = 0;
    detail::enumerate_cliques(g, k, [&](const std::vector<int>& clique) {
        if (static_cast<int>(clique.size()) == k)
            ++count;
    });
    return count;
}

/** Size of the largest clique (1 for edgeless graphs). */
inline int max_clique_size(const Graph& g)
{
    int best = g.n > 0 ? 1 : 0;
    detail::enumerate_cliques(g, g.n, [&](const std::vector<int>& clique) {
        best = std::max(best, static_cast<int>(clique.size()));
    });
    return best;
}

}  // namespace scnet
