#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scnet {

/** Simple undirected graph; no self-loops, pairs stored smaller id first. */
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> labels;  // optional integer vertex categories

    void add_edge(int u, int v)
    {
        if (u == v)
            throw std::invalid_argument("Graph: self-loop rejected");
        if (u > v)
            std::swap(u, v);
        edges.emplace_back(u, v);
    }

    void normalise()
    {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    std::vector<std::vector<int>> adjacency_lists() const
    {
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (auto& a : adj)
            std::sort(a.begin(), a.end());
        return adj;
    }

    bool has_edge(int u, int v) const
    {
        if (u > v)
            std::swap(u, v);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
    }

    std::vector<int> degrees() const
    {
        std::vector<int> deg(n, 0);
        for (auto [u, v] : edges) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }
};

/** Relabel vertices by a permutation perm (new id of vertex v is perm[v]). */
inline Graph permute_graph(const Graph& g, const std::vector<int>& perm)
{
    Graph out;
    out.n = g.n;
    for (auto [u, v] : g.edges)
        out.add_edge(perm[u], perm[v]);
    out.normalise();
    if (!g.labels.empty()) {
        out.labels.resize(g.n);
        for (int v = 0; v < g.n; ++v)
            out.labels[perm[v]] = g.labels[v];
    }
    return out;
}

/**
 * True iff g is strongly regular with the given parameters: d-regular,
 * adjacent pairs share exactly lambda neighbours and non-adjacent pairs
 * exactly mu.
 */
inline bool is_strongly_regular(const Graph& g, int d, int lambda, int mu)
{
    for (int deg : g.degrees())
        if (deg != d)
            return false;
    auto adj = g.adjacency_lists();
    std::vector<int> common;
    for (int u = 0; u < g.n; ++u) {
        for (int v = u + 1; v < g.n; ++v) {
            common.clear();
            std::set_intersection(adj[u].begin(), adj[u].end(), adj[v].begin(), adj[v].end(),
                                  std::back_inserter(common));
            const int want = g.has_edge(u, v) ? lambda : mu;
            if (static_cast<int>(common.size()) != want)
                return false;
        }
    }
    return true;
}

inline Graph cycle_graph(int n)
{
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
        g.add_edge(i, (i + 1) % n);
    g.normalise();
    return g;
}

inline Graph complete_graph(int n)
{
    Graph g;
    g.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            g.add_edge(u, v);
    g.normalise();
    return g;
}

inline Graph path_graph(int n)
{
    Graph g;
    g.n = n;
    for (int i = 0; i + 1 < n; ++i)
        g.add_edge(i, i + 1);
    g.normalise();
    return g;
}

/**
 * Named fixture graphs, generated programmatically:
 *  - rook4x4: vertices (i,j) of a 4x4 grid, adjacent iff same row or column
 *  - shrikhande: Cayley graph on Z4 x Z4 with connection set
 *    {±(1,0), ±(0,1), ±(1,1)}
 *  - decalin: two 6-cycles sharing one edge
 *  - bicyclopentyl: two 5-cycles joined by a bridge edge
 *  - c6: the 6-cycle
 *  - two_c3: two disjoint triangles
 */
inline Graph builtin_fixture(const std::string& name)
{
    if (name == "rook4x4") {
        Graph g;
        g.n = 16;
        auto id = [](int i, int j) { return 4 * i + j; };
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                for (int jj = j + 1; jj < 4; ++jj)
                    g.add_edge(id(i, j), id(i, jj));
                for (int ii = i + 1; ii < 4; ++ii)
                    g.add_edge(id(i, j), id(ii, j));
            }
        g.normalise();
        return g;
    }
    if (name == "shrikhande") {
        Graph g;
        g.n = 16;
        auto id = [](int a, int b) { return 4 * ((a % 4 + 4) % 4) + (b % 4 + 4) % 4; };
        const int conn[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (const auto& c : conn) {
                    int u = id(a, b), v = id(a + c[0], b + c[1]);
                    if (u != v)
                        g.add_edge(u, v);
                }
        g.normalise();
        return g;
    }
    if (name == "decalin") {
        // 6-cycles 0-1-2-3-4-5 and 0-1-6-7-8-9 fused along edge (0,1)
        Graph g;
        g.n = 10;
        const int cycle_a[6] = {0, 1, 2, 3, 4, 5};
        const int cycle_b[6] = {0, 1, 6, 7, 8, 9};
        for (int i = 0; i < 6; ++i) {
            g.add_edge(cycle_a[i], cycle_a[(i + 1) % 6]);
            g.add_edge(cycle_b[i], cycle_b[(i + 1) % 6]);
        }
        g.normalise();
        return g;
    }
    if (name == "bicyclopentyl") {
        // 5-cycles on 0..4 and 5..9 with bridge (0,5)
        Graph g;
        g.n = 10;
        for (int i = 0; i < 5; ++i) {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(5 + i, 5 + (i + 1) % 5);
        }
        g.add_edge(0, 5);
        g.normalise();
        return g;
    }
    if (name == "c6")
        return cycle_graph(6);
    if (name == "two_c3") {
        Graph g;
        g.n = 6;
        for (int base : {0, 3}) {
            g.add_edge(base, base + 1);
            g.add_edge(base + 1, base + 2);
            g.add_edge(base, base + 2);
        }
        g.normalise();
        return g;
    }
    throw std::invalid_argument("builtin_fixture: unknown name '" + name + "'");
}

}  // namespace scnet
