#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "scnet/complex.hpp"
#include "scnet/graph.hpp"

namespace scnet {

/**
 * Which adjacency multisets enter the colour update. The full rule uses all
 * four; the sparse rule keeps boundary + upper, which is equally powerful.
 */
struct SwlVariant {
    bool boundary = true;
    bool coboundary = true;
    bool lower = true;
    bool upper = true;

    static SwlVariant full() { return {true, true, true, true}; }
    static SwlVariant sparse() { return {true, false, false, true}; }
};

/** Per-dimension colour assignment produced by refinement. */
struct Colouring {
    std::vector<std::vector<int>> colours;  // [dim][simplex index]
    int iterations = 0;
};

struct Verdict {
    bool distinguished = false;
    std::optional<int> witness_dimension;
    std::optional<int> witness_iteration;
};

namespace detail {

// one refinement signature: own colour plus the enabled neighbour multisets
struct RefineSig {
    int own;
    std::vector<int> boundary;
    std::vector<int> coboundary;
    std::vector<std::pair<int, int>> lower;  // (neighbour, shared face)
    std::vector<std::pair<int, int>> upper;  // (neighbour, shared coface)

    friend bool operator<(const RefineSig& a, const RefineSig& b)
    {
        if (a.own != b.own)
            return a.own < b.own;
        if (a.boundary != b.boundary)
            return a.boundary < b.boundary;
        if (a.coboundary != b.coboundary)
            return a.coboundary < b.coboundary;
        if (a.lower != b.lower)
            return a.lower < b.lower;
        return a.upper < b.upper;
    }
    friend bool operator==(const RefineSig& a, const RefineSig& b)
    {
        return a.own == b.own && a.boundary == b.boundary && a.coboundary == b.coboundary &&
               a.lower == b.lower && a.upper == b.upper;
    }
};

inline RefineSig signature(const SimplicialComplex& k, const std::vector<std::vector<int>>& col,
                           SimplexId s, const SwlVariant& variant)
{
    RefineSig sig;
    sig.own = col[s.dim][s.index];
    if (variant.boundary) {
        for (const Neighbour& nb : k.adjacency(s, AdjacencyKind::boundary))
            sig.boundary.push_back(col[nb.simplex.dim][nb.simplex.index]);
        std::sort(sig.boundary.begin(), sig.boundary.end());
    }
    if (variant.coboundary) {
        for (const Neighbour& nb : k.adjacency(s, AdjacencyKind::coboundary))
            sig.coboundary.push_back(col[nb.simplex.dim][nb.simplex.index]);
        std::sort(sig.coboundary.begin(), sig.coboundary.end());
    }
    if (variant.lower && s.dim >= 1) {
        for (const Neighbour& nb : k.adjacency(s, AdjacencyKind::lower))
            sig.lower.emplace_back(col[nb.simplex.dim][nb.simplex.index],
                                   col[nb.shared->dim][nb.shared->index]);
        std::sort(sig.lower.begin(), sig.lower.end());
    }
    if (variant.upper) {
        for (const Neighbour& nb : k.adjacency(s, AdjacencyKind::upper))
            sig.upper.emplace_back(col[nb.simplex.dim][nb.simplex.index],
                                   col[nb.shared->dim][nb.shared->index]);
        std::sort(sig.upper.begin(), sig.upper.end());
    }
    return sig;
}

// per-dimension colour histogram
inline std::map<int, int> histogram(const std::vector<int>& colours)
{
    std::map<int, int> h;
    for (int c : colours)
        ++h[c];
    return h;
}

inline std::optional<int> first_differing_dimension(const Colouring& a, const Colouring& b)
{
    const int dims = static_cast<int>(std::max(a.colours.size(), b.colours.size()));
    for (int d = 0; d < dims; ++d) {
        const bool ina = d < static_cast<int>(a.colours.size());
        const bool inb = d < static_cast<int>(b.colours.size());
        if (ina != inb) {
            // one complex has simplices at this level, the other does not
            if ((ina && !a.colours[d].empty()) || (inb && !b.colours[d].empty()))
                return d;
            continue;
        }
        if (!ina)
            continue;
        if (histogram(a.colours[d]) != histogram(b.colours[d]))
            return d;
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * Joint colour refinement of a pair of complexes. Each iteration rehashes
 * (own colour, enabled adjacency multisets) into fresh colours by canonical
 * relabeling: the distinct signatures across both complexes are sorted
 * lexicographically and renamed with consecutive integers, which is an
 * injective deterministic realisation of the perfect hash. Refinement stops
 * at a stable joint partition, at a histogram mismatch, or at max_iter.
 *
 * The verdict reports the first dimension and iteration at which the
 * per-dimension colour histograms (including the dimension cardinalities)
 * differ; iteration 0 refers to the constant initial colouring.
 */
struct SwlResult {
    Colouring first;
    Colouring second;
    Verdict verdict;
};

inline SwlResult swl_refine(const SimplicialComplex& k1, const SimplicialComplex& k2,
                            const SwlVariant& variant = SwlVariant::full(), int max_iter = -1)
{
    if (max_iter == 0)
        throw std::invalid_argument("swl_refine: max_iter must be >= 1 (or -1 for the default)");
    const int total = k1.total_size() + k2.total_size();
    if (max_iter < 0)
        max_iter = std::max(1, total);

    SwlResult res;
    auto init = [](const SimplicialComplex& k, Colouring& c) {
        c.colours.resize(k.top_dimension() + 1);
        for (int d = 0; d <= k.top_dimension(); ++d)
            c.colours[d].assign(k.size(d), 0);
    };
    init(k1, res.first);
    init(k2, res.second);

    auto check = [&](int iter) {
        if (res.verdict.distinguished)
            return;
        if (auto dim = detail::first_differing_dimension(res.first, res.second)) {
            res.verdict.distinguished = true;
            res.verdict.witness_dimension = *dim;
            res.verdict.witness_iteration = iter;
        }
    };
    check(0);

    int classes_before = 1;
    for (int iter = 1; iter <= max_iter && !res.verdict.distinguished; ++iter) {
        // gather signatures over both complexes
        std::vector<detail::RefineSig> sigs;
        auto gather = [&](const SimplicialComplex& k, const Colouring& c) {
            for (int d = 0; d <= k.top_dimension(); ++d)
                for (int i = 0; i < k.size(d); ++i)
                    sigs.push_back(detail::signature(k, c.colours, {d, i}, variant));
        };
        gather(k1, res.first);
        gather(k2, res.second);

        std::vector<detail::RefineSig> dict = sigs;
        std::sort(dict.begin(), dict.end());
        dict.erase(std::unique(dict.begin(), dict.end()), dict.end());

        auto relabel = [&](const SimplicialComplex& k, Colouring& c, std::size_t& cursor) {
            for (int d = 0; d <= k.top_dimension(); ++d)
                for (int i = 0; i < k.size(d); ++i) {
                    auto it = std::lower_bound(dict.begin(), dict.end(), sigs[cursor++]);
                    c.colours[d][i] = static_cast<int>(it - dict.begin());
                }
        };
        std::size_t cursor = 0;
        relabel(k1, res.first, cursor);
        relabel(k2, res.second, cursor);
        res.first.iterations = res.second.iterations = iter;

        check(iter);
        const int classes = static_cast<int>(dict.size());
        if (classes == classes_before)
            break;  // stable partition
        classes_before = classes;
    }
    return res;
}

/** Refine a single complex to its stable partition (pairs it with itself). */
inline Colouring stable_partition(const SimplicialComplex& k,
                                  const SwlVariant& variant = SwlVariant::full())
{
    return swl_refine(k, k, variant, std::max(1, k.total_size())).first;
}

/** Classical 1-WL colour refinement on a pair of graphs, shared dictionary. */
struct WlResult {
    std::vector<int> first;
    std::vector<int> second;
    Verdict verdict;
    int iterations = 0;
};

inline WlResult wl_refine(const Graph& g1, const Graph& g2, int max_iter = -1)
{
    if (max_iter == 0)
        throw std::invalid_argument("wl_refine: max_iter must be >= 1 (or -1 for the default)");
    if (max_iter < 0)
        max_iter = std::max(1, g1.n + g2.n);

    WlResult res;
    res.first.assign(g1.n, 0);
    res.second.assign(g2.n, 0);
    const auto adj1 = g1.adjacency_lists();
    const auto adj2 = g2.adjacency_lists();

    auto check = [&](int iter) {
        if (res.verdict.distinguished)
            return;
        if (detail::histogram(res.first) != detail::histogram(res.second)) {
            res.verdict.distinguished = true;
            res.verdict.witness_dimension = 0;
            res.verdict.witness_iteration = iter;
        }
    };
    check(0);

    using Sig = std::pair<int, std::vector<int>>;
    int classes_before = 1;
    for (int iter = 1; iter <= max_iter && !res.verdict.distinguished; ++iter) {
        std::vector<Sig> sigs;
        auto gather = [&](const std::vector<int>& col, const std::vector<std::vector<int>>& adj) {
            for (std::size_t v = 0; v < col.size(); ++v) {
                std::vector<int> nb;
                for (int u : adj[v])
                    nb.push_back(col[u]);
                std::sort(nb.begin(), nb.end());
                sigs.emplace_back(col[v], std::move(nb));
            }
        };
        gather(res.first, adj1);
        gather(res.second, adj2);

        std::vector<Sig> dict = sigs;
        std::sort(dict.begin(), dict.end());
        dict.erase(std::unique(dict.begin(), dict.end()), dict.end());

        std::size_t cursor = 0;
        for (auto* col : {&res.first, &res.second})
            for (int& c : *col)
                c = static_cast<int>(std::lower_bound(dict.begin(), dict.end(), sigs[cursor++]) -
                                     dict.begin());
        res.iterations = iter;

        check(iter);
        const int classes = static_cast<int>(dict.size());
        if (classes == classes_before)
            break;
        classes_before = classes;
    }
    return res;
}

/**
 * Partition of all simplices induced by a colouring, as sorted colour
 * classes of (dim, index) pairs. Invariant under renaming of colour ids,
 * which makes partitions from different refinement variants comparable.
 */
inline std::vector<std::vector<std::pair<int, int>>> partition_classes(const Colouring& c)
{
    std::map<int, std::vector<std::pair<int, int>>> classes;
    for (int d = 0; d < static_cast<int>(c.colours.size()); ++d)
        for (int i = 0; i < static_cast<int>(c.colours[d].size()); ++i)
            classes[c.colours[d][i]].emplace_back(d, i);
    std::vector<std::vector<std::pair<int, int>>> out;
    for (auto& [_, members] : classes)
        out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scnet
