#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "scnet/numerics.hpp"

namespace scnet {

/** Identifies a simplex by its dimension and its row in that dimension's table. */
struct SimplexId {
    int dim = 0;
    int index = 0;

    friend bool operator==(const SimplexId&, const SimplexId&) = default;
};

enum class AdjacencyKind { boundary, coboundary, lower, upper };

/** Neighbour entry returned by SimplicialComplex::adjacency. */
struct Neighbour {
    SimplexId simplex;
    std::optional<SimplexId> shared;  // σ∩τ (lower) or σ∪τ (upper); empty otherwise
    int relative_orientation = 1;
};

/**
 * Sparse signed incidence matrix B_k between (k-1)- and k-simplices.
 * Every column of a dimension-k matrix carries exactly k+1 nonzeros and
 * consecutive matrices compose to zero: B_k B_{k+1} = 0.
 */
struct SignedIncidenceMatrix {
    int rows = 0;
    int cols = 0;
    struct Entry {
        int row;
        int col;
        int sign;  // -1 or +1
    };
    std::vector<Entry> entries;

    IntMatrix dense() const
    {
        IntMatrix m = IntMatrix::Zero(rows, cols);
        for (const Entry& e : entries)
            m(e.row, e.col) = e.sign;
        return m;
    }

    IntMatrix dense_unsigned() const
    {
        IntMatrix m = IntMatrix::Zero(rows, cols);
        for (const Entry& e : entries)
            m(e.row, e.col) = 1;
        return m;
    }

    Matrix dense_real() const { return dense().cast<double>(); }
};

enum class LaplacianVariant { full, down, up };

namespace detail {

struct VertexTupleHash {
    std::size_t operator()(const std::vector<int>& v) const
    {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b9ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace detail

/**
 * A finite simplicial complex with oriented simplices.
 *
 * Simplices are stored per dimension as strictly ascending vertex tuples in
 * lexicographic order; the ascending tuple is declared the positive
 * orientation. The structure is immutable after construction and safe for
 * concurrent reads.
 */
class SimplicialComplex {
public:
    struct Link {
        int index;  // simplex index in the adjacent dimension
        int sign;   // relative orientation, -1 or +1
    };

    SimplicialComplex() = default;

    /** Top dimension p; -1 for the empty complex. */
    int top_dimension() const { return static_cast<int>(simplices_.size()) - 1; }

    /** Number of k-simplices S_k. */
    int size(int dim) const
    {
        if (dim < 0 || dim > top_dimension())
            return 0;
        return static_cast<int>(simplices_[dim].size());
    }

    int total_size() const
    {
        int n = 0;
        for (int d = 0; d <= top_dimension(); ++d)
            n += size(d);
        return n;
    }

    std::vector<int> dim_counts() const
    {
        std::vector<int> counts;
        for (int d = 0; d <= top_dimension(); ++d)
            counts.push_back(size(d));
        return counts;
    }

    const std::vector<int>& vertices_of(SimplexId s) const
    {
        return simplices_[s.dim][s.index];
    }

    const std::vector<std::vector<int>>& simplices(int dim) const
    {
        return simplices_[dim];
    }

    const std::vector<Link>& boundary_of(SimplexId s) const
    {
        return boundary_[s.dim][s.index];
    }

    const std::vector<Link>& coboundary_of(SimplexId s) const
    {
        return coboundary_[s.dim][s.index];
    }

    std::optional<int> find(int dim, const std::vector<int>& sorted_vertices) const
    {
        if (dim < 0 || dim > top_dimension())
            return std::nullopt;
        auto it = lookup_[dim].find(sorted_vertices);
        if (it == lookup_[dim].end())
            return std::nullopt;
        return it->second;
    }

    std::string summary() const
    {
        if (top_dimension() < 0)
            return "no simplices";
        std::ostringstream os;
        os << "S = (";
        for (int d = 0; d <= top_dimension(); ++d)
            os << (d ? ", " : "") << size(d);
        os << ")";
        return os.str();
    }

    /**
     * Signed boundary matrix B_k (rows: (k-1)-simplices, cols: k-simplices).
     * k = p+1 is allowed and yields the empty zero-column matrix.
     */
    SignedIncidenceMatrix boundary_matrix(int k) const
    {
        if (k < 1 || k > top_dimension() + 1)
            throw std::out_of_range("boundary_matrix: dimension " + std::to_string(k) +
                                    " out of range 1.." + std::to_string(top_dimension() + 1));
        SignedIncidenceMatrix b;
        b.rows = size(k - 1);
        b.cols = size(k);
        if (k <= top_dimension())
            for (int j = 0; j < b.cols; ++j)
                for (const Link& l : boundary_[k][j])
                    b.entries.push_back({l.index, j, l.sign});
        return b;
    }

    /**
     * Hodge Laplacian L_k = B_k^T B_k + B_{k+1} B_{k+1}^T in exact integer
     * arithmetic; B_0 and B_{p+1} are treated as empty.
     */
    IntMatrix hodge_laplacian(int k, LaplacianVariant variant = LaplacianVariant::full) const
    {
        if (k < 0 || k > top_dimension())
            throw std::out_of_range("hodge_laplacian: dimension out of range");
        const int n = size(k);
        IntMatrix l = IntMatrix::Zero(n, n);
        if (variant != LaplacianVariant::up && k >= 1) {
            IntMatrix bk = boundary_matrix(k).dense();
            l += bk.transpose() * bk;
        }
        if (variant != LaplacianVariant::down && k + 1 <= top_dimension()) {
            IntMatrix bk1 = boundary_matrix(k + 1).dense();
            l += bk1 * bk1.transpose();
        }
        return l;
    }

    /**
     * Adjacent simplices of s. Lower/upper entries carry the shared
     * (k-1)/(k+1)-simplex and the relative orientation read off
     * B_k^T B_k resp. B_{k+1} B_{k+1}^T.
     */
    std::vector<Neighbour> adjacency(SimplexId s, AdjacencyKind kind) const
    {
        std::vector<Neighbour> out;
        const int k = s.dim;
        switch (kind) {
        case AdjacencyKind::boundary:
            for (const Link& l : boundary_[k][s.index])
                out.push_back({{k - 1, l.index}, std::nullopt, l.sign});
            break;
        case AdjacencyKind::coboundary:
            for (const Link& l : coboundary_[k][s.index])
                out.push_back({{k + 1, l.index}, std::nullopt, l.sign});
            break;
        case AdjacencyKind::lower:
            // two k-simplices sharing the face δ; orientation is the product
            // of their signs in the two columns of B_k
            for (const Link& face : boundary_[k][s.index])
                for (const Link& cof : coboundary_[k - 1][face.index])
                    if (cof.index != s.index)
                        out.push_back({{k, cof.index},
                                       SimplexId{k - 1, face.index},
                                       face.sign * cof.sign});
            break;
        case AdjacencyKind::upper:
            for (const Link& cof : coboundary_[k][s.index])
                for (const Link& face : boundary_[k + 1][cof.index])
                    if (face.index != s.index)
                        out.push_back({{k, face.index},
                                       SimplexId{k + 1, cof.index},
                                       cof.sign * face.sign});
            break;
        }
        return out;
    }

    /**
     * Total number of messages exchanged under the boundary + upper scheme.
     * Each k-simplex owns one slot per face (vertices own a single slot for
     * their empty face) plus the ordered pairs among the faces of each of
     * its cofaces, which adds up to sum_d (d+1)S_d + 2 C(d+1,2) S_d.
     */
    std::int64_t sparse_message_count() const
    {
        std::int64_t count = 0;
        for (int d = 0; d <= top_dimension(); ++d) {
            for (int i = 0; i < size(d); ++i) {
                count += d == 0 ? 1 : static_cast<std::int64_t>(boundary_[d][i].size());
                // upper messages received by this simplex, one per coface
                // and sibling face
                count += static_cast<std::int64_t>(coboundary_[d][i].size()) * (d + 1);
            }
        }
        return count;
    }

    friend SimplicialComplex build_complex(const std::vector<std::vector<std::vector<int>>>&);

private:
    // [dim][index] -> ascending vertex tuple
    std::vector<std::vector<std::vector<int>>> simplices_;
    std::vector<std::unordered_map<std::vector<int>, int, detail::VertexTupleHash>> lookup_;
    std::vector<std::vector<std::vector<Link>>> boundary_;
    std::vector<std::vector<std::vector<Link>>> coboundary_;
};

/**
 * Build a complex from per-dimension vertex-tuple lists. The input need not
 * be closed: all faces are added. Tuples are normalised to ascending order
 * and tables sorted lexicographically, which fixes the canonical (positive)
 * orientation of every simplex. A vertex set listed twice is rejected.
 */
inline SimplicialComplex build_complex(const std::vector<std::vector<std::vector<int>>>& simplex_lists)
{
    using Tuple = std::vector<int>;

    // normalise and detect duplicates among the explicit input
    std::vector<std::vector<Tuple>> by_dim;
    {
        std::unordered_map<Tuple, int, detail::VertexTupleHash> seen;
        for (const auto& list : simplex_lists) {
            for (const Tuple& raw : list) {
                if (raw.empty())
                    throw std::invalid_argument("build_complex: empty vertex tuple");
                Tuple t = raw;
                std::sort(t.begin(), t.end());
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (t[i] < 0)
                        throw std::invalid_argument("build_complex: negative vertex id");
                    if (i > 0 && t[i] == t[i - 1])
                        throw std::invalid_argument("build_complex: repeated vertex in tuple");
                }
                if (!seen.emplace(t, 1).second) {
                    std::ostringstream os;
                    os << "build_complex: duplicate simplex {";
                    for (std::size_t i = 0; i < t.size(); ++i)
                        os << (i ? "," : "") << t[i];
                    os << "}";
                    throw std::invalid_argument(os.str());
                }
                const int dim = static_cast<int>(t.size()) - 1;
                if (dim >= static_cast<int>(by_dim.size()))
                    by_dim.resize(dim + 1);
                by_dim[dim].push_back(std::move(t));
            }
        }
    }

    SimplicialComplex k;
    if (by_dim.empty())
        return k;

    const int p = static_cast<int>(by_dim.size()) - 1;

    // close under taking subsets, walking top-down so faces of faces appear
    std::vector<std::unordered_map<Tuple, int, detail::VertexTupleHash>> present(p + 1);
    for (int d = 0; d <= p; ++d)
        for (const Tuple& t : by_dim[d])
            present[d].emplace(t, 0);
    for (int d = p; d >= 1; --d) {
        std::vector<Tuple> frontier;
        for (const auto& [t, _] : present[d]) {
            Tuple face(t.size() - 1);
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                int w = 0;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (i != drop)
                        face[w++] = t[i];
                if (!present[d - 1].count(face))
                    frontier.push_back(face);
            }
        }
        for (Tuple& f : frontier)
            present[d - 1].emplace(std::move(f), 0);
    }

    // canonical lexicographic tables
    k.simplices_.resize(p + 1);
    k.lookup_.resize(p + 1);
    k.boundary_.resize(p + 1);
    k.coboundary_.resize(p + 1);
    for (int d = 0; d <= p; ++d) {
        auto& table = k.simplices_[d];
        table.reserve(present[d].size());
        for (const auto& [t, _] : present[d])
            table.push_back(t);
        std::sort(table.begin(), table.end());
        for (int i = 0; i < static_cast<int>(table.size()); ++i)
            k.lookup_[d].emplace(table[i], i);
        k.boundary_[d].resize(table.size());
        k.coboundary_[d].resize(table.size());
    }

    // boundary links with the alternating-sign parity rule: dropping the
    // i-th vertex of an ascending tuple contributes sign (-1)^i
    for (int d = 1; d <= p; ++d) {
        for (int j = 0; j < k.size(d); ++j) {
            const Tuple& t = k.simplices_[d][j];
            Tuple face(t.size() - 1);
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                int w = 0;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (i != drop)
                        face[w++] = t[i];
                const int sign = drop % 2 == 0 ? 1 : -1;
                const int fi = k.lookup_[d - 1].at(face);
                k.boundary_[d][j].push_back({fi, sign});
                k.coboundary_[d - 1][fi].push_back({j, sign});
            }
        }
    }
    return k;
}

/** Convenience: build from a flat list of top simplices. */
inline SimplicialComplex build_complex_from_tuples(const std::vector<std::vector<int>>& tuples)
{
    return build_complex({tuples});
}

}  // namespace scnet
