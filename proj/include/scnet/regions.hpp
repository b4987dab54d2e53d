#pragma once

#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scnet/layers.hpp"
#include "scnet/numerics.hpp"

namespace scnet {

using BigInt = boost::multiprecision::cpp_int;

enum class Arch { gnn, scnn, mpsn };

inline Arch arch_from_name(const std::string& name)
{
    if (name == "gnn")
        return Arch::gnn;
    if (name == "scnn")
        return Arch::scnn;
    if (name == "mpsn")
        return Arch::mpsn;
    throw std::invalid_argument("unknown architecture: " + name);
}

/** Central hyperplane arrangement given by the rows of a normal matrix. */
struct Arrangement {
    Matrix normals;  // W in R^{M x N}
    std::string provenance;
};

enum class RegionMethod { whitney, closed_form, slice_lower_bound };

struct RegionCount {
    BigInt count;
    RegionMethod method;
};

/**
 * Normal matrix of the one-layer ReLU arrangement for the chosen
 * architecture: W_0^T (x) M_0 for a GNN, the block diagonal of
 * W_n^T (x) M_n for an SCNN, and the block tridiagonal with off-diagonal
 * blocks W^T (x) U / W^T (x) O for the full message passing layer. The
 * weight list holds one d_n x m matrix per dimension.
 */
inline Arrangement build_arrangement(const Boundaries& b, Arch arch, const std::vector<int>& d,
                                     int m, const std::vector<Matrix>& weights,
                                     SelfOperator self = SelfOperator::shifted_laplacian)
{
    const int p = b.top();
    if (static_cast<int>(d.size()) != p + 1 || static_cast<int>(weights.size()) != p + 1)
        throw std::invalid_argument("build_arrangement: need one width and weight per dimension");
    for (int n = 0; n <= p; ++n)
        if (weights[n].rows() != d[n] || weights[n].cols() != m)
            throw std::invalid_argument("build_arrangement: weight shape mismatch");

    MpsnOperators ops = mpsn_operators(b, self);
    Arrangement a;

    if (arch == Arch::gnn) {
        a.normals = kron(weights[0].transpose(), ops.M[0]);
        a.provenance = "gnn";
        return a;
    }

    std::vector<int> col_offset(p + 2, 0), row_offset(p + 2, 0);
    for (int n = 0; n <= p; ++n) {
        col_offset[n + 1] = col_offset[n] + b.sizes[n] * d[n];
        row_offset[n + 1] = row_offset[n] + b.sizes[n] * m;
    }
    a.normals = Matrix::Zero(row_offset[p + 1], col_offset[p + 1]);
    for (int n = 0; n <= p; ++n) {
        auto place = [&](int col_dim, const Matrix& block) {
            a.normals.block(row_offset[n], col_offset[col_dim], b.sizes[n] * m,
                            b.sizes[col_dim] * d[col_dim]) = block;
        };
        place(n, kron(weights[n].transpose(), ops.M[n]));
        if (arch == Arch::mpsn) {
            if (n >= 1)
                place(n - 1, kron(weights[n - 1].transpose(), ops.U[n]));
            if (n + 1 <= p)
                place(n + 1, kron(weights[n + 1].transpose(), ops.O[n]));
        }
    }
    a.provenance = arch == Arch::scnn ? "scnn" : "mpsn";
    return a;
}

/**
 * Arrangement of the vertex-output block when the higher features are
 * populated as a linear map of the vertex features: rows of
 * W_0^T (x) M_0 + (W_1^T (x) O_0) C restricted to vertex-feature space.
 */
inline Arrangement populated_features_arrangement(const Boundaries& b, const Matrix& w0,
                                                  const Matrix& w1, const Matrix& population,
                                                  SelfOperator self = SelfOperator::shifted_laplacian)
{
    if (b.top() < 1)
        throw std::invalid_argument("populated_features_arrangement: need edges");
    MpsnOperators ops = mpsn_operators(b, self);
    Matrix vertex_block = kron(w0.transpose(), ops.M[0]);
    Matrix edge_block = kron(w1.transpose(), ops.O[0]);
    if (population.rows() != edge_block.cols() || population.cols() != vertex_block.cols())
        throw std::invalid_argument("populated_features_arrangement: population map shape");
    Arrangement a;
    a.normals = vertex_block + edge_block * population;
    a.provenance = "mpsn-populated";
    return a;
}

constexpr int kWhitneyMaxRows = 22;

namespace detail {

inline int worker_count()
{
    if (const char* env = std::getenv("SCNET_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/**
 * Signed Whitney sum over the subset index range [first, last). Subsets are
 * visited in Gray-code order so each step toggles a single row; ranks are
 * recomputed from scratch on a preallocated scratch block.
 */
inline std::int64_t whitney_partial_sum(const Matrix& w, std::uint64_t first, std::uint64_t last,
                                        double eps_rel)
{
    const int rows = static_cast<int>(w.rows());
    std::vector<int> member(rows, 0);
    std::vector<int> active;
    active.reserve(rows);

    auto set_subset = [&](std::uint64_t index) {
        const std::uint64_t gray = index ^ (index >> 1);
        active.clear();
        for (int r = 0; r < rows; ++r) {
            member[r] = static_cast<int>((gray >> r) & 1ULL);
            if (member[r])
                active.push_back(r);
        }
    };

    Matrix scratch(rows, w.cols());
    std::int64_t sum = 0;
    set_subset(first);
    for (std::uint64_t i = first;; ++i) {
        const int cnt = static_cast<int>(active.size());
        int rank = 0;
        if (cnt > 0) {
            for (int r = 0; r < cnt; ++r)
                scratch.row(r) = w.row(active[r]);
            rank = rank_in_place(scratch.topRows(cnt), eps_rel);
        }
        sum += (cnt - rank) % 2 == 0 ? 1 : -1;

        if (i + 1 >= last)
            break;
        // Gray neighbour: toggle the lowest set bit of i+1
        int bit = 0;
        std::uint64_t x = i + 1;
        while ((x & 1ULL) == 0) {
            x >>= 1;
            ++bit;
        }
        if (member[bit]) {
            member[bit] = 0;
            active.erase(std::find(active.begin(), active.end(), bit));
        } else {
            member[bit] = 1;
            active.push_back(bit);
        }
    }
    return sum;
}

}  // namespace detail

/**
 * Exact number of regions of the central arrangement via the signed sum
 * over row subsets, r(A) = sum_B (-1)^{|B| - rank(W_B)}. Zero rows define
 * no hyperplane and are dropped. Enumeration is 2^M, capped at M = 22;
 * the subset index space is partitioned across workers.
 */
inline RegionCount whitney_count(const Arrangement& a, double eps_rel = kDefaultRankEps)
{
    std::vector<int> nonzero;
    for (Eigen::Index r = 0; r < a.normals.rows(); ++r)
        if (a.normals.row(r).cwiseAbs().maxCoeff() > 0.0)
            nonzero.push_back(static_cast<int>(r));
    Matrix w(nonzero.size(), a.normals.cols());
    for (std::size_t r = 0; r < nonzero.size(); ++r)
        w.row(r) = a.normals.row(nonzero[r]);

    const int rows = static_cast<int>(w.rows());
    if (rows > kWhitneyMaxRows)
        throw std::runtime_error(
            "whitney_count: " + std::to_string(rows) + " hyperplanes exceed the 2^M budget (max " +
            std::to_string(kWhitneyMaxRows) + "); use the closed-form bound or slice modes");

    const std::uint64_t total = 1ULL << rows;
    const int workers = std::min<std::uint64_t>(detail::worker_count(), total);
    std::int64_t sum = 0;
    if (workers <= 1) {
        sum = detail::whitney_partial_sum(w, 0, total, eps_rel);
    } else {
        std::vector<std::int64_t> partial(workers, 0);
        std::vector<std::thread> threads;
        const std::uint64_t chunk = total / workers;
        for (int t = 0; t < workers; ++t) {
            const std::uint64_t first = t * chunk;
            const std::uint64_t last = t + 1 == workers ? total : first + chunk;
            threads.emplace_back([&, t, first, last] {
                partial[t] = detail::whitney_partial_sum(w, first, last, eps_rel);
            });
        }
        for (auto& th : threads)
            th.join();
        for (std::int64_t p : partial)
            sum += p;
    }
    return {BigInt(sum), RegionMethod::whitney};
}

// ------------------------------------------------------------------
// Closed forms
// ------------------------------------------------------------------

inline BigInt binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    BigInt out = 1;
    for (int i = 0; i < k; ++i) {
        out *= n - i;
        out /= i + 1;
    }
    return out;
}

/** Regions of M generic central hyperplanes in R^N: 2 sum_{j<N} C(M-1, j). */
inline BigInt generic_central_regions(int m_rows, int n_dims)
{
    BigInt out = 0;
    for (int j = 0; j <= n_dims - 1; ++j)
        out += binomial(m_rows - 1, j);
    return 2 * out;
}

inline BigInt pow_bigint(BigInt base, int exp)
{
    BigInt out = 1;
    for (int i = 0; i < exp; ++i)
        out *= base;
    return out;
}

/**
 * Closed-form region counts: the per-dimension product formulas for GNN and
 * SCNN layers (exact for invertible operators and generic weights) and the
 * upper bound for the message passing layer, returned as the minimum of its
 * product form and the trivial bound.
 */
inline BigInt closed_form_bound(Arch arch, const std::vector<int>& s, const std::vector<int>& d,
                                int m)
{
    if (s.size() != d.size() || s.empty())
        throw std::invalid_argument("closed_form_bound: size/width mismatch");
    const int p = static_cast<int>(s.size()) - 1;
    switch (arch) {
    case Arch::gnn:
        return pow_bigint(generic_central_regions(m, d[0]), s[0]);
    case Arch::scnn: {
        BigInt out = 1;
        for (int n = 0; n <= p; ++n)
            out *= pow_bigint(generic_central_regions(m, d[n]), s[n]);
        return out;
    }
    case Arch::mpsn: {
        BigInt product = 1;
        for (int n = 0; n <= p; ++n) {
            const int reach = (n >= 1 ? d[n - 1] : 0) + d[n] + (n + 1 <= p ? d[n + 1] : 0);
            product *= pow_bigint(generic_central_regions(m, reach), s[n]);
        }
        int big_m = 0, big_n = 0;
        for (int n = 0; n <= p; ++n) {
            big_m += s[n] * m;
            big_n += s[n] * d[n];
        }
        const BigInt trivial = generic_central_regions(big_m, big_n);
        return product < trivial ? product : trivial;
    }
    }
    throw std::logic_error("closed_form_bound: bad arch");
}

/** Both upper bounds for the message passing layer, before taking the min. */
struct MpsnBounds {
    BigInt product_form;
    BigInt trivial;
};

inline MpsnBounds mpsn_bounds(const std::vector<int>& s, const std::vector<int>& d, int m)
{
    const int p = static_cast<int>(s.size()) - 1;
    MpsnBounds out;
    out.product_form = 1;
    for (int n = 0; n <= p; ++n) {
        const int reach = (n >= 1 ? d[n - 1] : 0) + d[n] + (n + 1 <= p ? d[n + 1] : 0);
        out.product_form *= pow_bigint(generic_central_regions(m, reach), s[n]);
    }
    int big_m = 0, big_n = 0;
    for (int n = 0; n <= p; ++n) {
        big_m += s[n] * m;
        big_n += s[n] * d[n];
    }
    out.trivial = generic_central_regions(big_m, big_n);
    return out;
}

// ------------------------------------------------------------------
// 2D slices
// ------------------------------------------------------------------

struct SlicePlane {
    Vector base;
    Vector u;
    Vector v;
};

struct SliceCell {
    double x;
    double y;
    int label;
};

struct SliceResult {
    std::vector<SliceCell> cells;
    int resolution = 0;
    long long distinct = 0;

    std::string csv() const
    {
        std::ostringstream os;
        os << "x,y,region_label\n";
        for (const SliceCell& c : cells)
            os << c.x << "," << c.y << "," << c.label << "\n";
        return os.str();
    }
};

/**
 * Sign-pattern labels of W (base + s u + t v) on a resolution^2 grid over
 * [-1,1]^2. Exact zeros are resolved as +. The number of distinct labels is
 * a lower bound on the region count.
 */
inline SliceResult slice_regions(const Arrangement& a, const SlicePlane& plane, int resolution)
{
    if (resolution < 16)
        throw std::invalid_argument("slice_regions: resolution must be at least 16");
    const Eigen::Index n = a.normals.cols();
    if (plane.base.size() != n || plane.u.size() != n || plane.v.size() != n)
        throw std::invalid_argument("slice_regions: plane dimension mismatch");
    Matrix dirs(n, 2);
    dirs.col(0) = plane.u;
    dirs.col(1) = plane.v;
    if (rank_with_tolerance(dirs, 1e-12) < 2)
        throw std::invalid_argument("slice_regions: slice directions are parallel");

    SliceResult out;
    out.resolution = resolution;
    out.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
    std::map<std::vector<char>, int> labels;
    for (int yi = 0; yi < resolution; ++yi) {
        const double t = -1.0 + 2.0 * yi / (resolution - 1);
        for (int xi = 0; xi < resolution; ++xi) {
            const double s = -1.0 + 2.0 * xi / (resolution - 1);
            Vector x = plane.base + s * plane.u + t * plane.v;
            Vector dots = a.normals * x;
            std::vector<char> pattern(dots.size());
            for (Eigen::Index i = 0; i < dots.size(); ++i)
                pattern[i] = dots(i) < 0.0 ? '-' : '+';
            auto [it, fresh] = labels.emplace(std::move(pattern),
                                              static_cast<int>(labels.size()));
            out.cells.push_back({s, t, it->second});
        }
    }
    out.distinct = static_cast<long long>(labels.size());
    return out;
}

/** Random slice plane through the origin. */
inline SlicePlane random_slice_plane(Rng& rng, Eigen::Index dims)
{
    SlicePlane plane;
    plane.base = Vector::Zero(dims);
    plane.u = Vector(dims);
    plane.v = Vector(dims);
    for (Eigen::Index i = 0; i < dims; ++i) {
        plane.u(i) = rng.normal();
        plane.v(i) = rng.normal();
    }
    plane.u.normalize();
    plane.v -= plane.u * plane.u.dot(plane.v);
    plane.v.normalize();
    return plane;
}

// ------------------------------------------------------------------
// Rank-dominance condition for the layer comparison
// ------------------------------------------------------------------

/**
 * Checks rank((O_n)_C) >= rank((M_n)_C) for every row selection C and
 * d_{n+1} >= d_n for n = 0..p-1, the precondition of the region-count
 * comparison between the message passing and per-dimension layers.
 */
inline bool rank_dominance_condition(const MpsnOperators& ops, const std::vector<int>& d)
{
    const int p = static_cast<int>(ops.M.size()) - 1;
    for (int n = 0; n + 1 <= p; ++n) {
        if (d[n + 1] < d[n])
            return false;
        const int rows = static_cast<int>(ops.M[n].rows());
        if (rows > 20)
            throw std::invalid_argument("rank_dominance_condition: too many rows to enumerate");
        Matrix scratch_m(rows, ops.M[n].cols());
        Matrix scratch_o(rows, ops.O[n].cols());
        for (std::uint64_t mask = 1; mask < (1ULL << rows); ++mask) {
            int cnt = 0;
            for (int r = 0; r < rows; ++r)
                if ((mask >> r) & 1ULL) {
                    scratch_m.row(cnt) = ops.M[n].row(r);
                    scratch_o.row(cnt) = ops.O[n].row(r);
                    ++cnt;
                }
            if (rank_in_place(scratch_o.topRows(cnt)) < rank_in_place(scratch_m.topRows(cnt)))
                return false;
        }
    }
    return true;
}

}  // namespace scnet
