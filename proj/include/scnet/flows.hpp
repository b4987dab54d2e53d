#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "scnet/complex.hpp"
#include "scnet/numerics.hpp"

namespace scnet {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct HoleRect {
    double xmin, ymin, xmax, ymax;

    bool contains(double x, double y) const
    {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

namespace detail {

inline double orient2d(const Point2& a, const Point2& b, const Point2& c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/** Positive iff p lies strictly inside the circumcircle of ccw (a,b,c). */
inline double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& p)
{
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
}

inline bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                               const Point2& d)
{
    const double d1 = orient2d(c, d, a);
    const double d2 = orient2d(c, d, b);
    const double d3 = orient2d(a, b, c);
    const double d4 = orient2d(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](const Point2& p, const Point2& q, const Point2& r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    if (d1 == 0 && on_segment(c, a, d))
        return true;
    if (d2 == 0 && on_segment(c, b, d))
        return true;
    if (d3 == 0 && on_segment(a, c, b))
        return true;
    if (d4 == 0 && on_segment(a, d, b))
        return true;
    return false;
}

inline bool point_in_triangle(const Point2& p, const Point2& a, const Point2& b,
                              const Point2& c)
{
    const double d1 = orient2d(p, a, b);
    const double d2 = orient2d(p, b, c);
    const double d3 = orient2d(p, c, a);
    const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(has_neg && has_pos);
}

inline bool triangle_intersects_rect(const Point2& a, const Point2& b, const Point2& c,
                                     const HoleRect& r)
{
    for (const Point2& p : {a, b, c})
        if (r.contains(p.x, p.y))
            return true;
    const Point2 corners[4] = {{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax},
                               {r.xmin, r.ymax}};
    for (const Point2& corner : corners)
        if (point_in_triangle(corner, a, b, c))
            return true;
    const std::array<std::pair<Point2, Point2>, 3> tri_edges{
        std::pair{a, b}, std::pair{b, c}, std::pair{c, a}};
    const std::array<std::pair<Point2, Point2>, 4> rect_edges{
        std::pair{corners[0], corners[1]}, std::pair{corners[1], corners[2]},
        std::pair{corners[2], corners[3]}, std::pair{corners[3], corners[0]}};
    for (const auto& [p, q] : tri_edges)
        for (const auto& [u, v] : rect_edges)
            if (segments_intersect(p, q, u, v))
                return true;
    return false;
}

/**
 * Incremental Bowyer-Watson triangulation. Throws on a degenerate cavity;
 * callers perturb the input and retry.
 */
inline std::vector<std::array<int, 3>> bowyer_watson(const std::vector<Point2>& pts)
{
    const int n = static_cast<int>(pts.size());
    std::vector<Point2> all = pts;
    // super triangle far outside the unit square
    all.push_back({-100.0, -100.0});
    all.push_back({300.0, -100.0});
    all.push_back({-100.0, 300.0});

    struct Tri {
        int a, b, c;
    };
    std::vector<Tri> tris;
    auto make_ccw = [&](int a, int b, int c) {
        if (orient2d(all[a], all[b], all[c]) < 0)
            std::swap(b, c);
        return Tri{a, b, c};
    };
    tris.push_back(make_ccw(n, n + 1, n + 2));

    for (int p = 0; p < n; ++p) {
        std::vector<Tri> keep;
        std::vector<std::pair<int, int>> cavity_edges;
        for (const Tri& t : tris) {
            if (incircle(all[t.a], all[t.b], all[t.c], all[p]) > 0) {
                for (auto [u, v] : {std::pair{t.a, t.b}, std::pair{t.b, t.c},
                                    std::pair{t.c, t.a}}) {
                    auto reversed = std::find(cavity_edges.begin(), cavity_edges.end(),
                                              std::pair{v, u});
                    if (reversed != cavity_edges.end())
                        cavity_edges.erase(reversed);
                    else
                        cavity_edges.emplace_back(u, v);
                }
            } else {
                keep.push_back(t);
            }
        }
        if (cavity_edges.empty())
            throw std::runtime_error("triangulation: degenerate cavity");
        tris = std::move(keep);
        for (auto [u, v] : cavity_edges)
            tris.push_back(make_ccw(u, v, p));
    }

    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris) {
        if (t.a >= n || t.b >= n || t.c >= n)
            continue;
        std::array<int, 3> tri{t.a, t.b, t.c};
        std::sort(tri.begin(), tri.end());
        out.push_back(tri);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/**
 * A triangulated region of the unit square with rectangular holes. The
 * complex is the closure of the surviving Delaunay triangles; point
 * coordinates are kept for trajectory generation.
 */
struct PlanarComplex {
    std::vector<Point2> points;
    SimplicialComplex complex;
    std::vector<HoleRect> holes;

    int euler_characteristic() const
    {
        return complex.size(0) - complex.size(1) + complex.size(2);
    }
};

inline std::vector<HoleRect> default_holes()
{
    return {{0.2, 0.4, 0.4, 0.6}, {0.6, 0.4, 0.8, 0.6}};
}

/**
 * Sample points uniformly in the unit square, triangulate, and remove every
 * triangle that intersects a hole together with the points left in no
 * triangle. Degenerate point sets are perturbed and retried.
 */
inline PlanarComplex generate_complex(int n_points, const std::vector<HoleRect>& holes,
                                      std::uint64_t seed)
{
    if (n_points < 50)
        throw std::invalid_argument("generate_complex: need at least 50 points");
    Rng rng(seed);
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::vector<Point2> pts(n_points);
        for (Point2& p : pts)
            p = {rng.uniform(), rng.uniform()};
        if (attempt > 0)
            for (Point2& p : pts) {
                p.x = std::min(1.0, std::max(0.0, p.x + 1e-7 * rng.uniform(-1.0, 1.0)));
                p.y = std::min(1.0, std::max(0.0, p.y + 1e-7 * rng.uniform(-1.0, 1.0)));
            }
        std::vector<std::array<int, 3>> tris;
        try {
            tris = detail::bowyer_watson(pts);
        } catch (const std::runtime_error&) {
            continue;
        }

        std::vector<std::array<int, 3>> kept;
        for (const auto& t : tris) {
            bool blocked = false;
            for (const HoleRect& hole : holes)
                if (detail::triangle_intersects_rect(pts[t[0]], pts[t[1]], pts[t[2]], hole)) {
                    blocked = true;
                    break;
                }
            if (!blocked)
                kept.push_back(t);
        }
        if (kept.empty())
            continue;

        // drop points in no surviving triangle, remap ids in ascending order
        std::vector<int> new_id(n_points, -1);
        int next = 0;
        for (const auto& t : kept)
            for (int v : t)
                if (new_id[v] == -1)
                    new_id[v] = 0;
        for (int v = 0; v < n_points; ++v)
            if (new_id[v] == 0)
                new_id[v] = next++;
        PlanarComplex pc;
        pc.holes = holes;
        pc.points.resize(next);
        for (int v = 0; v < n_points; ++v)
            if (new_id[v] >= 0)
                pc.points[new_id[v]] = pts[v];
        std::vector<std::vector<int>> tuples;
        for (const auto& t : kept)
            tuples.push_back({new_id[t[0]], new_id[t[1]], new_id[t[2]]});
        pc.complex = build_complex({tuples});
        return pc;
    }
    throw std::runtime_error("generate_complex: degenerate point sets after 5 retries");
}

// ------------------------------------------------------------------
// Trajectories
// ------------------------------------------------------------------

/** One trajectory as an edge flow plus the orientation it is expressed in. */
struct FlowSample {
    Vector flow;   // one entry per edge, relative to the recorded orientation
    int label = 0;
    Vector flip;   // ±1 per edge; all ones means the canonical orientation
};

namespace detail {

inline std::vector<int> vertices_in_region(const PlanarComplex& pc, double xmin, double ymin,
                                           double xmax, double ymax)
{
    std::vector<int> out;
    for (std::size_t v = 0; v < pc.points.size(); ++v)
        if (pc.points[v].x >= xmin && pc.points[v].x <= xmax && pc.points[v].y >= ymin &&
            pc.points[v].y <= ymax)
            out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace detail

/**
 * Random walks from the top-left corner to the bottom-right corner through
 * a class checkpoint (bottom-left for class 0, top-right for class 1). At
 * each step the unvisited neighbour closest to the current target is chosen
 * with probability greedy_prob, otherwise a random unvisited neighbour.
 * The vertex walk is recorded as a ±1 edge flow relative to the canonical
 * orientation.
 */
inline std::vector<FlowSample> generate_trajectories(const PlanarComplex& pc, int n,
                                                     int class_label, double greedy_prob,
                                                     std::uint64_t seed)
{
    const double corner = 0.2;
    auto starts = detail::vertices_in_region(pc, 0.0, 1.0 - corner, corner, 1.0);
    auto ends = detail::vertices_in_region(pc, 1.0 - corner, 0.0, 1.0, corner);
    auto checkpoints = class_label == 0
                           ? detail::vertices_in_region(pc, 0.0, 0.0, corner, corner)
                           : detail::vertices_in_region(pc, 1.0 - corner, 1.0 - corner, 1.0, 1.0);
    if (starts.empty() || ends.empty() || checkpoints.empty())
        throw std::runtime_error("generate_trajectories: a corner region holds no vertices");

    const int n_vertices = pc.complex.size(0);
    const int n_edges = pc.complex.size(1);
    std::vector<std::vector<int>> adj(n_vertices);
    for (int e = 0; e < n_edges; ++e) {
        const auto& tuple = pc.complex.simplices(1)[e];
        adj[tuple[0]].push_back(tuple[1]);
        adj[tuple[1]].push_back(tuple[0]);
    }

    Rng rng(seed);
    const int max_steps = 4 * n_vertices;
    std::vector<FlowSample> samples;
    samples.reserve(n);
    int guard = 0;
    while (static_cast<int>(samples.size()) < n) {
        if (++guard > 1000 * n)
            throw std::runtime_error("generate_trajectories: endpoint unreachable");
        const int start = starts[rng.below(starts.size())];
        const int checkpoint = checkpoints[rng.below(checkpoints.size())];
        const int goal = ends[rng.below(ends.size())];

        std::vector<char> visited(n_vertices, 0);
        std::vector<int> walk{start};
        visited[start] = 1;
        bool ok = true;
        for (int target : {checkpoint, goal}) {
            while (walk.back() != target) {
                if (static_cast<int>(walk.size()) > max_steps) {
                    ok = false;
                    break;
                }
                const Point2 target_pt = pc.points[target];
                std::vector<int> options;
                for (int u : adj[walk.back()])
                    if (!visited[u])
                        options.push_back(u);
                if (options.empty()) {
                    ok = false;
                    break;
                }
                int next;
                if (rng.bernoulli(greedy_prob)) {
                    next = options[0];
                    double best = std::hypot(pc.points[next].x - target_pt.x,
                                             pc.points[next].y - target_pt.y);
                    for (int u : options) {
                        const double dist = std::hypot(pc.points[u].x - target_pt.x,
                                                       pc.points[u].y - target_pt.y);
                        if (dist < best) {
                            best = dist;
                            next = u;
                        }
                    }
                } else {
                    next = options[rng.below(options.size())];
                }
                walk.push_back(next);
                visited[next] = 1;
            }
            if (!ok)
                break;
        }
        if (!ok)
            continue;

        FlowSample sample;
        sample.label = class_label;
        sample.flow = Vector::Zero(n_edges);
        sample.flip = Vector::Ones(n_edges);
        for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
            const int u = walk[i], v = walk[i + 1];
            const auto edge = pc.complex.find(1, {std::min(u, v), std::max(u, v)});
            sample.flow(*edge) += u < v ? 1.0 : -1.0;
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

/** Re-express a sample in the orientation obtained by a further flip t1. */
inline FlowSample flip_sample(const FlowSample& sample, const Vector& t1)
{
    FlowSample out = sample;
    out.flow = t1.cwiseProduct(sample.flow);
    out.flip = t1.cwiseProduct(sample.flip);
    return out;
}

struct FlowDataset {
    PlanarComplex complex;
    std::vector<FlowSample> train;
    std::vector<FlowSample> test;
    std::uint64_t seed = 0;
};

struct FlowDatasetConfig {
    int n_points = 300;
    int n_train = 200;
    int n_test = 50;
    double greedy_prob = 0.9;
    std::uint64_t seed = 1;
    std::vector<HoleRect> holes = default_holes();
};

/** Balanced two-class dataset; training flows use the canonical orientation. */
inline FlowDataset generate_flow_dataset(const FlowDatasetConfig& cfg)
{
    FlowDataset ds;
    ds.seed = cfg.seed;
    ds.complex = generate_complex(cfg.n_points, cfg.holes, derive_seed(cfg.seed, 0));
    auto gen = [&](int count, int label, std::uint64_t salt) {
        return generate_trajectories(ds.complex, count, label, cfg.greedy_prob,
                                     derive_seed(cfg.seed, salt));
    };
    auto train0 = gen(cfg.n_train / 2, 0, 1);
    auto train1 = gen(cfg.n_train - cfg.n_train / 2, 1, 2);
    auto test0 = gen(cfg.n_test / 2, 0, 3);
    auto test1 = gen(cfg.n_test - cfg.n_test / 2, 1, 4);
    // interleave so mini-batches stay balanced
    for (std::size_t i = 0; i < train0.size() || i < train1.size(); ++i) {
        if (i < train0.size())
            ds.train.push_back(std::move(train0[i]));
        if (i < train1.size())
            ds.train.push_back(std::move(train1[i]));
    }
    for (std::size_t i = 0; i < test0.size() || i < test1.size(); ++i) {
        if (i < test0.size())
            ds.test.push_back(std::move(test0[i]));
        if (i < test1.size())
            ds.test.push_back(std::move(test1[i]));
    }
    return ds;
}

/**
 * Give every test sample an independently sampled random edge orientation;
 * training samples are left untouched.
 */
inline FlowDataset randomize_test_orientations(const FlowDataset& ds, std::uint64_t seed)
{
    FlowDataset out = ds;
    Rng rng(seed);
    for (FlowSample& sample : out.test) {
        Vector t1(sample.flow.size());
        for (Eigen::Index i = 0; i < t1.size(); ++i)
            t1(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
        sample = flip_sample(sample, t1);
    }
    return out;
}

/** Dimension of the harmonic space ker L_1, one per hole of the region. */
inline int harmonic_dimension(const SimplicialComplex& k, double eps_rel = 1e-8)
{
    if (k.top_dimension() < 1)
        return 0;
    Matrix l1 = k.hodge_laplacian(1).cast<double>();
    return k.size(1) - rank_with_tolerance(l1, eps_rel);
}

}  // namespace scnet
