#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scnet/complex.hpp"
#include "scnet/numerics.hpp"

namespace scnet {

enum class Activation { identity, relu, tanh_fn, elu };

inline Matrix activate(Matrix x, Activation act)
{
    switch (act) {
    case Activation::identity:
        return x;
    case Activation::relu:
        return x.cwiseMax(0.0);
    case Activation::tanh_fn:
        return tanh_odd(x);
    case Activation::elu:
        return x.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
    }
    throw std::logic_error("activate: bad activation");
}

inline Activation activation_from_name(const std::string& name)
{
    if (name == "identity" || name == "id")
        return Activation::identity;
    if (name == "relu")
        return Activation::relu;
    if (name == "tanh")
        return Activation::tanh_fn;
    if (name == "elu")
        return Activation::elu;
    throw std::invalid_argument("unknown activation: " + name);
}

/** Per-dimension feature matrices H_0..H_p, row order matching the complex. */
struct FeatureStack {
    std::vector<Matrix> H;

    int dims() const { return static_cast<int>(H.size()); }
};

/** Dense real boundary matrices of a complex; index k holds B_k (k >= 1). */
struct Boundaries {
    std::vector<int> sizes;  // S_0..S_p
    std::vector<Matrix> B;   // B[0] is an unused placeholder

    int top() const { return static_cast<int>(sizes.size()) - 1; }
};

inline Boundaries boundaries_of(const SimplicialComplex& k)
{
    Boundaries b;
    b.sizes = k.dim_counts();
    b.B.resize(k.top_dimension() + 1);
    for (int d = 1; d <= k.top_dimension(); ++d)
        b.B[d] = k.boundary_matrix(d).dense_real();
    return b;
}

/** Element-wise |B| of all boundary matrices. */
inline Boundaries unsigned_boundaries(Boundaries b)
{
    for (Matrix& m : b.B)
        m = m.cwiseAbs();
    return b;
}

// ------------------------------------------------------------------
// Symmetry transforms (simplex relabelling and orientation changes)
// ------------------------------------------------------------------

/** Per-dimension permutations; entry perm[n][i] is the new index of simplex i. */
struct SimplexPermutation {
    std::vector<std::vector<int>> perm;
};

/** Per-dimension diagonal ±1 reorientations; vertices are never flipped. */
struct OrientationFlip {
    std::vector<Vector> t;  // t[0] is forced to all ones
};

inline SimplexPermutation random_simplex_permutation(Rng& rng, const std::vector<int>& sizes)
{
    SimplexPermutation p;
    for (int s : sizes) {
        std::vector<int> perm(s);
        for (int i = 0; i < s; ++i)
            perm[i] = i;
        for (int i = s - 1; i > 0; --i)
            std::swap(perm[i], perm[static_cast<int>(rng.below(i + 1))]);
        p.perm.push_back(std::move(perm));
    }
    return p;
}

inline OrientationFlip random_orientation_flip(Rng& rng, const std::vector<int>& sizes)
{
    OrientationFlip f;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
        Vector t = Vector::Ones(sizes[d]);
        if (d > 0)
            for (int i = 0; i < sizes[d]; ++i)
                t(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
        f.t.push_back(std::move(t));
    }
    return f;
}

inline std::pair<FeatureStack, Boundaries> apply_permutation(const FeatureStack& h,
                                                             const Boundaries& b,
                                                             const SimplexPermutation& p)
{
    if (p.perm.size() != static_cast<std::size_t>(b.top() + 1))
        throw std::invalid_argument("apply_permutation: dimension mismatch");
    FeatureStack ph;
    ph.H.resize(h.H.size());
    for (std::size_t n = 0; n < h.H.size(); ++n) {
        const auto& perm = p.perm[n];
        ph.H[n].resize(h.H[n].rows(), h.H[n].cols());
        for (Eigen::Index i = 0; i < h.H[n].rows(); ++i)
            ph.H[n].row(perm[i]) = h.H[n].row(i);
    }
    Boundaries pb = b;
    for (int k = 1; k <= b.top(); ++k) {
        const auto& rows = p.perm[k - 1];
        const auto& cols = p.perm[k];
        Matrix out(b.B[k].rows(), b.B[k].cols());
        for (Eigen::Index i = 0; i < b.B[k].rows(); ++i)
            for (Eigen::Index j = 0; j < b.B[k].cols(); ++j)
                out(rows[i], cols[j]) = b.B[k](i, j);
        pb.B[k] = std::move(out);
    }
    return {std::move(ph), std::move(pb)};
}

inline std::pair<FeatureStack, Boundaries> apply_flip(const FeatureStack& h, const Boundaries& b,
                                                      const OrientationFlip& f)
{
    if (f.t.size() != static_cast<std::size_t>(b.top() + 1))
        throw std::invalid_argument("apply_flip: dimension mismatch");
    for (int i = 0; i < f.t[0].size(); ++i)
        if (f.t[0](i) != 1.0)
            throw std::invalid_argument("apply_flip: vertices have trivial orientation");
    FeatureStack th;
    th.H.resize(h.H.size());
    for (std::size_t n = 0; n < h.H.size(); ++n)
        th.H[n] = f.t[n].asDiagonal() * h.H[n];
    Boundaries tb = b;
    for (int k = 1; k <= b.top(); ++k)
        tb.B[k] = f.t[k - 1].asDiagonal() * b.B[k] * f.t[k].asDiagonal();
    return {std::move(th), std::move(tb)};
}

/** Apply a per-dimension permutation to a colour-style index map. */
inline FeatureStack permute_features(const FeatureStack& h, const SimplexPermutation& p)
{
    FeatureStack out;
    out.H.resize(h.H.size());
    for (std::size_t n = 0; n < h.H.size(); ++n) {
        out.H[n].resize(h.H[n].rows(), h.H[n].cols());
        for (Eigen::Index i = 0; i < h.H[n].rows(); ++i)
            out.H[n].row(p.perm[n][i]) = h.H[n].row(i);
    }
    return out;
}

inline FeatureStack flip_features(const FeatureStack& h, const OrientationFlip& f)
{
    FeatureStack out;
    out.H.resize(h.H.size());
    for (std::size_t n = 0; n < h.H.size(); ++n)
        out.H[n] = f.t[n].asDiagonal() * h.H[n];
    return out;
}

// ------------------------------------------------------------------
// Layer operators
// ------------------------------------------------------------------

enum class SelfOperator { shifted_laplacian, laplacian, identity };

/** The M_n / U_n / O_n adjacency operators feeding a message passing layer. */
struct MpsnOperators {
    std::vector<Matrix> M;  // S_n x S_n
    std::vector<Matrix> U;  // S_n x S_{n-1}; U[0] unused
    std::vector<Matrix> O;  // S_n x S_{n+1}; O[p] unused
};

inline MpsnOperators mpsn_operators(const Boundaries& b,
                                    SelfOperator self = SelfOperator::shifted_laplacian)
{
    const int p = b.top();
    MpsnOperators ops;
    ops.M.resize(p + 1);
    ops.U.resize(p + 1);
    ops.O.resize(p + 1);
    for (int n = 0; n <= p; ++n) {
        const int s = b.sizes[n];
        Matrix l = Matrix::Zero(s, s);
        if (n >= 1)
            l += b.B[n].transpose() * b.B[n];
        if (n + 1 <= p)
            l += b.B[n + 1] * b.B[n + 1].transpose();
        switch (self) {
        case SelfOperator::shifted_laplacian:
            ops.M[n] = l + Matrix::Identity(s, s);
            break;
        case SelfOperator::laplacian:
            ops.M[n] = std::move(l);
            break;
        case SelfOperator::identity:
            ops.M[n] = Matrix::Identity(s, s);
            break;
        }
        if (n >= 1)
            ops.U[n] = b.B[n].transpose();
        if (n + 1 <= p)
            ops.O[n] = b.B[n + 1];
    }
    return ops;
}

/** Single GNN convolution H_out = act(agg * H * W). */
inline Matrix gnn_layer(const Matrix& aggregation, const Matrix& h, const Matrix& w,
                        Activation act = Activation::relu)
{
    if (aggregation.cols() != h.rows() || h.cols() != w.rows())
        throw std::invalid_argument("gnn_layer: shape mismatch");
    return activate(aggregation * h * w, act);
}

/** SCNN layer: dimensions are processed independently, H_n -> act(M_n H_n W_n). */
inline FeatureStack scnn_layer_ops(const MpsnOperators& ops, const FeatureStack& h,
                                   const std::vector<Matrix>& w,
                                   Activation act = Activation::relu)
{
    const int p = static_cast<int>(ops.M.size()) - 1;
    if (h.dims() != p + 1 || static_cast<int>(w.size()) != p + 1)
        throw std::invalid_argument("scnn_layer: shape mismatch");
    FeatureStack out;
    out.H.resize(p + 1);
    for (int n = 0; n <= p; ++n)
        out.H[n] = gnn_layer(ops.M[n], h.H[n], w[n], act);
    return out;
}

inline FeatureStack scnn_layer(const SimplicialComplex& k, const FeatureStack& h,
                               const std::vector<Matrix>& w, Activation act = Activation::relu,
                               SelfOperator self = SelfOperator::shifted_laplacian)
{
    return scnn_layer_ops(mpsn_operators(boundaries_of(k), self), h, w, act);
}

/**
 * General message passing layer: for every dimension n,
 * H_n -> act(M_n H_n W_n + U_n H_{n-1} W_{n-1} + O_n H_{n+1} W_{n+1}),
 * with the boundary term absent at n = 0 and the coboundary term absent at
 * the top dimension. One weight matrix per dimension, shared between the
 * blocks in which it appears.
 */
inline FeatureStack mpsn_layer_ops(const MpsnOperators& ops, const FeatureStack& h,
                                   const std::vector<Matrix>& w,
                                   Activation act = Activation::relu)
{
    const int p = static_cast<int>(ops.M.size()) - 1;
    if (h.dims() != p + 1 || static_cast<int>(w.size()) != p + 1)
        throw std::invalid_argument("mpsn_layer: shape mismatch");
    FeatureStack out;
    out.H.resize(p + 1);
    for (int n = 0; n <= p; ++n) {
        Matrix z = ops.M[n] * h.H[n] * w[n];
        if (n >= 1)
            z += ops.U[n] * h.H[n - 1] * w[n - 1];
        if (n + 1 <= p)
            z += ops.O[n] * h.H[n + 1] * w[n + 1];
        out.H[n] = activate(std::move(z), act);
    }
    return out;
}

inline FeatureStack mpsn_layer(const SimplicialComplex& k, const FeatureStack& h,
                               const std::vector<Matrix>& w, Activation act = Activation::relu,
                               SelfOperator self = SelfOperator::shifted_laplacian)
{
    return mpsn_layer_ops(mpsn_operators(boundaries_of(k), self), h, w, act);
}

/** Polynomial convolution act(sum_r L^r H W_r) on the simplices of one dimension. */
inline Matrix snn_poly_layer(const Matrix& laplacian, const Matrix& h,
                             const std::vector<Matrix>& w_r,
                             Activation act = Activation::relu)
{
    Matrix z = Matrix::Zero(h.rows(), w_r.at(0).cols());
    Matrix power = Matrix::Identity(laplacian.rows(), laplacian.cols());
    for (std::size_t r = 0; r < w_r.size(); ++r) {
        z += power * h * w_r[r];
        if (r + 1 < w_r.size())
            power = power * laplacian;
    }
    return activate(std::move(z), act);
}

/**
 * The same polynomial convolution evaluated through separate lower/upper
 * neighbourhood powers, the form a message passing layer realises. Equal to
 * snn_poly_layer because mixed lower-upper products vanish.
 */
inline Matrix snn_poly_via_adjacencies(const Matrix& down, const Matrix& up, const Matrix& h,
                                       const std::vector<Matrix>& w_r,
                                       Activation act = Activation::relu)
{
    Matrix z = h * w_r.at(0);
    Matrix down_power = Matrix::Identity(down.rows(), down.cols());
    Matrix up_power = Matrix::Identity(up.rows(), up.cols());
    for (std::size_t r = 1; r < w_r.size(); ++r) {
        down_power = down_power * down;
        up_power = up_power * up;
        z += (down_power + up_power) * h * w_r[r];
    }
    return activate(std::move(z), act);
}

// ------------------------------------------------------------------
// Orientation-aware edge-flow layer
// ------------------------------------------------------------------

/** Lower/upper edge adjacencies with the diagonal removed. */
struct FlowOperators {
    Matrix down;  // off-diagonal of B_1^T B_1
    Matrix up;    // off-diagonal of B_2 B_2^T
};

inline FlowOperators flow_operators(const Boundaries& b, bool use_orientation)
{
    const int s1 = b.top() >= 1 ? b.sizes[1] : 0;
    FlowOperators ops;
    ops.down = Matrix::Zero(s1, s1);
    ops.up = Matrix::Zero(s1, s1);
    if (b.top() >= 1) {
        ops.down = b.B[1].transpose() * b.B[1];
        ops.down.diagonal().setZero();
    }
    if (b.top() >= 2) {
        ops.up = b.B[2] * b.B[2].transpose();
        ops.up.diagonal().setZero();
    }
    if (!use_orientation) {
        ops.down = ops.down.cwiseAbs();
        ops.up = ops.up.cwiseAbs();
    }
    return ops;
}

struct FlowLayerParams {
    Matrix w_self;   // W_0
    Matrix w_down;   // W_1
    Matrix w_up;     // W_2
};

/**
 * Edge-feature layer act(H W_0 + A_down H W_1 + A_up H W_2) where the
 * adjacency entries carry the relative orientations when use_orientation is
 * set. Dropping the upper sum gives the line-graph variant.
 */
inline Matrix flow_layer_ops(const FlowOperators& ops, const Matrix& h,
                             const FlowLayerParams& params, bool use_upper, Activation act)
{
    Matrix z = h * params.w_self + ops.down * h * params.w_down;
    if (use_upper)
        z += ops.up * h * params.w_up;
    return activate(std::move(z), act);
}

inline Matrix flow_layer(const SimplicialComplex& k, const Matrix& h,
                         const FlowLayerParams& params, bool use_orientation,
                         Activation act, bool use_upper = true)
{
    return flow_layer_ops(flow_operators(boundaries_of(k), use_orientation), h, params,
                          use_upper, act);
}

// ------------------------------------------------------------------
// Small dense blocks and readout
// ------------------------------------------------------------------

struct Dense {
    Matrix w;
    Eigen::RowVectorXd bias;
    Activation act = Activation::identity;

    Matrix apply(const Matrix& x) const
    {
        Matrix y = x * w;
        if (bias.size())
            y.rowwise() += bias;
        return activate(std::move(y), act);
    }
};

struct Mlp {
    std::vector<Dense> layers;

    Matrix apply(Matrix x) const
    {
        for (const Dense& d : layers)
            x = d.apply(x);
        return x;
    }
};

inline Dense make_dense(Rng& rng, int in, int out, Activation act, bool with_bias = true)
{
    Dense d;
    d.w = glorot_matrix(rng, in, out);
    if (with_bias)
        d.bias = Eigen::RowVectorXd::Zero(out);
    d.act = act;
    return d;
}

enum class ReadoutMode { sum, mean };

struct ReadoutSpec {
    ReadoutMode mode = ReadoutMode::sum;
    bool invariant_abs = false;
    std::vector<Dense> per_dim;  // optional projection per dimension
    Mlp head;                    // optional final transform
};

/**
 * Complex-level readout: per-dimension aggregation of the simplex features
 * (optionally through |.| first, which makes the result orientation
 * invariant), a per-dimension projection, a sum across dimensions and a
 * final head. Empty dimensions contribute zero.
 */
inline Vector readout(const FeatureStack& h, const ReadoutSpec& spec)
{
    Matrix pooled;
    bool first = true;
    for (int n = 0; n < h.dims(); ++n) {
        if (h.H[n].rows() == 0)
            continue;  // empty dimension contributes zero
        Matrix level = spec.invariant_abs ? h.H[n].cwiseAbs() : h.H[n];
        Matrix agg;
        if (spec.mode == ReadoutMode::sum)
            agg = level.colwise().sum();
        else
            agg = level.colwise().mean();
        if (n < static_cast<int>(spec.per_dim.size()))
            agg = spec.per_dim[n].apply(agg);
        if (first) {
            pooled = agg;
            first = false;
        } else {
            if (agg.cols() != pooled.cols())
                throw std::invalid_argument("readout: projection widths disagree");
            pooled += agg;
        }
    }
    if (first)
        return Vector();
    Matrix out = spec.head.layers.empty() ? pooled : spec.head.apply(pooled);
    return out.row(0).transpose();
}

// ------------------------------------------------------------------
// Feature initialisation for lifted complexes
// ------------------------------------------------------------------

enum class LiftFeatureMode { sum, mean };

/**
 * Vertex features are given; every higher simplex carries the sum (or mean)
 * of its constituent vertex features.
 */
inline FeatureStack lifted_features(const SimplicialComplex& k, const Matrix& vertex_features,
                                    LiftFeatureMode mode = LiftFeatureMode::sum)
{
    if (vertex_features.rows() != k.size(0))
        throw std::invalid_argument("lifted_features: vertex count mismatch");
    FeatureStack h;
    h.H.resize(k.top_dimension() + 1);
    h.H[0] = vertex_features;
    for (int d = 1; d <= k.top_dimension(); ++d) {
        h.H[d] = Matrix::Zero(k.size(d), vertex_features.cols());
        for (int i = 0; i < k.size(d); ++i) {
            for (int v : k.simplices(d)[i])
                h.H[d].row(i) += vertex_features.row(v);
            if (mode == LiftFeatureMode::mean)
                h.H[d].row(i) /= static_cast<double>(d + 1);
        }
    }
    return h;
}

}  // namespace scnet
