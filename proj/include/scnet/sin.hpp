#pragma once

#include <array>
#include <vector>

#include "scnet/layers.hpp"
#include "scnet/lifting.hpp"

namespace scnet {

/**
 * Isomorphism-network style message passing on complexes. Each dimension
 * runs a boundary branch MLP_B((1+eps_B) h + sum of face features) and an
 * upper branch MLP_U((1+eps_up) h + sum of pair messages M(h_neighbour ||
 * h_shared_coface)); the two branches are concatenated and passed through
 * an update perceptron. Sums are unsigned. Used untrained for the
 * distinguishability sweeps.
 */
struct SinDimParams {
    Mlp boundary_mlp;    // 2-layer perceptron
    Mlp upper_mlp;       // 2-layer perceptron
    Dense pair_message;  // dense + nonlinearity on (h_tau || h_shared)
    Dense update;        // dense + nonlinearity on the concatenated branches
};

struct SinLayerParams {
    std::vector<SinDimParams> dims;  // one entry per dimension the layer supports
    double eps_boundary = 0.0;
    double eps_upper = 0.0;
};

inline FeatureStack sin_layer(const SimplicialComplex& k, const FeatureStack& h,
                              const SinLayerParams& params)
{
    const int p = k.top_dimension();
    if (h.dims() < p + 1 || static_cast<int>(params.dims.size()) < p + 1)
        throw std::invalid_argument("sin_layer: dimension mismatch");
    FeatureStack out;
    out.H.resize(p + 1);
    for (int n = 0; n <= p; ++n) {
        const SinDimParams& dp = params.dims[n];
        const Matrix& hn = h.H[n];

        Matrix boundary_in = (1.0 + params.eps_boundary) * hn;
        if (n >= 1) {
            Matrix unsigned_b = k.boundary_matrix(n).dense_unsigned().cast<double>();
            boundary_in += unsigned_b.transpose() * h.H[n - 1];
        }
        Matrix branch_b = dp.boundary_mlp.apply(boundary_in);

        Matrix upper_in = (1.0 + params.eps_upper) * hn;
        if (n + 1 <= p) {
            // pair messages (neighbour feature || shared coface feature)
            std::vector<std::array<int, 3>> pairs;  // (owner, neighbour, shared)
            for (int i = 0; i < k.size(n); ++i)
                for (const Neighbour& nb : k.adjacency({n, i}, AdjacencyKind::upper))
                    pairs.push_back({i, nb.simplex.index, nb.shared->index});
            Matrix pair_in(static_cast<Eigen::Index>(pairs.size()),
                           hn.cols() + h.H[n + 1].cols());
            for (std::size_t r = 0; r < pairs.size(); ++r)
                pair_in.row(static_cast<Eigen::Index>(r))
                    << hn.row(pairs[r][1]), h.H[n + 1].row(pairs[r][2]);
            if (!pairs.empty()) {
                Matrix messages = dp.pair_message.apply(pair_in);
                for (std::size_t r = 0; r < pairs.size(); ++r)
                    upper_in.row(pairs[r][0]) += messages.row(static_cast<Eigen::Index>(r));
            }
        }
        Matrix branch_u = dp.upper_mlp.apply(upper_in);

        Matrix both(branch_b.rows(), branch_b.cols() + branch_u.cols());
        both << branch_b, branch_u;
        out.H[n] = dp.update.apply(both);
    }
    return out;
}

struct SinModel {
    std::vector<SinLayerParams> layers;
    std::vector<Dense> readout_proj;  // one per dimension
    Dense readout_head;
    int width = 16;
};

/**
 * Untrained model with the standard widths: hidden size 16 everywhere, the
 * per-dimension readout projections doubled to 32, ELU nonlinearities.
 * input_dims[n] is the feature width of dimension n at the input.
 */
inline SinModel make_sin_model(Rng& rng, const std::vector<int>& input_dims, int n_layers = 5,
                               int width = 16)
{
    SinModel model;
    model.width = width;
    const int max_dims = static_cast<int>(input_dims.size());
    std::vector<int> cur = input_dims;
    for (int l = 0; l < n_layers; ++l) {
        SinLayerParams layer;
        for (int n = 0; n < max_dims; ++n) {
            SinDimParams dp;
            dp.boundary_mlp.layers = {make_dense(rng, cur[n], width, Activation::elu),
                                      make_dense(rng, width, width, Activation::elu)};
            dp.upper_mlp.layers = {make_dense(rng, cur[n], width, Activation::elu),
                                   make_dense(rng, width, width, Activation::elu)};
            const int pair_in = cur[n] + (n + 1 < max_dims ? cur[n + 1] : cur[n]);
            dp.pair_message = make_dense(rng, pair_in, cur[n], Activation::elu);
            dp.update = make_dense(rng, 2 * width, width, Activation::elu);
            layer.dims.push_back(std::move(dp));
        }
        model.layers.push_back(std::move(layer));
        cur.assign(max_dims, width);
    }
    for (int n = 0; n < max_dims; ++n)
        model.readout_proj.push_back(make_dense(rng, width, 2 * width, Activation::elu));
    model.readout_head = make_dense(rng, 2 * width, width, Activation::elu);
    return model;
}

/**
 * Complex embedding: run the message passing layers, then sum features per
 * dimension, project, sum across the dimensions present in the complex and
 * apply the head.
 */
inline Vector sin_embedding(const SimplicialComplex& k, const FeatureStack& input,
                            const SinModel& model)
{
    FeatureStack h = input;
    for (const SinLayerParams& layer : model.layers)
        h = sin_layer(k, h, layer);
    Matrix pooled = Matrix::Zero(1, 2 * model.width);
    for (int n = 0; n <= k.top_dimension(); ++n) {
        if (h.H[n].rows() == 0)
            continue;
        Matrix agg = h.H[n].colwise().sum();
        pooled += model.readout_proj[n].apply(agg);
    }
    return model.readout_head.apply(pooled).row(0).transpose();
}

/** Embedding of a lifted graph with unit vertex features. */
inline Vector sin_embed_lift(const SimplicialComplex& lift, const SinModel& model,
                             LiftFeatureMode mode = LiftFeatureMode::sum)
{
    FeatureStack h = lifted_features(lift, Matrix::Ones(lift.size(0), 1), mode);
    return sin_embedding(lift, h, model);
}

}  // namespace scnet
