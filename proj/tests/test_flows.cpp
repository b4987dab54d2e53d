#include <catch2/catch_amalgamated.hpp>

#include "scnet/flows.hpp"
#include "scnet/train.hpp"
#include "test_util.hpp"

using namespace scnet;

namespace {

const FlowDataset& desk_dataset()
{
    static FlowDataset ds = [] {
        FlowDatasetConfig cfg;
        cfg.n_points = 300;
        cfg.n_train = 40;
        cfg.n_test = 16;
        cfg.seed = 20240901;
        return generate_flow_dataset(cfg);
    }();
    return ds;
}

/** Hand-built chain complex running through three corners of the square. */
PlanarComplex path_complex()
{
    PlanarComplex pc;
    pc.points = {{0.1, 0.9}, {0.1, 0.5}, {0.1, 0.1}, {0.5, 0.1}, {0.9, 0.1}};
    pc.complex = build_complex({{{0, 1}, {1, 2}, {2, 3}, {3, 4}}});
    return pc;
}

}  // namespace

TEST_CASE("triangulating the unit-square corners")
{
    auto tris = detail::bowyer_watson({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    REQUIRE(tris.size() == 2);
    std::vector<std::vector<int>> tuples;
    for (const auto& t : tris)
        tuples.push_back({t[0], t[1], t[2]});
    SimplicialComplex k = build_complex({tuples});
    CHECK(k.size(0) == 4);
    CHECK(k.size(1) == 5);
    CHECK(k.size(2) == 2);
}

TEST_CASE("triangulations are Delaunay-empty on random points")
{
    Rng rng(8080);
    std::vector<Point2> pts(40);
    for (Point2& p : pts)
        p = {rng.uniform(), rng.uniform()};
    auto tris = detail::bowyer_watson(pts);
    REQUIRE(!tris.empty());
    for (const auto& t : tris)
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (q == static_cast<std::size_t>(t[0]) || q == static_cast<std::size_t>(t[1]) ||
                q == static_cast<std::size_t>(t[2]))
                continue;
            // counter-clockwise order before the predicate
            Point2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
            if (detail::orient2d(a, b, c) < 0)
                std::swap(b, c);
            REQUIRE(detail::incircle(a, b, c, pts[q]) <= 1e-9);
        }
}

TEST_CASE("two holes give the expected topology")
{
    const PlanarComplex& pc = desk_dataset().complex;
    CHECK(pc.euler_characteristic() == -1);
    CHECK(harmonic_dimension(pc.complex, 1e-8) == 2);

    // a hole-free triangulated disc is simply connected
    PlanarComplex disc = generate_complex(120, {}, 7);
    CHECK(disc.euler_characteristic() == 1);
    CHECK(harmonic_dimension(disc.complex, 1e-8) == 0);

    CHECK_THROWS_AS(generate_complex(10, {}, 1), std::invalid_argument);
}

TEST_CASE("generated complexes satisfy the chain conditions")
{
    const SimplicialComplex& k = desk_dataset().complex.complex;
    IntMatrix b1 = k.boundary_matrix(1).dense();
    IntMatrix b2 = k.boundary_matrix(2).dense();
    CHECK((b1 * b2).isZero());
}

TEST_CASE("greedy walks on a chain produce unit flows")
{
    PlanarComplex pc = path_complex();
    auto samples = generate_trajectories(pc, 3, 0, 1.0, 99);
    for (const FlowSample& s : samples) {
        REQUIRE(s.flow.size() == 4);
        for (int e = 0; e < 4; ++e)
            CHECK(s.flow(e) == 1.0);
    }
}

TEST_CASE("trajectories visit their class checkpoints and have path boundaries")
{
    const FlowDataset& ds = desk_dataset();
    const SimplicialComplex& k = ds.complex.complex;
    IntMatrix b1 = k.boundary_matrix(1).dense();

    auto corner_vertices = [&](double xmin, double ymin) {
        std::set<int> verts;
        for (std::size_t v = 0; v < ds.complex.points.size(); ++v)
            if (ds.complex.points[v].x >= xmin && ds.complex.points[v].x <= xmin + 0.2 &&
                ds.complex.points[v].y >= ymin && ds.complex.points[v].y <= ymin + 0.2)
                verts.insert(static_cast<int>(v));
        return verts;
    };
    std::set<int> bottom_left = corner_vertices(0.0, 0.0);
    std::set<int> top_right = corner_vertices(0.8, 0.8);

    for (const FlowSample& s : ds.train) {
        // the boundary of a simple path is its two endpoints
        Matrix boundary = b1.cast<double>() * s.flow;
        int nonzero = 0;
        for (Eigen::Index i = 0; i < boundary.rows(); ++i)
            if (boundary(i, 0) != 0.0) {
                ++nonzero;
                REQUIRE(std::abs(boundary(i, 0)) == 1.0);
            }
        REQUIRE(nonzero == 2);

        // class determines which checkpoint corner the walk enters
        const std::set<int>& corner = s.label == 0 ? bottom_left : top_right;
        bool touches = false;
        for (int e = 0; e < k.size(1) && !touches; ++e)
            if (s.flow(e) != 0.0) {
                const auto& tuple = k.simplices(1)[e];
                touches = corner.count(tuple[0]) || corner.count(tuple[1]);
            }
        REQUIRE(touches);
    }
}

TEST_CASE("orientation randomisation bookkeeping")
{
    const FlowDataset& ds = desk_dataset();

    FlowDataset r1 = randomize_test_orientations(ds, 555);
    FlowDataset r2 = randomize_test_orientations(ds, 555);
    FlowDataset r3 = randomize_test_orientations(ds, 556);
    for (std::size_t i = 0; i < ds.test.size(); ++i) {
        CHECK(r1.test[i].flip == r2.test[i].flip);
        CHECK(r1.test[i].flow == r2.test[i].flow);
    }
    bool any_diff = false;
    for (std::size_t i = 0; i < ds.test.size(); ++i)
        any_diff = any_diff || r1.test[i].flip != r3.test[i].flip;
    CHECK(any_diff);

    // train split is untouched, flips are involutions
    for (std::size_t i = 0; i < ds.train.size(); ++i)
        CHECK(r1.train[i].flow == ds.train[i].flow);
    const FlowSample& s = r1.test[0];
    FlowSample back = flip_sample(s, s.flip.cwiseProduct(ds.test[0].flip));
    CHECK((back.flow - ds.test[0].flow).cwiseAbs().maxCoeff() == 0.0);

    // the all-ones flip changes nothing
    FlowSample same = flip_sample(ds.test[0], Vector::Ones(ds.test[0].flow.size()));
    CHECK(same.flow == ds.test[0].flow);
    CHECK(same.flip == ds.test[0].flip);
}

TEST_CASE("invariant models ignore test orientations, relu models do not")
{
    const FlowDataset& ds = desk_dataset();
    FlowDataset randomized = randomize_test_orientations(ds, 616);
    Rng rng(31415);

    for (const char* name : {"mpsn-tanh", "mpsn-id", "mpsn-l0inv", "gnn-l0inv"}) {
        FlowModelConfig cfg = flow_model_config(name);
        cfg.layers = 2;
        cfg.hidden = 8;
        Rng init = rng.spawn();
        FlowModelParams params = make_flow_params(init, cfg);
        SparseFlowOps canonical = sparse_flow_ops(ds.complex.complex, cfg.oriented);
        for (std::size_t i = 0; i < ds.test.size(); ++i) {
            Vector base = flow_model_logits(canonical, ds.test[i].flow, params, cfg);
            SparseFlowOps flipped =
                sparse_flow_ops(ds.complex.complex, cfg.oriented, &randomized.test[i].flip);
            Vector moved = flow_model_logits(flipped, randomized.test[i].flow, params, cfg);
            REQUIRE((base - moved).cwiseAbs().maxCoeff() < 1e-9);
        }
        CHECK(flow_accuracy(ds.complex.complex, ds.test, params, cfg) ==
              flow_accuracy(ds.complex.complex, randomized.test, params, cfg));
    }

    FlowModelConfig relu = flow_model_config("mpsn-relu");
    relu.layers = 2;
    relu.hidden = 8;
    Rng init = rng.spawn();
    FlowModelParams params = make_flow_params(init, relu);
    SparseFlowOps canonical = sparse_flow_ops(ds.complex.complex, true);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < ds.test.size(); ++i) {
        Vector base = flow_model_logits(canonical, ds.test[i].flow, params, relu);
        SparseFlowOps flipped =
            sparse_flow_ops(ds.complex.complex, true, &randomized.test[i].flip);
        Vector moved = flow_model_logits(flipped, randomized.test[i].flow, params, relu);
        max_dev = std::max(max_dev, (base - moved).cwiseAbs().maxCoeff());
    }
    CHECK(max_dev > 1e-3);
}

TEST_CASE("training fits a separable toy set")
{
    PlanarComplex pc = path_complex();
    FlowDataset toy;
    toy.complex = pc;
    FlowSample a, b;
    a.label = 0;
    a.flow = Vector::Zero(4);
    a.flow(0) = 1.0;
    a.flip = Vector::Ones(4);
    b.label = 1;
    b.flow = Vector::Ones(4);
    b.flip = Vector::Ones(4);
    toy.train = {a, b};
    toy.test = {a, b};

    FlowModelConfig cfg = flow_model_config("mpsn-tanh");
    cfg.layers = 2;
    cfg.hidden = 8;
    FlowTrainConfig tc;
    tc.epochs = 50;
    tc.learning_rate = 0.01;
    tc.seed = 777;
    FlowTrainResult res = train_flow_model(toy, cfg, tc);
    CHECK(res.final_train_acc == 1.0);
    CHECK(res.history.size() == 50);

    // deterministic given the seed
    FlowTrainResult res2 = train_flow_model(toy, cfg, tc);
    CHECK(res2.final_train_acc == res.final_train_acc);
    CHECK(res2.history.back().loss == res.history.back().loss);

    std::string csv = metrics_csv(res.history);
    CHECK(csv.rfind("epoch,train_acc,test_acc,loss\n", 0) == 0);
}

TEST_CASE("batched training forward agrees with the per-sample forward")
{
    const FlowDataset& ds = desk_dataset();
    Rng rng(2718);
    FlowModelConfig cfg = flow_model_config("mpsn-tanh");
    cfg.layers = 2;
    cfg.hidden = 8;
    FlowModelParams params = make_flow_params(rng, cfg);
    SparseFlowOps ops = sparse_flow_ops(ds.complex.complex, cfg.oriented);

    const int bs = 5;
    Matrix xcat(ds.complex.complex.size(1), bs);
    for (int i = 0; i < bs; ++i)
        xcat.col(i) = ds.train[i].flow;

    Tape t;
    detail::FlowParamNodes nodes = detail::push_params(t, params);
    Tape::NodeId logits = detail::flow_batch_logits(t, ops, xcat, bs, nodes, cfg);
    const Matrix& batched = t.value(logits);
    for (int i = 0; i < bs; ++i) {
        Vector single = flow_model_logits(ops, ds.train[i].flow, params, cfg);
        REQUIRE((batched.row(i).transpose() - single).cwiseAbs().maxCoeff() < 1e-12);
    }
}
