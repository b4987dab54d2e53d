#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "scnet/autodiff.hpp"
#include "test_util.hpp"

using namespace scnet;

namespace {

using BuildLoss = std::function<Tape::NodeId(Tape&, const std::vector<Tape::NodeId>&)>;

/**
 * Central finite-difference oracle: perturbs every entry of every parameter
 * by ±h and compares the quotient against the tape gradient.
 */
void check_gradients(std::vector<Matrix> params, const BuildLoss& build, double h = 1e-5,
                     double tol = 1e-5)
{
    auto eval = [&](const std::vector<Matrix>& p) {
        Tape t;
        std::vector<Tape::NodeId> ids;
        for (const Matrix& m : p)
            ids.push_back(t.parameter(m));
        return t.scalar_value(build(t, ids));
    };

    Tape t;
    std::vector<Tape::NodeId> ids;
    for (const Matrix& m : params)
        ids.push_back(t.parameter(m));
    Tape::NodeId loss = build(t, ids);
    t.backward(loss);

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const Matrix analytic = t.grad(ids[pi]);
        for (Eigen::Index i = 0; i < params[pi].rows(); ++i) {
            for (Eigen::Index j = 0; j < params[pi].cols(); ++j) {
                std::vector<Matrix> plus = params, minus = params;
                plus[pi](i, j) += h;
                minus[pi](i, j) -= h;
                const double fd = (eval(plus) - eval(minus)) / (2.0 * h);
                const double err = std::abs(analytic(i, j) - fd);
                REQUIRE(err <= tol * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

/** Random matrix with entries bounded away from zero (for relu/abs kinks). */
Matrix random_away_from_zero(Rng& rng, int rows, int cols, double margin = 1e-3)
{
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double v = 0.0;
            while (std::abs(v) < margin)
                v = rng.uniform(-1.0, 1.0);
            m(i, j) = v;
        }
    return m;
}

}  // namespace

TEST_CASE("linear-map gradients are exact")
{
    Rng rng(7);
    Matrix x = random_matrix(rng, 4, 3);

    // d/dx sum(x) is all ones
    {
        Tape t;
        auto id = t.parameter(x);
        t.backward(t.sum(id));
        CHECK(t.grad(id) == Matrix::Ones(4, 3));
    }

    // d/dW of sum(XW) is X^T * ones
    {
        Matrix w = random_matrix(rng, 3, 2);
        Tape t;
        auto xid = t.constant(x);
        auto wid = t.parameter(w);
        t.backward(t.sum(t.matmul(xid, wid)));
        Matrix expected = x.transpose() * Matrix::Ones(4, 2);
        CHECK((t.grad(wid) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("every supported op passes the finite-difference oracle")
{
    Rng rng(1001);

    SECTION("matmul + add + scale")
    {
        check_gradients({random_matrix(rng, 3, 4), random_matrix(rng, 4, 2)},
                        [](Tape& t, const auto& p) {
                            auto prod = t.matmul(p[0], p[1]);
                            return t.sum(t.add(t.scale(prod, 1.7), prod));
                        });
    }

    SECTION("tanh and mean")
    {
        check_gradients({random_matrix(rng, 3, 3)}, [](Tape& t, const auto& p) {
            return t.mean(t.tanh_act(p[0]));
        });
    }

    SECTION("relu away from the kink")
    {
        check_gradients({random_away_from_zero(rng, 4, 4)}, [](Tape& t, const auto& p) {
            return t.sum(t.relu(p[0]));
        });
    }

    SECTION("absolute value away from the kink")
    {
        check_gradients({random_away_from_zero(rng, 4, 3)}, [](Tape& t, const auto& p) {
            return t.sum(t.abs_act(p[0]));
        });
    }

    SECTION("concat_cols routes gradients to both sides")
    {
        check_gradients({random_matrix(rng, 3, 2), random_matrix(rng, 3, 4)},
                        [](Tape& t, const auto& p) {
                            return t.mean(t.tanh_act(t.concat_cols(p[0], p[1])));
                        });
    }

    SECTION("sparse product")
    {
        auto sp = std::make_shared<SpMat>(4, 4);
        sp->insert(0, 1) = 1.0;
        sp->insert(1, 0) = -1.0;
        sp->insert(2, 3) = 2.0;
        sp->insert(3, 3) = 0.5;
        sp->makeCompressed();
        check_gradients({random_matrix(rng, 4, 3)}, [sp](Tape& t, const auto& p) {
            return t.sum(t.tanh_act(t.spmm(sp, p[0])));
        });
    }

    SECTION("block matmul shares one weight across blocks")
    {
        check_gradients({random_matrix(rng, 3, 6), random_matrix(rng, 2, 2)},
                        [](Tape& t, const auto& p) {
                            return t.sum(t.tanh_act(t.block_matmul(p[0], p[1], 3)));
                        });
    }

    SECTION("unbatch and row-vector broadcast")
    {
        check_gradients({random_matrix(rng, 1, 6), random_matrix(rng, 1, 2)},
                        [](Tape& t, const auto& p) {
                            auto rows = t.unbatch(p[0], 3);
                            return t.mean(t.tanh_act(t.add_rowvec(rows, p[1])));
                        });
    }

    SECTION("cross entropy with softmax")
    {
        check_gradients({random_matrix(rng, 5, 3)}, [](Tape& t, const auto& p) {
            return t.cross_entropy_with_softmax(p[0], {0, 2, 1, 1, 0});
        });
    }
}

TEST_CASE("two-layer tanh network matches finite differences")
{
    Rng rng(2023);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix x = random_matrix(rng, 4, 3);
        check_gradients(
            {random_matrix(rng, 3, 5), random_matrix(rng, 5, 2)},
            [x](Tape& t, const auto& p) {
                auto h = t.tanh_act(t.matmul(t.constant(x), p[0]));
                auto logits = t.matmul(h, p[1]);
                return t.cross_entropy_with_softmax(logits, {0, 1, 0, 1});
            });
    }
}

TEST_CASE("unsupported shapes are rejected")
{
    Tape t;
    auto a = t.constant(Matrix::Zero(2, 3));
    auto b = t.constant(Matrix::Zero(2, 3));
    CHECK_THROWS_AS(t.matmul(a, b), std::invalid_argument);
    CHECK_THROWS_AS(t.add(a, t.constant(Matrix::Zero(3, 2))), std::invalid_argument);
    CHECK_THROWS_AS(t.backward(a), std::invalid_argument);
}

TEST_CASE("optimisers take deterministic steps")
{
    Rng rng(11);
    Matrix w0 = random_matrix(rng, 2, 2);

    auto loss_grad = [](const Matrix& w) {
        // f(w) = 0.5 * ||w||^2 has gradient w
        return w;
    };

    std::vector<Matrix> a{w0};
    GradientDescent gd(0.1);
    gd.step(a, {loss_grad(a[0])});
    CHECK((a[0] - (w0 - 0.1 * w0)).cwiseAbs().maxCoeff() < 1e-14);

    Adam adam1(0.05), adam2(0.05);
    std::vector<Matrix> c{w0}, d{w0};
    for (int i = 0; i < 5; ++i) {
        adam1.step(c, {loss_grad(c[0])});
        adam2.step(d, {loss_grad(d[0])});
    }
    CHECK(c[0] == d[0]);
    CHECK(c[0].norm() < w0.norm());
}
