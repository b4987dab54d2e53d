#include <catch2/catch_amalgamated.hpp>

#include <Eigen/SVD>

#include "scnet/numerics.hpp"
#include "test_util.hpp"

using namespace scnet;

namespace {

// independent oracle: rank by singular-value threshold
int svd_rank(const Matrix& a, double eps_rel = 1e-9)
{
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > eps_rel * s(0) * std::max(a.rows(), a.cols()))
            ++r;
    return r;
}

}  // namespace

TEST_CASE("rank with tolerance on pinned cases")
{
    CHECK(rank_with_tolerance(Matrix::Identity(3, 3)) == 3);

    Matrix proportional(2, 2);
    proportional << 1, 2, 2, 4;
    CHECK(rank_with_tolerance(proportional) == 1);

    CHECK(rank_with_tolerance(Matrix::Zero(4, 2)) == 0);
}

TEST_CASE("rank agrees with the SVD oracle on random matrices")
{
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a = random_matrix(rng, 5, 3);
        CHECK(rank_with_tolerance(a) == 3);
        CHECK(rank_with_tolerance(a) == svd_rank(a));

        // rank-deficient construction: outer products
        Matrix u = random_matrix(rng, 6, 2);
        Matrix v = random_matrix(rng, 2, 4);
        Matrix low = u * v;
        CHECK(rank_with_tolerance(low) == svd_rank(low));
        CHECK(rank_with_tolerance(low) == 2);
    }
}

TEST_CASE("rank is invariant under row and column permutations")
{
    Rng rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix u = random_matrix(rng, 5, 2);
        Matrix v = random_matrix(rng, 2, 6);
        Matrix a = u * v;
        const int r = rank_with_tolerance(a);

        auto rp = testutil::random_permutation(rng, static_cast<int>(a.rows()));
        auto cp = testutil::random_permutation(rng, static_cast<int>(a.cols()));
        Matrix b(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                b(rp[i], cp[j]) = a(i, j);
        REQUIRE(rank_with_tolerance(b) == r);
    }
}

TEST_CASE("vec and kron implement the usual conventions")
{
    Matrix a(2, 2);
    a << 1, 3,
         2, 4;  // entries chosen so vec = (1,2,3,4)
    Vector v = vec(a);
    REQUIRE(v.size() == 4);
    CHECK(v(0) == 1);
    CHECK(v(1) == 2);
    CHECK(v(2) == 3);
    CHECK(v(3) == 4);

    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    Matrix k = kron(Matrix::Identity(2, 2), swap);
    Matrix expected(4, 4);
    expected << 0, 1, 0, 0,
                1, 0, 0, 0,
                0, 0, 0, 1,
                0, 0, 1, 0;
    CHECK(k == expected);
}

TEST_CASE("Roth identity on random triples")
{
    Rng rng(99991);
    for (int trial = 0; trial < 30; ++trial) {
        Matrix m = random_matrix(rng, 3, 3);
        Matrix h = random_matrix(rng, 3, 3);
        Matrix w = random_matrix(rng, 3, 3);
        Vector lhs = vec(Matrix(m * h * w));
        Vector rhs = kron(w.transpose(), m) * vec(h);
        REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("seed derivation is deterministic and decorrelated")
{
    const std::uint64_t master = 42;
    CHECK(derive_seed(master, 0) == derive_seed(master, 0));
    CHECK(derive_seed(master, 0) != derive_seed(master, 1));
    Rng a(derive_seed(master, 0));
    Rng b(derive_seed(master, 0));
    for (int i = 0; i < 10; ++i)
        CHECK(a.next_u64() == b.next_u64());
}
