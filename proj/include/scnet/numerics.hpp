#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace scnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Column-by-column vectorization: stacks the columns of A into one vector. */
inline Vector vec(const Matrix& a)
{
    return Eigen::Map<const Vector>(a.data(), a.size());
}

/** Kronecker product A ⊗ B. */
inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/**
 * Vectorised tanh evaluated on |x| with the sign applied afterwards, which
 * makes it exactly odd in floating point (the orientation-equivariance
 * checks rely on that). Matches std::tanh to ~1e-9 relative; scalar libm
 * tanh on doubles is an order of magnitude slower.
 */
inline Matrix tanh_odd(const Matrix& x)
{
    Eigen::ArrayXXd a = (2.0 * x.array().abs()).min(44.0).exp();
    return (((a - 1.0) / (a + 1.0)) * x.array().sign()).matrix();
}

constexpr double kDefaultRankEps = 1e-9;

/**
 * Numerical rank by Gaussian elimination with partial pivoting, performed
 * in place on the given buffer. A pivot counts toward the rank iff its
 * magnitude exceeds eps_rel times the largest absolute entry of the
 * original matrix.
 */
inline int rank_in_place(Eigen::Ref<Matrix> m, double eps_rel = kDefaultRankEps)
{
    const Eigen::Index rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0)
        return 0;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0;
    const double threshold = eps_rel * scale;

    int rank = 0;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
        // pick the largest remaining entry in this column
        Eigen::Index pivot = row;
        double best = std::abs(m(row, col));
        for (Eigen::Index r = row + 1; r < rows; ++r) {
            const double v = std::abs(m(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best <= threshold)
            continue;
        if (pivot != row)
            m.row(pivot).swap(m.row(row));
        for (Eigen::Index r = row + 1; r < rows; ++r) {
            const double f = m(r, col) / m(row, col);
            if (f != 0.0)
                m.row(r).tail(cols - col) -= f * m.row(row).tail(cols - col);
        }
        ++rank;
        ++row;
    }
    return rank;
}

inline int rank_with_tolerance(const Matrix& a, double eps_rel = kDefaultRankEps)
{
    if (a.size() == 0)
        return 0;
    Matrix work = a;
    return rank_in_place(work, eps_rel);
}

// ------------------------------------------------------------------
// Deterministic RNG. Seeds for sub-tasks are derived from one master
// seed with a splitmix64 expansion so independent units of work get
// independent, reproducible streams.
// ------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/** Derive the index-th child seed from a master seed. */
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t s = master ^ (0x2545f4914f6cdd1dULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed)
    {
        // warm up so nearby seeds decorrelate
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /** Uniform double in [0, 1). Uses the top 53 bits; identical on any platform. */
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /** Uniform double in [lo, hi). */
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /** Uniform integer in [0, n). */
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    int uniform_int(int lo, int hi)  // inclusive bounds
    {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /** Standard normal via Box-Muller. */
    double normal()
    {
        double u1 = 0.0;
        while (u1 == 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Rng spawn() { return Rng(next_u64()); }

private:
    std::uint64_t state_;
};

/** Matrix with i.i.d. entries uniform on (-1, 1). */
inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

/** Glorot-style initialisation for trainable weights. */
inline Matrix glorot_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = rng.uniform(-s, s);
    return m;
}

}  // namespace scnet
