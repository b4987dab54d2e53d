#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "scnet/numerics.hpp"

namespace scnet {

using SpMat = Eigen::SparseMatrix<double>;

/**
 * Reverse-mode differentiation tape over dense matrices. A fresh tape is
 * built per forward pass; parameters live outside the tape and their
 * gradients are read back after backward(). Nodes are stored in creation
 * order, which is a topological order of the graph.
 *
 * Supported ops: matmul, sparse-constant matmul, per-block matmul, add,
 * scale, relu / tanh / identity / absolute value, sum, mean, column
 * concatenation, row-vector broadcast add, block reshaping and
 * cross-entropy with softmax.
 */
class Tape {
public:
    using NodeId = int;

    NodeId constant(Matrix v) { return push(Op::leaf, -1, -1, std::move(v), false); }

    NodeId parameter(const Matrix& v) { return push(Op::leaf, -1, -1, v, true); }

    NodeId matmul(NodeId a, NodeId b)
    {
        check_cols(value(a).cols(), value(b).rows(), "matmul");
        return push(Op::matmul, a, b, value(a) * value(b));
    }

    /** Product of a constant sparse operator with a node. */
    NodeId spmm(std::shared_ptr<const SpMat> sp, NodeId x)
    {
        check_cols(sp->cols(), value(x).rows(), "spmm");
        NodeId id = push(Op::spmm, x, -1, Matrix(*sp * value(x)));
        nodes_[id].sparse = std::move(sp);
        return id;
    }

    /**
     * Shared-weight product over column blocks: X has shape r x (d*B) and
     * each d-column block is multiplied by the same W (d x m), giving
     * r x (m*B). Used to run a batch of samples through one weight matrix.
     */
    NodeId block_matmul(NodeId x, NodeId w, int blocks)
    {
        const Matrix& xv = value(x);
        const Matrix& wv = value(w);
        if (blocks <= 0 || xv.cols() % blocks != 0 || xv.cols() / blocks != wv.rows())
            throw std::invalid_argument("block_matmul: shape mismatch");
        const Eigen::Index d = wv.rows(), m = wv.cols();
        Matrix out(xv.rows(), m * blocks);
        for (int b = 0; b < blocks; ++b)
            out.middleCols(b * m, m).noalias() = xv.middleCols(b * d, d) * wv;
        NodeId id = push(Op::block_matmul, x, w, std::move(out));
        nodes_[id].blocks = blocks;
        return id;
    }

    NodeId add(NodeId a, NodeId b)
    {
        if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
            throw std::invalid_argument("add: shape mismatch");
        return push(Op::add, a, b, value(a) + value(b));
    }

    NodeId scale(NodeId a, double c)
    {
        NodeId id = push(Op::scale, a, -1, c * value(a));
        nodes_[id].scalar = c;
        return id;
    }

    NodeId relu(NodeId a) { return push(Op::relu, a, -1, value(a).cwiseMax(0.0)); }

    NodeId tanh_act(NodeId a) { return push(Op::tanh_act, a, -1, tanh_odd(value(a))); }

    NodeId abs_act(NodeId a) { return push(Op::abs_act, a, -1, value(a).cwiseAbs()); }

    NodeId identity(NodeId a) { return push(Op::identity_act, a, -1, value(a)); }

    NodeId sum(NodeId a)
    {
        Matrix out(1, 1);
        out(0, 0) = value(a).sum();
        return push(Op::sum, a, -1, std::move(out));
    }

    NodeId mean(NodeId a)
    {
        Matrix out(1, 1);
        out(0, 0) = value(a).mean();
        return push(Op::mean, a, -1, std::move(out));
    }

    NodeId concat_cols(NodeId a, NodeId b)
    {
        if (value(a).rows() != value(b).rows())
            throw std::invalid_argument("concat_cols: row mismatch");
        Matrix out(value(a).rows(), value(a).cols() + value(b).cols());
        out << value(a), value(b);
        return push(Op::concat_cols, a, b, std::move(out));
    }

    /** Reshape a 1 x (c*B) row into a B x c matrix, one row per block. */
    NodeId unbatch(NodeId a, int blocks)
    {
        const Matrix& v = value(a);
        if (v.rows() != 1 || blocks <= 0 || v.cols() % blocks != 0)
            throw std::invalid_argument("unbatch: shape mismatch");
        const Eigen::Index c = v.cols() / blocks;
        Matrix out(blocks, c);
        for (int b = 0; b < blocks; ++b)
            out.row(b) = v.middleCols(b * c, c);
        NodeId id = push(Op::unbatch, a, -1, std::move(out));
        nodes_[id].blocks = blocks;
        return id;
    }

    /** Broadcast a 1 x c row vector over all rows of x. */
    NodeId add_rowvec(NodeId x, NodeId v)
    {
        if (value(v).rows() != 1 || value(v).cols() != value(x).cols())
            throw std::invalid_argument("add_rowvec: shape mismatch");
        Matrix out = value(x);
        out.rowwise() += value(v).row(0);
        return push(Op::add_rowvec, x, v, std::move(out));
    }

    /**
     * Mean cross-entropy with softmax over rows of logits (B x C), one
     * integer class label per row.
     */
    NodeId cross_entropy_with_softmax(NodeId logits, std::vector<int> labels)
    {
        const Matrix& z = value(logits);
        if (static_cast<Eigen::Index>(labels.size()) != z.rows())
            throw std::invalid_argument("cross_entropy_with_softmax: label count mismatch");
        double loss = 0.0;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double zmax = z.row(i).maxCoeff();
            const double lse = std::log((z.row(i).array() - zmax).exp().sum()) + zmax;
            loss += lse - z(i, labels[static_cast<std::size_t>(i)]);
        }
        Matrix out(1, 1);
        out(0, 0) = loss / static_cast<double>(z.rows());
        NodeId id = push(Op::softmax_xent, logits, -1, std::move(out));
        nodes_[id].labels = std::move(labels);
        return id;
    }

    const Matrix& value(NodeId id) const { return nodes_[check_id(id)].value; }

    double scalar_value(NodeId id) const
    {
        const Matrix& v = value(id);
        if (v.size() != 1)
            throw std::logic_error("scalar_value: node is not 1x1");
        return v(0, 0);
    }

    /** Gradient of the last backward() loss with respect to this node. */
    const Matrix& grad(NodeId id) const
    {
        const Node& n = nodes_[check_id(id)];
        if (n.grad.size() == 0)
            throw std::logic_error("grad: backward() has not reached this node");
        return n.grad;
    }

    /** Like grad(), but zero for nodes the loss does not depend on. */
    Matrix grad_or_zero(NodeId id) const
    {
        const Node& n = nodes_[check_id(id)];
        if (n.grad.size() == 0)
            return Matrix::Zero(n.value.rows(), n.value.cols());
        return n.grad;
    }

    /** Reverse sweep from a scalar loss node. */
    void backward(NodeId loss)
    {
        const Matrix& lv = value(loss);
        if (lv.size() != 1)
            throw std::invalid_argument("backward: loss must be scalar");
        for (Node& n : nodes_)
            n.grad.resize(0, 0);
        nodes_[loss].grad = Matrix::Ones(1, 1);

        for (NodeId id = loss; id >= 0; --id) {
            Node& n = nodes_[id];
            if (n.grad.size() == 0 || n.op == Op::leaf)
                continue;
            const Matrix& g = n.grad;
            switch (n.op) {
            case Op::matmul:
                accumulate(n.a, g * value(n.b).transpose());
                accumulate(n.b, value(n.a).transpose() * g);
                break;
            case Op::spmm:
                accumulate(n.a, n.sparse->transpose() * g);
                break;
            case Op::block_matmul: {
                const Matrix& x = value(n.a);
                const Matrix& w = value(n.b);
                const Eigen::Index d = w.rows(), m = w.cols();
                if (wants_grad(n.a)) {
                    Matrix gx = Matrix::Zero(x.rows(), x.cols());
                    for (int b = 0; b < n.blocks; ++b)
                        gx.middleCols(b * d, d).noalias() =
                            g.middleCols(b * m, m) * w.transpose();
                    accumulate(n.a, std::move(gx));
                }
                if (wants_grad(n.b)) {
                    Matrix gw = Matrix::Zero(d, m);
                    for (int b = 0; b < n.blocks; ++b)
                        gw.noalias() +=
                            x.middleCols(b * d, d).transpose() * g.middleCols(b * m, m);
                    accumulate(n.b, std::move(gw));
                }
                break;
            }
            case Op::add:
                accumulate(n.a, g);
                accumulate(n.b, g);
                break;
            case Op::scale:
                accumulate(n.a, n.scalar * g);
                break;
            case Op::relu: {
                // subgradient 0 at exactly 0
                const Matrix& x = value(n.a);
                accumulate(n.a, (x.array() > 0.0).cast<double>().matrix().cwiseProduct(g));
                break;
            }
            case Op::tanh_act:
                accumulate(n.a,
                           ((1.0 - n.value.array().square()) * g.array()).matrix());
                break;
            case Op::abs_act: {
                const Matrix& x = value(n.a);
                accumulate(n.a, x.array().sign().matrix().cwiseProduct(g));
                break;
            }
            case Op::identity_act:
                accumulate(n.a, g);
                break;
            case Op::sum:
                accumulate(n.a, Matrix::Constant(value(n.a).rows(), value(n.a).cols(),
                                                 g(0, 0)));
                break;
            case Op::mean:
                accumulate(n.a, Matrix::Constant(value(n.a).rows(), value(n.a).cols(),
                                                 g(0, 0) / value(n.a).size()));
                break;
            case Op::concat_cols:
                accumulate(n.a, g.leftCols(value(n.a).cols()));
                accumulate(n.b, g.rightCols(value(n.b).cols()));
                break;
            case Op::unbatch: {
                const Eigen::Index c = n.value.cols();
                Matrix gx(1, c * n.blocks);
                for (int b = 0; b < n.blocks; ++b)
                    gx.middleCols(b * c, c) = g.row(b);
                accumulate(n.a, std::move(gx));
                break;
            }
            case Op::add_rowvec:
                accumulate(n.a, g);
                accumulate(n.b, g.colwise().sum());
                break;
            case Op::softmax_xent: {
                const Matrix& z = value(n.a);
                Matrix gz(z.rows(), z.cols());
                for (Eigen::Index i = 0; i < z.rows(); ++i) {
                    Eigen::ArrayXd row = z.row(i).array();
                    row -= row.maxCoeff();
                    Eigen::ArrayXd p = row.exp();
                    p /= p.sum();
                    gz.row(i) = p.matrix().transpose();
                    gz(i, n.labels[static_cast<std::size_t>(i)]) -= 1.0;
                }
                gz *= g(0, 0) / static_cast<double>(z.rows());
                accumulate(n.a, std::move(gz));
                break;
            }
            case Op::leaf:
                break;
            }
        }
    }

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op {
        leaf,
        matmul,
        spmm,
        block_matmul,
        add,
        scale,
        relu,
        tanh_act,
        abs_act,
        identity_act,
        sum,
        mean,
        concat_cols,
        unbatch,
        add_rowvec,
        softmax_xent,
    };

    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        double scalar = 0.0;
        int blocks = 0;
        bool requires_grad = false;
        std::shared_ptr<const SpMat> sparse;
        std::vector<int> labels;
        Matrix value;
        Matrix grad;
    };

    NodeId push(Op op, int a, int b, Matrix value, bool trainable = false)
    {
        Node n;
        n.op = op;
        n.a = a;
        n.b = b;
        n.value = std::move(value);
        n.requires_grad = trainable || (a >= 0 && nodes_[a].requires_grad) ||
                          (b >= 0 && nodes_[b].requires_grad);
        nodes_.push_back(std::move(n));
        return static_cast<NodeId>(nodes_.size()) - 1;
    }

    bool wants_grad(NodeId id) const { return nodes_[id].requires_grad; }

    template <typename Expr>
    void accumulate(NodeId id, Expr&& contribution)
    {
        if (id < 0 || !nodes_[id].requires_grad)
            return;
        Node& n = nodes_[id];
        if (n.grad.size() == 0)
            n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
        n.grad += contribution;
    }

    int check_id(NodeId id) const
    {
        if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
            throw std::out_of_range("Tape: bad node id");
        return id;
    }

    static void check_cols(Eigen::Index a, Eigen::Index b, const char* what)
    {
        if (a != b)
            throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }

    std::vector<Node> nodes_;
};

/** Plain gradient descent, kept around for determinism checks. */
class GradientDescent {
public:
    explicit GradientDescent(double lr) : lr_(lr) {}

    void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads)
    {
        for (std::size_t i = 0; i < params.size(); ++i)
            params[i] -= lr_ * grads[i];
    }

    void set_learning_rate(double lr) { lr_ = lr; }
    double learning_rate() const { return lr_; }

private:
    double lr_;
};

class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps)
    {
    }

    void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads)
    {
        if (m_.empty()) {
            for (const Matrix& p : params) {
                m_.push_back(Matrix::Zero(p.rows(), p.cols()));
                v_.push_back(Matrix::Zero(p.rows(), p.cols()));
            }
        }
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, t_);
        const double c2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
            params[i].array() -= lr_ * (m_[i].array() / c1) /
                                 ((v_[i].array() / c2).sqrt() + eps_);
        }
    }

    void set_learning_rate(double lr) { lr_ = lr; }
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    int t_ = 0;
    std::vector<Matrix> m_, v_;
};

}  // namespace scnet
