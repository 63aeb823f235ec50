#pragma once

// Minimal reverse-mode tape over vector values. Nodes are appended during
// the forward pass (parents always precede children), and one backward
// sweep visits them in strict reverse order, accumulating adjoints.

#include <cstddef>
#include <utility>
#include <vector>

namespace tildeq {

class Tape {
public:
    using NodeId = std::size_t;

    // Value-carrying input node; parameters and constants both enter here.
    NodeId leaf(std::vector<double> value);
    NodeId leaf(const double* data, std::size_t n);

    NodeId add(NodeId a, NodeId b); // elementwise, equal sizes
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b); // Hadamard product
    // y = M x with M the flat row-major value of node m (rows*cols), x of size cols
    NodeId matvec(NodeId m, std::size_t rows, std::size_t cols, NodeId x);
    NodeId sigmoid(NodeId x);
    NodeId tanh(NodeId x);
    NodeId concat(const std::vector<NodeId>& parts);
    NodeId slice(NodeId x, std::size_t offset, std::size_t len);

    const std::vector<double>& value(NodeId id) const;
    std::size_t size() const { return nodes_.size(); }

    // Seeds the given roots with upstream gradients and sweeps once.
    // Callable exactly once per tape.
    void backward(const std::vector<std::pair<NodeId, std::vector<double>>>& seeds);

    // Adjoint of a node after backward(); zero vector when the node did not
    // influence any seeded root.
    const std::vector<double>& grad(NodeId id) const;

private:
    enum class Op { Leaf, Add, Sub, Mul, MatVec, Sigmoid, Tanh, Concat, Slice };

    struct Node {
        Op op;
        std::vector<NodeId> parents;
        std::vector<double> value;
        std::size_t rows = 0; // matvec
        std::size_t cols = 0; // matvec
        std::size_t offset = 0; // slice
    };

    NodeId push(Node node);
    std::vector<double>& adjoint(NodeId id);

    std::vector<Node> nodes_;
    mutable std::vector<std::vector<double>> adjoints_;
    bool swept_ = false;
};

} // namespace tildeq
