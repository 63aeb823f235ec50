#include "tildeq/autodiff.hpp"

#include "tildeq/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace tildeq {

Tape::NodeId Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

Tape::NodeId Tape::leaf(std::vector<double> value) {
    if (value.empty()) throw std::invalid_argument("tape leaf must carry at least one value");
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::NodeId Tape::leaf(const double* data, std::size_t n) {
    return leaf(std::vector<double>(data, data + n));
}

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": operand sizes differ (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}

} // namespace

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    const auto& va = value(a);
    const auto& vb = value(b);
    check_same_size(va.size(), vb.size(), "add");
    Node n;
    n.op = Op::Add;
    n.parents = {a, b};
    n.value.resize(va.size());
    kernels::add(va.data(), vb.data(), n.value.data(), va.size());
    return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
    const auto& va = value(a);
    const auto& vb = value(b);
    check_same_size(va.size(), vb.size(), "sub");
    Node n;
    n.op = Op::Sub;
    n.parents = {a, b};
    n.value.resize(va.size());
    kernels::sub(va.data(), vb.data(), n.value.data(), va.size());
    return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
    const auto& va = value(a);
    const auto& vb = value(b);
    check_same_size(va.size(), vb.size(), "mul");
    Node n;
    n.op = Op::Mul;
    n.parents = {a, b};
    n.value.resize(va.size());
    kernels::mul(va.data(), vb.data(), n.value.data(), va.size());
    return push(std::move(n));
}

Tape::NodeId Tape::matvec(NodeId m, std::size_t rows, std::size_t cols, NodeId x) {
    const auto& vm = value(m);
    const auto& vx = value(x);
    if (vm.size() != rows * cols)
        throw std::invalid_argument("matvec: matrix node size does not match rows*cols");
    check_same_size(vx.size(), cols, "matvec input");
    Node n;
    n.op = Op::MatVec;
    n.parents = {m, x};
    n.rows = rows;
    n.cols = cols;
    n.value.resize(rows);
    kernels::matvec(vm.data(), vx.data(), n.value.data(), rows, cols);
    return push(std::move(n));
}

Tape::NodeId Tape::sigmoid(NodeId x) {
    const auto& vx = value(x);
    Node n;
    n.op = Op::Sigmoid;
    n.parents = {x};
    n.value.resize(vx.size());
    for (std::size_t i = 0; i < vx.size(); ++i) n.value[i] = 1.0 / (1.0 + std::exp(-vx[i]));
    return push(std::move(n));
}

Tape::NodeId Tape::tanh(NodeId x) {
    const auto& vx = value(x);
    Node n;
    n.op = Op::Tanh;
    n.parents = {x};
    n.value.resize(vx.size());
    for (std::size_t i = 0; i < vx.size(); ++i) n.value[i] = std::tanh(vx[i]);
    return push(std::move(n));
}

Tape::NodeId Tape::concat(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat needs at least one part");
    Node n;
    n.op = Op::Concat;
    n.parents = parts;
    for (NodeId p : parts) {
        const auto& vp = value(p);
        n.value.insert(n.value.end(), vp.begin(), vp.end());
    }
    return push(std::move(n));
}

Tape::NodeId Tape::slice(NodeId x, std::size_t offset, std::size_t len) {
    const auto& vx = value(x);
    if (len == 0 || offset + len > vx.size())
        throw std::invalid_argument("slice out of range");
    Node n;
    n.op = Op::Slice;
    n.parents = {x};
    n.offset = offset;
    n.value.assign(vx.begin() + static_cast<std::ptrdiff_t>(offset),
                   vx.begin() + static_cast<std::ptrdiff_t>(offset + len));
    return push(std::move(n));
}

const std::vector<double>& Tape::value(NodeId id) const {
    if (id >= nodes_.size()) throw std::out_of_range("tape node id out of range");
    return nodes_[id].value;
}

std::vector<double>& Tape::adjoint(NodeId id) {
    auto& a = adjoints_[id];
    if (a.empty()) a.assign(nodes_[id].value.size(), 0.0);
    return a;
}

void Tape::backward(const std::vector<std::pair<NodeId, std::vector<double>>>& seeds) {
    if (swept_) throw std::logic_error("tape backward already ran");
    swept_ = true;
    adjoints_.assign(nodes_.size(), {});
    for (const auto& [root, seed] : seeds) {
        const auto& v = value(root);
        check_same_size(seed.size(), v.size(), "backward seed");
        auto& a = adjoint(root);
        kernels::add(a.data(), seed.data(), a.data(), a.size());
    }

    std::vector<double> scratch;
    for (std::size_t id = nodes_.size(); id-- > 0;) {
        const auto& g = adjoints_[id];
        if (g.empty()) continue; // node influenced no seeded root
        const Node& n = nodes_[id];
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Add: {
                auto& ga = adjoint(n.parents[0]);
                auto& gb = adjoint(n.parents[1]);
                kernels::add(ga.data(), g.data(), ga.data(), g.size());
                kernels::add(gb.data(), g.data(), gb.data(), g.size());
                break;
            }
            case Op::Sub: {
                auto& ga = adjoint(n.parents[0]);
                auto& gb = adjoint(n.parents[1]);
                kernels::add(ga.data(), g.data(), ga.data(), g.size());
                kernels::axpy(-1.0, g.data(), gb.data(), g.size());
                break;
            }
            case Op::Mul: {
                const auto& va = nodes_[n.parents[0]].value;
                const auto& vb = nodes_[n.parents[1]].value;
                auto& ga = adjoint(n.parents[0]);
                auto& gb = adjoint(n.parents[1]);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i] * vb[i];
                    gb[i] += g[i] * va[i];
                }
                break;
            }
            case Op::MatVec: {
                const auto& vm = nodes_[n.parents[0]].value;
                const auto& vx = nodes_[n.parents[1]].value;
                auto& gm = adjoint(n.parents[0]);
                auto& gx = adjoint(n.parents[1]);
                kernels::outer_acc(gm.data(), g.data(), vx.data(), n.rows, n.cols);
                scratch.resize(n.cols);
                kernels::matvec_t(vm.data(), g.data(), scratch.data(), n.rows, n.cols);
                kernels::add(gx.data(), scratch.data(), gx.data(), n.cols);
                break;
            }
            case Op::Sigmoid: {
                auto& gx = adjoint(n.parents[0]);
                for (std::size_t i = 0; i < g.size(); ++i)
                    gx[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
                break;
            }
            case Op::Tanh: {
                auto& gx = adjoint(n.parents[0]);
                for (std::size_t i = 0; i < g.size(); ++i)
                    gx[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
                break;
            }
            case Op::Concat: {
                std::size_t at = 0;
                for (NodeId p : n.parents) {
                    auto& gp = adjoint(p);
                    kernels::add(gp.data(), g.data() + at, gp.data(), gp.size());
                    at += gp.size();
                }
                break;
            }
            case Op::Slice: {
                auto& gx = adjoint(n.parents[0]);
                kernels::add(gx.data() + n.offset, g.data(), gx.data() + n.offset, g.size());
                break;
            }
        }
    }
}

const std::vector<double>& Tape::grad(NodeId id) const {
    if (!swept_) throw std::logic_error("tape backward has not run");
    if (id >= adjoints_.size()) throw std::out_of_range("tape node id out of range");
    if (adjoints_[id].empty()) {
        // node untouched by the sweep: its adjoint is a zero vector
        adjoints_[id].assign(nodes_[id].value.size(), 0.0);
    }
    return adjoints_[id];
}

} // namespace tildeq
