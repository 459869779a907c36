#include "graph.hpp"

#include <cmath>

namespace onenet::ag {

namespace {

void require_vector(const Node& n, const char* op) {
    check(n.cols == 1, std::string(op) + ": expected a column vector, got " +
                           std::to_string(n.rows) + "x" + std::to_string(n.cols));
}

}  // namespace

NodeId Graph::emplace(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::input(const Mat& v, std::string name) {
    Node n;
    n.op = Op::Input;
    n.rows = static_cast<int>(v.rows());
    n.cols = static_cast<int>(v.cols());
    n.value = v;
    n.has_value = true;
    n.name = std::move(name);
    return emplace(std::move(n));
}

NodeId Graph::input(int rows, int cols, std::string name) {
    Node n;
    n.op = Op::Input;
    n.rows = rows;
    n.cols = cols;
    n.name = std::move(name);
    return emplace(std::move(n));
}

NodeId Graph::param(const Mat& v, std::string name) {
    Node n;
    n.op = Op::Param;
    n.rows = static_cast<int>(v.rows());
    n.cols = static_cast<int>(v.cols());
    n.value = v;
    n.has_value = true;
    n.name = std::move(name);
    return emplace(std::move(n));
}

NodeId Graph::matvec(NodeId w, NodeId x) {
    const Node& a = nodes_[w];
    const Node& b = nodes_[x];
    require_vector(b, "matvec");
    check(a.cols == b.rows, "matvec: shape mismatch " + std::to_string(a.rows) +
                                "x" + std::to_string(a.cols) + " * " +
                                std::to_string(b.rows) + "x1" +
                                (a.name.empty() ? "" : " (" + a.name + ")"));
    Node n;
    n.op = Op::MatVec;
    n.rows = a.rows;
    n.inputs = {w, x};
    return emplace(std::move(n));
}

NodeId Graph::add(const std::vector<NodeId>& xs) {
    check(!xs.empty(), "add: no inputs");
    const Node& first = nodes_[xs[0]];
    for (NodeId id : xs) {
        check(nodes_[id].rows == first.rows && nodes_[id].cols == first.cols,
              "add: shape mismatch");
    }
    Node n;
    n.op = Op::Add;
    n.rows = first.rows;
    n.cols = first.cols;
    n.inputs = xs;
    return emplace(std::move(n));
}

NodeId Graph::concat(const std::vector<NodeId>& xs) {
    check(!xs.empty(), "concat: no inputs");
    int rows = 0;
    for (NodeId id : xs) {
        require_vector(nodes_[id], "concat");
        rows += nodes_[id].rows;
    }
    Node n;
    n.op = Op::Concat;
    n.rows = rows;
    n.inputs = xs;
    return emplace(std::move(n));
}

NodeId Graph::slice(NodeId x, int offset, int len) {
    const Node& a = nodes_[x];
    require_vector(a, "slice");
    check(offset >= 0 && len > 0 && offset + len <= a.rows, "slice: out of range");
    Node n;
    n.op = Op::Slice;
    n.rows = len;
    n.inputs = {x};
    n.i0 = offset;
    n.i1 = len;
    return emplace(std::move(n));
}

NodeId Graph::tanh(NodeId x) {
    Node n;
    n.op = Op::Tanh;
    n.rows = nodes_[x].rows;
    n.cols = nodes_[x].cols;
    n.inputs = {x};
    return emplace(std::move(n));
}

NodeId Graph::sigmoid(NodeId x) {
    Node n;
    n.op = Op::Sigmoid;
    n.rows = nodes_[x].rows;
    n.cols = nodes_[x].cols;
    n.inputs = {x};
    return emplace(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
    check(nodes_[a].rows == nodes_[b].rows && nodes_[a].cols == nodes_[b].cols,
          "mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.rows = nodes_[a].rows;
    n.cols = nodes_[a].cols;
    n.inputs = {a, b};
    return emplace(std::move(n));
}

NodeId Graph::neg(NodeId x) {
    Node n;
    n.op = Op::Neg;
    n.rows = nodes_[x].rows;
    n.cols = nodes_[x].cols;
    n.inputs = {x};
    return emplace(std::move(n));
}

NodeId Graph::scale(NodeId x, double c) {
    Node n;
    n.op = Op::Scale;
    n.rows = nodes_[x].rows;
    n.cols = nodes_[x].cols;
    n.inputs = {x};
    n.c = c;
    return emplace(std::move(n));
}

NodeId Graph::logsumexp(NodeId x) {
    require_vector(nodes_[x], "logsumexp");
    Node n;
    n.op = Op::LogSumExp;
    n.rows = 1;
    n.inputs = {x};
    return emplace(std::move(n));
}

NodeId Graph::pick(NodeId x, int i) {
    const Node& a = nodes_[x];
    require_vector(a, "pick");
    check(i >= 0 && i < a.rows, "pick: index " + std::to_string(i) +
                                    " out of range [0, " + std::to_string(a.rows) + ")");
    Node n;
    n.op = Op::Pick;
    n.rows = 1;
    n.inputs = {x};
    n.i0 = i;
    return emplace(std::move(n));
}

NodeId Graph::pick_row(NodeId m, int row) {
    const Node& a = nodes_[m];
    check(row >= 0 && row < a.rows, "pick_row: row out of range" +
                                        (a.name.empty() ? "" : " (" + a.name + ")"));
    Node n;
    n.op = Op::PickRow;
    n.rows = a.cols;
    n.inputs = {m};
    n.i0 = row;
    return emplace(std::move(n));
}

NodeId Graph::pick_entry(NodeId m, int row, int col) {
    const Node& a = nodes_[m];
    check(row >= 0 && row < a.rows && col >= 0 && col < a.cols,
          "pick_entry: index out of range");
    Node n;
    n.op = Op::PickEntry;
    n.rows = 1;
    n.inputs = {m};
    n.i0 = row;
    n.i1 = col;
    return emplace(std::move(n));
}

NodeId Graph::stack(const std::vector<NodeId>& scalars) {
    check(!scalars.empty(), "stack: no inputs");
    for (NodeId id : scalars)
        check(nodes_[id].rows == 1 && nodes_[id].cols == 1, "stack: inputs must be scalar");
    Node n;
    n.op = Op::Stack;
    n.rows = static_cast<int>(scalars.size());
    n.inputs = scalars;
    return emplace(std::move(n));
}

NodeId Graph::dropout(NodeId x, double keep, Rng& rng) {
    check(keep > 0.0 && keep <= 1.0, "dropout: keep probability out of (0, 1]");
    const Node& a = nodes_[x];
    Node n;
    n.op = Op::Dropout;
    n.rows = a.rows;
    n.cols = a.cols;
    n.inputs = {x};
    n.mask = Mat(a.rows, a.cols);
    std::bernoulli_distribution coin(keep);
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < a.rows; ++i)
            n.mask(i, j) = coin(rng) ? 1.0 / keep : 0.0;
    return emplace(std::move(n));
}

NodeId Graph::dropout(NodeId x, const Mat& mask) {
    const Node& a = nodes_[x];
    check(mask.rows() == a.rows && mask.cols() == a.cols, "dropout: mask shape mismatch");
    Node n;
    n.op = Op::Dropout;
    n.rows = a.rows;
    n.cols = a.cols;
    n.inputs = {x};
    n.mask = mask;
    return emplace(std::move(n));
}

NodeId Graph::pick_col(NodeId m, int col) {
    const Node& a = nodes_[m];
    check(col >= 0 && col < a.cols, "pick_col: column out of range" +
                                        (a.name.empty() ? "" : " (" + a.name + ")"));
    Node n;
    n.op = Op::PickCol;
    n.rows = a.rows;
    n.inputs = {m};
    n.i0 = col;
    return emplace(std::move(n));
}

NodeId Graph::mul_scalar(NodeId x, NodeId s) {
    check(nodes_[s].rows == 1 && nodes_[s].cols == 1, "mul_scalar: scale must be scalar");
    Node n;
    n.op = Op::MulScalar;
    n.rows = nodes_[x].rows;
    n.cols = nodes_[x].cols;
    n.inputs = {x, s};
    return emplace(std::move(n));
}

void Graph::set_value(NodeId id, const Mat& v) {
    Node& n = nodes_[id];
    check(n.op == Op::Input || n.op == Op::Param, "set_value: not an input/param node");
    check(v.rows() == n.rows && v.cols() == n.cols, "set_value: shape mismatch");
    n.value = v;
    n.has_value = true;
}

double Graph::scalar(NodeId id) const {
    const Node& n = nodes_[id];
    check(n.rows == 1 && n.cols == 1, "scalar: node is not scalar");
    check(n.has_value, "scalar: forward() has not run");
    return n.value(0, 0);
}

void Graph::eval(Node& n) {
    auto& in = n.inputs;
    auto v = [&](size_t i) -> const Mat& { return nodes_[in[i]].value; };
    switch (n.op) {
        case Op::Input:
        case Op::Param:
            check(n.has_value, "forward: unassigned input node" +
                                   (n.name.empty() ? "" : " '" + n.name + "'"));
            return;
        case Op::MatVec:
            n.value.noalias() = v(0) * v(1);
            return;
        case Op::Add:
            n.value = v(0);
            for (size_t i = 1; i < in.size(); ++i) n.value += v(i);
            return;
        case Op::Concat: {
            n.value.resize(n.rows, 1);
            int off = 0;
            for (size_t i = 0; i < in.size(); ++i) {
                n.value.block(off, 0, nodes_[in[i]].rows, 1) = v(i);
                off += nodes_[in[i]].rows;
            }
            return;
        }
        case Op::Slice:
            n.value = v(0).block(n.i0, 0, n.i1, 1);
            return;
        case Op::Tanh:
            n.value = v(0).array().tanh();
            return;
        case Op::Sigmoid:
            n.value = 1.0 / (1.0 + (-v(0).array()).exp());
            return;
        case Op::Mul:
            n.value = v(0).cwiseProduct(v(1));
            return;
        case Op::Neg:
            n.value = -v(0);
            return;
        case Op::Scale:
            n.value = n.c * v(0);
            return;
        case Op::LogSumExp: {
            double m = v(0).maxCoeff();
            n.value.resize(1, 1);
            n.value(0, 0) = m + std::log((v(0).array() - m).exp().sum());
            return;
        }
        case Op::Pick:
            n.value.resize(1, 1);
            n.value(0, 0) = v(0)(n.i0, 0);
            return;
        case Op::PickRow:
            n.value = v(0).row(n.i0).transpose();
            return;
        case Op::PickEntry:
            n.value.resize(1, 1);
            n.value(0, 0) = v(0)(n.i0, n.i1);
            return;
        case Op::Stack:
            n.value.resize(n.rows, 1);
            for (size_t i = 0; i < in.size(); ++i) n.value(static_cast<int>(i), 0) = v(i)(0, 0);
            return;
        case Op::Dropout:
            n.value = v(0).cwiseProduct(n.mask);
            return;
        case Op::PickCol:
            n.value = v(0).col(n.i0);
            return;
        case Op::MulScalar:
            n.value = v(1)(0, 0) * v(0);
            return;
    }
    throw Error("forward: unknown op");
}

void Graph::forward() {
    for (Node& n : nodes_) {
        eval(n);
        n.has_value = true;
    }
    forwarded_ = true;
}

void Graph::accumulate(Node& n) {
    auto& in = n.inputs;
    auto g = [&](size_t i) -> Mat& { return nodes_[in[i]].grad; };
    auto v = [&](size_t i) -> const Mat& { return nodes_[in[i]].value; };
    const Mat& dy = n.grad;
    switch (n.op) {
        case Op::Input:
        case Op::Param:
            return;
        case Op::MatVec:
            g(0).noalias() += dy * v(1).transpose();
            g(1).noalias() += v(0).transpose() * dy;
            return;
        case Op::Add:
            for (size_t i = 0; i < in.size(); ++i) g(i) += dy;
            return;
        case Op::Concat: {
            int off = 0;
            for (size_t i = 0; i < in.size(); ++i) {
                g(i) += dy.block(off, 0, nodes_[in[i]].rows, 1);
                off += nodes_[in[i]].rows;
            }
            return;
        }
        case Op::Slice:
            g(0).block(n.i0, 0, n.i1, 1) += dy;
            return;
        case Op::Tanh:
            g(0).array() += dy.array() * (1.0 - n.value.array().square());
            return;
        case Op::Sigmoid:
            g(0).array() += dy.array() * n.value.array() * (1.0 - n.value.array());
            return;
        case Op::Mul:
            g(0) += dy.cwiseProduct(v(1));
            g(1) += dy.cwiseProduct(v(0));
            return;
        case Op::Neg:
            g(0) -= dy;
            return;
        case Op::Scale:
            g(0) += n.c * dy;
            return;
        case Op::LogSumExp:
            g(0).array() += dy(0, 0) * (v(0).array() - n.value(0, 0)).exp();
            return;
        case Op::Pick:
            g(0)(n.i0, 0) += dy(0, 0);
            return;
        case Op::PickRow:
            g(0).row(n.i0) += dy.transpose();
            return;
        case Op::PickEntry:
            g(0)(n.i0, n.i1) += dy(0, 0);
            return;
        case Op::Stack:
            for (size_t i = 0; i < in.size(); ++i) g(i)(0, 0) += dy(static_cast<int>(i), 0);
            return;
        case Op::Dropout:
            g(0) += dy.cwiseProduct(n.mask);
            return;
        case Op::PickCol:
            g(0).col(n.i0) += dy;
            return;
        case Op::MulScalar:
            g(0) += v(1)(0, 0) * dy;
            g(1)(0, 0) += dy.cwiseProduct(v(0)).sum();
            return;
    }
    throw Error("backward: unknown op");
}

void Graph::backward(NodeId loss) {
    check(forwarded_, "backward: forward() has not run");
    const Node& l = nodes_[loss];
    check(l.rows == 1 && l.cols == 1, "backward: loss must be scalar");
    for (Node& n : nodes_) n.grad = Mat::Zero(n.rows, n.cols);
    nodes_[loss].grad(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) accumulate(*it);
}

}  // namespace onenet::ag
