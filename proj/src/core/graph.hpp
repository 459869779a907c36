#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace onenet::ag {

// Reverse-mode autodiff over a dynamically built DAG of dense tensors.
// Vectors are n x 1, scalars 1 x 1. Node ids are topologically ordered by
// construction; forward() evaluates in id order, backward() accumulates in
// reverse.

enum class Op : uint8_t {
    Input,
    Param,
    MatVec,      // W (m x n) * x (n x 1)
    Add,         // n-ary, same shape
    Concat,      // vertical stack of vectors
    Slice,       // contiguous segment of a vector
    Tanh,
    Sigmoid,
    Mul,         // pointwise
    Neg,
    Scale,       // constant * x
    LogSumExp,   // vector -> scalar, overflow safe
    Pick,        // vector[i] -> scalar
    PickRow,     // matrix row -> vector
    PickEntry,   // matrix[r, c] -> scalar
    Stack,       // scalars -> vector
    Dropout,     // inverted dropout with a fixed mask
    PickCol,     // matrix column -> vector
    MulScalar,   // vector * scalar node, broadcast
};

using NodeId = int32_t;

struct Node {
    Op op;
    int rows = 0;
    int cols = 1;
    std::vector<NodeId> inputs;
    Mat value;
    Mat grad;
    bool has_value = false;
    // op-specific payload
    int i0 = 0;   // pick index / slice offset / row
    int i1 = 0;   // slice length / column
    double c = 0;
    Mat mask;     // dropout
    std::string name;  // inputs/params, for diagnostics
};

class Graph {
public:
    NodeId input(const Mat& v, std::string name = "");
    // Placeholder input; value must be set before forward().
    NodeId input(int rows, int cols, std::string name);
    NodeId param(const Mat& v, std::string name = "");

    NodeId matvec(NodeId w, NodeId x);
    NodeId add(const std::vector<NodeId>& xs);
    NodeId add(NodeId a, NodeId b) { return add(std::vector<NodeId>{a, b}); }
    NodeId concat(const std::vector<NodeId>& xs);
    NodeId slice(NodeId x, int offset, int len);
    NodeId tanh(NodeId x);
    NodeId sigmoid(NodeId x);
    NodeId mul(NodeId a, NodeId b);
    NodeId neg(NodeId x);
    NodeId scale(NodeId x, double c);
    NodeId logsumexp(NodeId x);
    NodeId pick(NodeId x, int i);
    NodeId pick_row(NodeId m, int row);
    NodeId pick_entry(NodeId m, int row, int col);
    NodeId stack(const std::vector<NodeId>& scalars);
    NodeId dropout(NodeId x, double keep, Rng& rng);
    // Dropout with a caller-supplied (already inverse-scaled) mask, so one
    // mask can be shared across positions.
    NodeId dropout(NodeId x, const Mat& mask);
    NodeId pick_col(NodeId m, int col);
    NodeId mul_scalar(NodeId x, NodeId s);

    void set_value(NodeId id, const Mat& v);

    // Evaluates every node in topological (id) order. Repeatable; a second
    // call recomputes from the current input/param values.
    void forward();
    // Populates grad for every node on a path to `loss`; others are zero.
    void backward(NodeId loss);

    const Mat& value(NodeId id) const { return nodes_[id].value; }
    const Mat& grad(NodeId id) const { return nodes_[id].grad; }
    double scalar(NodeId id) const;
    const Node& node(NodeId id) const { return nodes_[id]; }
    size_t size() const { return nodes_.size(); }

private:
    NodeId emplace(Node n);
    void eval(Node& n);
    void accumulate(Node& n);
    std::vector<Node> nodes_;
    bool forwarded_ = false;
};

}  // namespace onenet::ag
