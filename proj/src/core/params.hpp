#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "graph.hpp"
#include "types.hpp"

namespace onenet {

// Partition of the trainable parameters, matching the loss signatures:
// shared encoder stack vs. the three head-specific sets.
enum class Partition : uint8_t { Shared, DomainHead, IntentHead, SlotHead };

const char* partition_name(Partition p);

struct ParamTensor {
    std::string name;
    Partition partition;
    Mat value;
    Mat grad;   // accumulated by the trainer between updates
    Mat m1;     // Adam first moment
    Mat m2;     // Adam second moment
};

// Named tensors with fixed shapes. Declaration order is stable and defines
// checkpoint layout.
class ParameterStore {
public:
    // Glorot-uniform matrix. Vectors (cols == 1) are zero initialized.
    ParamTensor& add(const std::string& name, int rows, int cols, Partition p, Rng& rng);
    ParamTensor& add_zeros(const std::string& name, int rows, int cols, Partition p);

    ParamTensor& get(const std::string& name);
    const ParamTensor& get(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    std::vector<ParamTensor>& tensors() { return tensors_; }
    const std::vector<ParamTensor>& tensors() const { return tensors_; }

    void zero_grads();
    size_t coordinate_count() const;

private:
    std::vector<ParamTensor> tensors_;
    std::unordered_map<std::string, size_t> index_;
};

// Per-graph binding of store tensors to Param nodes. Tensors are copied into
// the graph on first use; grads flow back via accumulate_grads().
class GraphBinder {
public:
    GraphBinder(ag::Graph& g, ParameterStore& store) : graph_(g), store_(store) {}

    ag::NodeId operator[](const std::string& name);

    // Adds each bound node's grad into the store grad buffers.
    void accumulate_grads();

private:
    ag::Graph& graph_;
    ParameterStore& store_;
    std::unordered_map<std::string, ag::NodeId> bound_;
};

}  // namespace onenet
