#include "params.hpp"

#include <cmath>

namespace onenet {

const char* partition_name(Partition p) {
    switch (p) {
        case Partition::Shared: return "shared";
        case Partition::DomainHead: return "domain-head";
        case Partition::IntentHead: return "intent-head";
        case Partition::SlotHead: return "slot-head";
    }
    return "?";
}

ParamTensor& ParameterStore::add(const std::string& name, int rows, int cols,
                                 Partition p, Rng& rng) {
    check(!has(name), "parameter '" + name + "' already declared");
    ParamTensor t;
    t.name = name;
    t.partition = p;
    if (cols == 1) {
        t.value = Mat::Zero(rows, 1);
    } else {
        double bound = std::sqrt(6.0 / (rows + cols));
        std::uniform_real_distribution<double> u(-bound, bound);
        t.value = Mat(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) t.value(i, j) = u(rng);
    }
    t.grad = Mat::Zero(rows, cols);
    t.m1 = Mat::Zero(rows, cols);
    t.m2 = Mat::Zero(rows, cols);
    index_[name] = tensors_.size();
    tensors_.push_back(std::move(t));
    return tensors_.back();
}

ParamTensor& ParameterStore::add_zeros(const std::string& name, int rows, int cols,
                                       Partition p) {
    check(!has(name), "parameter '" + name + "' already declared");
    ParamTensor t;
    t.name = name;
    t.partition = p;
    t.value = Mat::Zero(rows, cols);
    t.grad = Mat::Zero(rows, cols);
    t.m1 = Mat::Zero(rows, cols);
    t.m2 = Mat::Zero(rows, cols);
    index_[name] = tensors_.size();
    tensors_.push_back(std::move(t));
    return tensors_.back();
}

ParamTensor& ParameterStore::get(const std::string& name) {
    auto it = index_.find(name);
    check(it != index_.end(), "unknown parameter '" + name + "'");
    return tensors_[it->second];
}

const ParamTensor& ParameterStore::get(const std::string& name) const {
    auto it = index_.find(name);
    check(it != index_.end(), "unknown parameter '" + name + "'");
    return tensors_[it->second];
}

void ParameterStore::zero_grads() {
    for (auto& t : tensors_) t.grad.setZero();
}

size_t ParameterStore::coordinate_count() const {
    size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<size_t>(t.value.size());
    return n;
}

ag::NodeId GraphBinder::operator[](const std::string& name) {
    auto it = bound_.find(name);
    if (it != bound_.end()) return it->second;
    ag::NodeId id = graph_.param(store_.get(name).value, name);
    bound_[name] = id;
    return id;
}

void GraphBinder::accumulate_grads() {
    for (const auto& [name, id] : bound_) store_.get(name).grad += graph_.grad(id);
}

}  // namespace onenet
