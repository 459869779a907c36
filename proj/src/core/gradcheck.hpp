#pragma once

#include <functional>
#include <string>
#include <vector>

#include "params.hpp"

namespace onenet {

struct GradCheckEntry {
    std::string name;
    int coords_checked = 0;
    double max_rel_err = 0.0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> tensors;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool passed() const { return max_rel_err < tolerance; }
};

// `loss(with_grads)` must deterministically rebuild the loss from the
// current store values; with_grads=true additionally accumulates analytic
// gradients into the store grad buffers (which are zeroed here first).
// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// against central differences. At most `coords_per_tensor` coordinates are
// sampled per tensor (all of them when the tensor is small enough).
GradCheckReport gradient_check(const std::function<double(bool with_grads)>& loss,
                               ParameterStore& store, double step, double tolerance,
                               int coords_per_tensor = 24, uint64_t sample_seed = 1);

}  // namespace onenet
