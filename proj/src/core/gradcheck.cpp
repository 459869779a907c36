#include "gradcheck.hpp"

#include <cmath>

namespace onenet {

GradCheckReport gradient_check(const std::function<double(bool with_grads)>& loss,
                               ParameterStore& store, double step, double tolerance,
                               int coords_per_tensor, uint64_t sample_seed) {
    GradCheckReport report;
    report.tolerance = tolerance;

    store.zero_grads();
    double base = loss(true);
    check(std::isfinite(base), "gradient_check: non-finite loss");

    Rng rng(sample_seed);
    for (auto& t : store.tensors()) {
        GradCheckEntry entry;
        entry.name = t.name;
        const int total = static_cast<int>(t.value.size());
        std::vector<int> coords;
        if (coords_per_tensor < 0 || total <= coords_per_tensor) {
            coords.resize(total);
            for (int i = 0; i < total; ++i) coords[i] = i;
        } else {
            std::uniform_int_distribution<int> pick(0, total - 1);
            for (int i = 0; i < coords_per_tensor; ++i) coords.push_back(pick(rng));
        }
        double* data = t.value.data();
        for (int c : coords) {
            const double saved = data[c];
            data[c] = saved + step;
            double up = loss(false);
            data[c] = saved - step;
            double down = loss(false);
            data[c] = saved;
            check(std::isfinite(up) && std::isfinite(down),
                  "gradient_check: non-finite loss while perturbing " + t.name);
            double numeric = (up - down) / (2.0 * step);
            double analytic = t.grad.data()[c];
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            double rel = std::abs(analytic - numeric) / denom;
            if (rel > entry.max_rel_err) {
                entry.max_rel_err = rel;
                entry.worst_analytic = analytic;
                entry.worst_numeric = numeric;
            }
            ++entry.coords_checked;
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.tensors.push_back(std::move(entry));
    }
    return report;
}

}  // namespace onenet
