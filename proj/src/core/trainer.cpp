#include "trainer.hpp"

#include <algorithm>
#include <cmath>

namespace onenet {

LossMask stage_mask(CurriculumStage s) {
    switch (s) {
        case CurriculumStage::DomainOnly: return {true, false, false};
        case CurriculumStage::IntentOnly: return {false, true, false};
        case CurriculumStage::DomainPlusIntent: return {true, true, false};
        case CurriculumStage::AllThree: return {true, true, true};
    }
    throw Error("unknown curriculum stage");
}

void adam_step(ParameterStore& store, AdamState& state, const Hyperparams& hp) {
    if (hp.grad_clip > 0.0) {
        double sq = 0.0;
        for (const auto& t : store.tensors()) sq += t.grad.squaredNorm();
        double norm = std::sqrt(sq);
        if (norm > hp.grad_clip) {
            double s = hp.grad_clip / norm;
            for (auto& t : store.tensors()) t.grad *= s;
        }
    }
    ++state.t;
    const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
    for (auto& t : store.tensors()) {
        if (!t.grad.allFinite())
            throw Error("non-finite gradient in tensor '" + t.name + "'");
        t.m1 = hp.beta1 * t.m1 + (1.0 - hp.beta1) * t.grad;
        t.m2 = hp.beta2 * t.m2.array() + (1.0 - hp.beta2) * t.grad.array().square();
        t.value.array() -=
            hp.learning_rate * (t.m1.array() / c1) / ((t.m2.array() / c2).sqrt() + hp.epsilon);
    }
}

EvalReport evaluate_model(OneNetModel& model, const std::vector<Example>& data) {
    std::vector<Prediction> preds;
    preds.reserve(data.size());
    for (const auto& e : data) {
        Prediction p = model.predict(e.tokens);
        if (p.slots.empty()) p.slots.assign(e.tokens.size(), "O");
        preds.push_back(std::move(p));
    }
    return build_report(data, preds);
}

namespace {

struct Snapshot {
    std::vector<Mat> values;
    void capture(const ParameterStore& s) {
        values.clear();
        for (const auto& t : s.tensors()) values.push_back(t.value);
    }
    void restore(ParameterStore& s) const {
        for (size_t i = 0; i < values.size(); ++i) s.tensors()[i].value = values[i];
    }
};

}  // namespace

TrainResult train_curriculum(OneNetModel& model, const std::vector<Example>& train,
                             const std::vector<Example>& tune, const Hyperparams& hp) {
    check(!train.empty(), "train_curriculum: empty corpus");
    model.config().dropout_keep = hp.dropout_keep;

    TrainResult result;
    Rng rng(hp.seed);
    AdamState adam;
    Snapshot best;
    double best_primary = -1.0, best_secondary = -1.0;
    const bool has_slot = model.config().slot_head;
    const bool has_intent = model.config().intent_head;

    std::vector<size_t> order(train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    int final_stage = -1;
    for (int s = 3; s >= 0; --s) {
        LossMask m = stage_mask(static_cast<CurriculumStage>(s));
        bool usable = (m.domain && model.config().domain_head) ||
                      (m.intent && has_intent) || (m.slot && has_slot);
        if (usable && hp.stage_epochs[static_cast<size_t>(s)] > 0) {
            final_stage = s;
            break;
        }
    }
    check(final_stage >= 0, "train_curriculum: no runnable stage has a positive epoch budget");

    for (int s = 0; s < 4; ++s) {
        auto stage = static_cast<CurriculumStage>(s);
        LossMask full = stage_mask(stage);
        LossMask mask{full.domain && model.config().domain_head,
                      full.intent && has_intent, full.slot && has_slot};
        if (!mask.domain && !mask.intent && !mask.slot) continue;
        const int epochs = hp.stage_epochs[static_cast<size_t>(s)];
        int since_improvement = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            double loss_sum = 0.0;
            for (size_t idx : order) {
                LossBuild lb = model.build_losses(train[idx], mask, /*train=*/true, rng);
                lb.graph->forward();
                double loss = lb.graph->scalar(lb.total);
                if (!std::isfinite(loss))
                    throw Error("training diverged (non-finite loss) at stage " +
                                std::to_string(s) + " epoch " + std::to_string(epoch));
                loss_sum += loss;
                lb.graph->backward(lb.total);
                model.params().zero_grads();
                lb.binder->accumulate_grads();
                adam_step(model.params(), adam, hp);
            }

            EpochLog log;
            log.stage = s;
            log.epoch = epoch;
            log.mean_loss = loss_sum / static_cast<double>(train.size());
            if (!tune.empty()) {
                EvalReport r = evaluate_model(model, tune);
                log.tune_domain_acc = r.overall.domain_accuracy();
                log.tune_intent_acc = r.overall.intent_accuracy();
                log.tune_slot_f1 = r.overall.slots.f1();
            }
            result.log.push_back(log);

            if (s == final_stage) {
                double primary = has_slot ? log.tune_slot_f1
                                : has_intent ? log.tune_intent_acc
                                             : log.tune_domain_acc;
                double secondary = has_slot && has_intent ? log.tune_intent_acc
                                                          : log.tune_domain_acc;
                if (tune.empty()) {  // no tuning set: keep the last epoch
                    primary = static_cast<double>(epoch);
                    secondary = 0.0;
                }
                bool strictly_better =
                    primary > best_primary ||
                    (primary == best_primary && secondary > best_secondary);
                // full ties keep the most-trained snapshot; a saturated tuning
                // metric should not freeze the model at its first good epoch
                if (strictly_better ||
                    (primary == best_primary && secondary == best_secondary)) {
                    best_primary = primary;
                    best_secondary = secondary;
                    best.capture(model.params());
                    result.best_log_index = static_cast<int>(result.log.size()) - 1;
                }
                if (strictly_better) {
                    since_improvement = 0;
                } else if (++since_improvement >= hp.patience && hp.patience > 0 &&
                           !tune.empty()) {
                    break;
                }
            }
        }
    }
    if (result.best_log_index >= 0) {
        best.restore(model.params());
        result.log[static_cast<size_t>(result.best_log_index)].selected = true;
    }
    return result;
}

}  // namespace onenet
