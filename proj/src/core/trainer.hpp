#pragma once

#include <array>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "model.hpp"

namespace onenet {

struct Hyperparams {
    double learning_rate = 4e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double dropout_keep = 0.4;
    // DomainOnly, IntentOnly, DomainPlusIntent, AllThree
    std::array<int, 4> stage_epochs = {3, 3, 3, 20};
    int patience = 5;  // early stopping on the tuning metric, final stage only
    uint64_t seed = 1;
    double grad_clip = 0.0;  // global-norm cap; 0 disables
};

enum class CurriculumStage : int { DomainOnly = 0, IntentOnly, DomainPlusIntent, AllThree };

LossMask stage_mask(CurriculumStage s);

struct AdamState {
    long t = 0;  // shared step counter; moments live beside each tensor
};

// One bias-corrected update from the store's accumulated grads. Throws on
// non-finite gradients, naming the tensor.
void adam_step(ParameterStore& store, AdamState& state, const Hyperparams& hp);

struct EpochLog {
    int stage = 0;
    int epoch = 0;       // within stage
    double mean_loss = 0.0;
    double tune_domain_acc = 0.0;
    double tune_intent_acc = 0.0;
    double tune_slot_f1 = 0.0;
    bool selected = false;
};

struct TrainResult {
    std::vector<EpochLog> log;
    int best_log_index = -1;
};

EvalReport evaluate_model(OneNetModel& model, const std::vector<Example>& data);

// Runs the four stages in order (stages whose loss terms the model's heads
// cannot produce are skipped), one Adam update per utterance, shuffled per
// epoch from the run seed. Keeps the final-stage epoch with the best tuning
// slot F1 (intent accuracy as tie-breaker; models without a slot head fall
// back to intent, then domain accuracy) and restores it on return.
TrainResult train_curriculum(OneNetModel& model, const std::vector<Example>& train,
                             const std::vector<Example>& tune, const Hyperparams& hp);

}  // namespace onenet
