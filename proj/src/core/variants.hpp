#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "model.hpp"
#include "trainer.hpp"

namespace onenet {

enum class Variant { Joint, Independent, Pipeline, OracleDomain };

Variant variant_from_string(const std::string& s);
std::string variant_to_string(Variant v);

// The models one variant needs. Joint holds the single multitask network;
// Independent holds three unrelated single-task networks; Pipeline routes
// Independent's domain model into per-domain intent/slot models;
// OracleDomain routes by gold domain.
struct ModelBundle {
    Variant variant = Variant::Joint;
    std::unique_ptr<OneNetModel> joint;
    std::unique_ptr<OneNetModel> domain_model;
    std::unique_ptr<OneNetModel> intent_model;
    std::unique_ptr<OneNetModel> slot_model;
    std::map<std::string, std::unique_ptr<OneNetModel>> domain_intent;
    std::map<std::string, std::unique_ptr<OneNetModel>> domain_slot;
};

struct VariantTrainSetup {
    ModelConfig base;  // head flags are overridden per sub-model
    Hyperparams hyper;
    std::string embeddings_path;  // optional
};

struct VariantTrainResult {
    ModelBundle bundle;
    std::map<std::string, TrainResult> logs;  // keyed by sub-model name
};

// Trains exactly the models the variant requires. The joint model gets the
// full curriculum; baseline models train on their own loss only (final
// stage budget), per-domain models on their domain's slice of the data.
VariantTrainResult train_variant(Variant v, const std::vector<Example>& train,
                                 const std::vector<Example>& tune, const CorpusSchema& schema,
                                 const VariantTrainSetup& setup);

// gold_domain is consulted only by OracleDomain.
Prediction predict_variant(ModelBundle& bundle, const std::vector<std::string>& tokens,
                           const std::string& gold_domain);

EvalReport evaluate_variant(ModelBundle& bundle, const std::vector<Example>& test);

// Checkpoint naming scheme inside a run directory: joint.ckpt, domain.ckpt,
// intent.ckpt, slot.ckpt, intent_<domain>.ckpt, slot_<domain>.ckpt.
void save_bundle(const ModelBundle& bundle, const std::string& dir);
ModelBundle load_bundle(Variant v, const std::string& dir, const CorpusSchema& schema);

}  // namespace onenet
