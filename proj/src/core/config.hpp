#pragma once

#include <string>

#include "model.hpp"
#include "trainer.hpp"

namespace onenet {

// Flat key = value run configuration; CLI flags override file entries, the
// ONENET_SEED environment variable overrides both.
struct RunConfig {
    std::string train_path;
    std::string tune_path;
    std::string test_path;
    std::string schema_path;      // optional sidecar override
    std::string embeddings_path;  // optional pretrained word vectors
    std::string out_dir = "run";
    std::string variant = "joint";  // joint | independent | pipeline | oracle

    Hyperparams hyper;

    int char_emb_dim = 25;
    int char_hidden = 25;
    int word_emb_dim = 100;
    int word_hidden = 100;
    bool use_char = true;
    double unk_prob = 0.1;
    std::string crf_score = "additive";  // additive | multiplicative
    int threads = 1;

    ModelConfig model_config() const;
};

RunConfig parse_config_file(const std::string& path);
// key = value, same keys as the file format. Unknown key -> error.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
std::string config_to_string(const RunConfig& cfg);

}  // namespace onenet
