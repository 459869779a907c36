#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crf.hpp"
#include "data.hpp"
#include "graph.hpp"
#include "params.hpp"

namespace onenet {

// Fused-gate LSTM step: weights shape (4H) x (in + H), gate order
// input/forget/candidate/output. Returns (h, c).
struct LstmStep {
    ag::NodeId h;
    ag::NodeId c;
};
LstmStep build_lstm_step(ag::Graph& g, ag::NodeId x, ag::NodeId h_prev, ag::NodeId c_prev,
                         ag::NodeId weights, ag::NodeId bias);

struct ModelConfig {
    int char_emb_dim = 25;
    int char_hidden = 25;
    int word_emb_dim = 100;
    int word_hidden = 100;
    bool use_char = true;  // word-embedding-only ablation when false

    bool domain_head = true;
    bool intent_head = true;
    bool slot_head = true;

    double dropout_keep = 0.4;
    double unk_prob = 0.1;  // singleton -> UNK replacement during training
    crf::Coupling coupling = crf::Coupling::Additive;

    int word_repr_dim() const { return (use_char ? 2 * char_hidden : 0) + word_emb_dim; }
    int encoder_dim() const { return 2 * word_hidden; }
};

// Which loss terms a training step builds. Inactive heads are absent from
// the graph entirely, so their parameters see no gradient.
struct LossMask {
    bool domain = true;
    bool intent = true;
    bool slot = true;
};

struct LossBuild {
    std::unique_ptr<ag::Graph> graph;
    std::unique_ptr<GraphBinder> binder;
    ag::NodeId total = -1;
    ag::NodeId domain = -1;  // -1 when inactive
    ag::NodeId intent = -1;
    ag::NodeId slot = -1;
};

struct Prediction {
    std::string domain;  // empty when the model has no domain head
    std::string intent;
    std::vector<std::string> slots;
};

// The joint network: char BiLSTM + word embedding -> shared word BiLSTM ->
// domain / intent / CRF heads. Head subsets of the same class serve as the
// single-task and per-domain baseline models.
class OneNetModel {
public:
    OneNetModel(ModelConfig cfg, CharVocab cv, WordVocab wv,
                std::vector<std::string> domains, std::vector<std::string> intents,
                TagSet tags, uint64_t init_seed);

    LossBuild build_losses(const Example& example, const LossMask& mask, bool train,
                           Rng& rng);
    Prediction predict(const std::vector<std::string>& tokens);

    // Emission scores (n x |L|) and softmax logits computed without dropout;
    // used by decoding and by tests.
    Mat emissions(const std::vector<std::string>& tokens);

    // Loads word vectors from a text file (token + word_emb_dim floats per
    // line) into matching vocabulary rows. Returns the number of rows seeded.
    size_t load_pretrained(const std::string& path);

    ModelConfig& config() { return cfg_; }
    const ModelConfig& config() const { return cfg_; }
    ParameterStore& params() { return store_; }
    const ParameterStore& params() const { return store_; }
    const CharVocab& char_vocab() const { return char_vocab_; }
    const WordVocab& word_vocab() const { return word_vocab_; }
    const std::vector<std::string>& domains() const { return domains_; }
    const std::vector<std::string>& intents() const { return intents_; }
    const TagSet& tags() const { return tags_; }

    // Orthography-sensitive word representation node, exposed for tests.
    ag::NodeId embed_word(ag::Graph& g, GraphBinder& b, const std::string& word,
                          bool train, Rng& rng) const;
    std::vector<ag::NodeId> encode(ag::Graph& g, GraphBinder& b,
                                   const std::vector<ag::NodeId>& v) const;

private:
    std::vector<ag::NodeId> build_encoder(ag::Graph& g, GraphBinder& b,
                                          const std::vector<std::string>& tokens, bool train,
                                          Rng& rng) const;
    ag::NodeId bilstm(ag::Graph& g, GraphBinder& b, const std::string& prefix,
                      const std::vector<ag::NodeId>& xs, int hidden,
                      std::vector<ag::NodeId>* fwd_out,
                      std::vector<ag::NodeId>* bwd_out) const;
    ag::NodeId nll_head(ag::Graph& g, GraphBinder& b, const std::string& prefix,
                        const std::vector<ag::NodeId>& h, int gold) const;
    ag::NodeId pooled_logits(ag::Graph& g, GraphBinder& b, const std::string& prefix,
                             const std::vector<ag::NodeId>& h) const;
    ag::NodeId crf_loss_node(ag::Graph& g, GraphBinder& b,
                             const std::vector<ag::NodeId>& emis,
                             const std::vector<int>& gold) const;

    ModelConfig cfg_;
    CharVocab char_vocab_;
    WordVocab word_vocab_;
    std::vector<std::string> domains_;
    std::vector<std::string> intents_;
    TagSet tags_;
    ParameterStore store_;
};

}  // namespace onenet
