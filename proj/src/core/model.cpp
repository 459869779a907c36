#include "model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace onenet {

using ag::Graph;
using ag::NodeId;

LstmStep build_lstm_step(Graph& g, NodeId x, NodeId h_prev, NodeId c_prev,
                         NodeId weights, NodeId bias) {
    NodeId z = g.add(g.matvec(weights, g.concat({x, h_prev})), bias);
    int hidden = g.node(z).rows / 4;
    NodeId gi = g.sigmoid(g.slice(z, 0, hidden));
    NodeId gf = g.sigmoid(g.slice(z, hidden, hidden));
    NodeId gc = g.tanh(g.slice(z, 2 * hidden, hidden));
    NodeId go = g.sigmoid(g.slice(z, 3 * hidden, hidden));
    NodeId c = g.add(g.mul(gf, c_prev), g.mul(gi, gc));
    NodeId h = g.mul(go, g.tanh(c));
    return {h, c};
}

OneNetModel::OneNetModel(ModelConfig cfg, CharVocab cv, WordVocab wv,
                         std::vector<std::string> domains, std::vector<std::string> intents,
                         TagSet tags, uint64_t init_seed)
    : cfg_(cfg),
      char_vocab_(std::move(cv)),
      word_vocab_(std::move(wv)),
      domains_(std::move(domains)),
      intents_(std::move(intents)),
      tags_(std::move(tags)) {
    Rng rng(init_seed);
    const int repr = cfg_.word_repr_dim();
    if (cfg_.use_char) {
        store_.add("char_emb", char_vocab_.size(), cfg_.char_emb_dim, Partition::Shared, rng);
        for (const char* dir : {"cf", "cb"}) {
            std::string p = std::string("char_lstm_") + dir;
            store_.add(p + "_W", 4 * cfg_.char_hidden, cfg_.char_emb_dim + cfg_.char_hidden,
                       Partition::Shared, rng);
            store_.add_zeros(p + "_b", 4 * cfg_.char_hidden, 1, Partition::Shared);
            store_.add_zeros(p + "_h0", cfg_.char_hidden, 1, Partition::Shared);
            store_.add_zeros(p + "_c0", cfg_.char_hidden, 1, Partition::Shared);
        }
    }
    store_.add("word_emb", word_vocab_.size(), cfg_.word_emb_dim, Partition::Shared, rng);
    for (const char* dir : {"wf", "wb"}) {
        std::string p = std::string("word_lstm_") + dir;
        store_.add(p + "_W", 4 * cfg_.word_hidden, repr + cfg_.word_hidden, Partition::Shared,
                   rng);
        store_.add_zeros(p + "_b", 4 * cfg_.word_hidden, 1, Partition::Shared);
        store_.add_zeros(p + "_h0", cfg_.word_hidden, 1, Partition::Shared);
        store_.add_zeros(p + "_c0", cfg_.word_hidden, 1, Partition::Shared);
    }
    const int enc = cfg_.encoder_dim();
    if (cfg_.domain_head) {
        check(!domains_.empty(), "domain head requires a domain inventory");
        store_.add("domain_W", static_cast<int>(domains_.size()), enc, Partition::DomainHead,
                   rng);
        store_.add_zeros("domain_b", static_cast<int>(domains_.size()), 1,
                         Partition::DomainHead);
    }
    if (cfg_.intent_head) {
        check(!intents_.empty(), "intent head requires an intent inventory");
        store_.add("intent_W", static_cast<int>(intents_.size()), enc, Partition::IntentHead,
                   rng);
        store_.add_zeros("intent_b", static_cast<int>(intents_.size()), 1,
                         Partition::IntentHead);
    }
    if (cfg_.slot_head) {
        check(tags_.size() > 0, "slot head requires a tag set");
        store_.add("slot_W", tags_.size(), enc, Partition::SlotHead, rng);
        store_.add_zeros("slot_b", tags_.size(), 1, Partition::SlotHead);
        store_.add("crf_T", tags_.size() + 1, tags_.size(), Partition::SlotHead, rng);
    }
}

NodeId OneNetModel::bilstm(Graph& g, GraphBinder& b, const std::string& prefix,
                           const std::vector<NodeId>& xs, int hidden,
                           std::vector<NodeId>* fwd_out, std::vector<NodeId>* bwd_out) const {
    (void)hidden;
    const int n = static_cast<int>(xs.size());
    std::vector<NodeId> fwd(n), bwd(n);
    {
        NodeId h = b[prefix + "f_h0"], c = b[prefix + "f_c0"];
        NodeId W = b[prefix + "f_W"], bias = b[prefix + "f_b"];
        for (int i = 0; i < n; ++i) {
            LstmStep s = build_lstm_step(g, xs[i], h, c, W, bias);
            h = s.h;
            c = s.c;
            fwd[i] = h;
        }
    }
    {
        NodeId h = b[prefix + "b_h0"], c = b[prefix + "b_c0"];
        NodeId W = b[prefix + "b_W"], bias = b[prefix + "b_b"];
        for (int i = n - 1; i >= 0; --i) {
            LstmStep s = build_lstm_step(g, xs[i], h, c, W, bias);
            h = s.h;
            c = s.c;
            bwd[i] = h;
        }
    }
    if (fwd_out) *fwd_out = fwd;
    if (bwd_out) *bwd_out = bwd;
    return -1;
}

NodeId OneNetModel::embed_word(Graph& g, GraphBinder& b, const std::string& word, bool train,
                               Rng& rng) const {
    check(!word.empty(), "embed_word: empty word");
    int widx = word_vocab_.lookup(word);
    if (train && widx != WordVocab::kUnk && word_vocab_.train_count[widx] == 1 &&
        cfg_.unk_prob > 0.0) {
        std::bernoulli_distribution coin(cfg_.unk_prob);
        if (coin(rng)) widx = WordVocab::kUnk;
    }
    NodeId wemb = g.pick_row(b["word_emb"], widx);
    if (!cfg_.use_char) return wemb;

    std::vector<NodeId> chars;
    for (char32_t cp : utf8_codepoints(word))
        chars.push_back(g.pick_row(b["char_emb"], char_vocab_.lookup(cp)));
    std::vector<NodeId> fwd, bwd;
    bilstm(g, b, "char_lstm_c", chars, cfg_.char_hidden, &fwd, &bwd);
    return g.concat({fwd.back(), bwd.front(), wemb});
}

std::vector<NodeId> OneNetModel::encode(Graph& g, GraphBinder& b,
                                        const std::vector<NodeId>& v) const {
    check(!v.empty(), "encode: empty sequence");
    std::vector<NodeId> fwd, bwd;
    bilstm(g, b, "word_lstm_w", v, cfg_.word_hidden, &fwd, &bwd);
    std::vector<NodeId> h(v.size());
    for (size_t i = 0; i < v.size(); ++i) h[i] = g.concat({fwd[i], bwd[i]});
    return h;
}

std::vector<NodeId> OneNetModel::build_encoder(Graph& g, GraphBinder& b,
                                               const std::vector<std::string>& tokens,
                                               bool train, Rng& rng) const {
    check(!tokens.empty(), "empty utterance");
    std::vector<NodeId> v;
    v.reserve(tokens.size());
    for (const auto& t : tokens) v.push_back(embed_word(g, b, t, train, rng));

    const bool drop = train && cfg_.dropout_keep < 1.0;
    if (drop) {
        // one mask per layer, shared across positions, fresh per utterance
        Mat mask(cfg_.word_repr_dim(), 1);
        std::bernoulli_distribution coin(cfg_.dropout_keep);
        for (int i = 0; i < mask.rows(); ++i)
            mask(i, 0) = coin(rng) ? 1.0 / cfg_.dropout_keep : 0.0;
        for (auto& id : v) id = g.dropout(id, mask);
    }
    std::vector<NodeId> h = encode(g, b, v);
    if (drop) {
        Mat mask(cfg_.encoder_dim(), 1);
        std::bernoulli_distribution coin(cfg_.dropout_keep);
        for (int i = 0; i < mask.rows(); ++i)
            mask(i, 0) = coin(rng) ? 1.0 / cfg_.dropout_keep : 0.0;
        for (auto& id : h) id = g.dropout(id, mask);
    }
    return h;
}

NodeId OneNetModel::pooled_logits(Graph& g, GraphBinder& b, const std::string& prefix,
                                  const std::vector<NodeId>& h) const {
    NodeId pooled = h.size() == 1 ? h[0] : g.add(h);
    return g.add(g.matvec(b[prefix + "_W"], pooled), b[prefix + "_b"]);
}

NodeId OneNetModel::nll_head(Graph& g, GraphBinder& b, const std::string& prefix,
                             const std::vector<NodeId>& h, int gold) const {
    NodeId logits = pooled_logits(g, b, prefix, h);
    check(gold >= 0 && gold < g.node(logits).rows, prefix + " gold index out of range");
    return g.add(g.logsumexp(logits), g.neg(g.pick(logits, gold)));
}

NodeId OneNetModel::crf_loss_node(Graph& g, GraphBinder& b, const std::vector<NodeId>& emis,
                                  const std::vector<int>& gold) const {
    const int L = tags_.size();
    const int n = static_cast<int>(emis.size());
    NodeId T = b["crf_T"];
    const bool mult = cfg_.coupling == crf::Coupling::Multiplicative;

    // gold path score
    std::vector<NodeId> terms;
    int prev = tags_.start();
    for (int i = 0; i < n; ++i) {
        NodeId t = g.pick_entry(T, prev, gold[i]);
        NodeId e = g.pick(emis[i], gold[i]);
        if (mult)
            terms.push_back(g.mul(t, e));
        else {
            terms.push_back(t);
            terms.push_back(e);
        }
        prev = gold[i];
    }
    NodeId gold_score = terms.size() == 1 ? terms[0] : g.add(terms);

    // forward algorithm
    NodeId alpha;
    if (mult) {
        std::vector<NodeId> a0(L);
        for (int y = 0; y < L; ++y)
            a0[y] = g.mul(g.pick_entry(T, tags_.start(), y), g.pick(emis[0], y));
        alpha = g.stack(a0);
    } else {
        alpha = g.add(g.pick_row(T, tags_.start()), emis[0]);
    }
    for (int i = 1; i < n; ++i) {
        std::vector<NodeId> next(L);
        for (int y = 0; y < L; ++y) {
            NodeId tcol = g.slice(g.pick_col(T, y), 0, L);
            NodeId ey = g.pick(emis[i], y);
            // additive: e_i[y] is constant over prev, so it moves outside the
            // logsumexp; multiplicative couples it with each transition
            next[y] = mult ? g.logsumexp(g.add(alpha, g.mul_scalar(tcol, ey)))
                           : g.add(g.logsumexp(g.add(alpha, tcol)), ey);
        }
        alpha = g.stack(next);
    }
    NodeId log_z = g.logsumexp(alpha);
    return g.add(log_z, g.neg(gold_score));
}

LossBuild OneNetModel::build_losses(const Example& example, const LossMask& mask, bool train,
                                    Rng& rng) {
    LossBuild out;
    out.graph = std::make_unique<Graph>();
    out.binder = std::make_unique<GraphBinder>(*out.graph, store_);
    Graph& g = *out.graph;
    GraphBinder& b = *out.binder;

    std::vector<NodeId> h = build_encoder(g, b, example.tokens, train, rng);

    std::vector<NodeId> terms;
    if (mask.domain) {
        check(cfg_.domain_head, "domain loss requested but model has no domain head");
        check(!example.domain.empty(), "example missing domain annotation");
        auto it = std::find(domains_.begin(), domains_.end(), example.domain);
        check(it != domains_.end(), "domain '" + example.domain + "' not in model inventory");
        out.domain = nll_head(g, b, "domain", h, static_cast<int>(it - domains_.begin()));
        terms.push_back(out.domain);
    }
    if (mask.intent) {
        check(cfg_.intent_head, "intent loss requested but model has no intent head");
        check(!example.intent.empty(), "example missing intent annotation");
        auto it = std::find(intents_.begin(), intents_.end(), example.intent);
        check(it != intents_.end(), "intent '" + example.intent + "' not in model inventory");
        out.intent = nll_head(g, b, "intent", h, static_cast<int>(it - intents_.begin()));
        terms.push_back(out.intent);
    }
    if (mask.slot) {
        check(cfg_.slot_head, "slot loss requested but model has no slot head");
        check(example.slots.size() == example.tokens.size(),
              "example missing slot annotation");
        if (auto v = validate_bio(example.slots)) throw Error("invalid gold BIO: " + *v);
        std::vector<int> gold;
        for (const auto& l : example.slots) gold.push_back(tags_.label_index(l));
        std::vector<NodeId> emis(h.size());
        for (size_t i = 0; i < h.size(); ++i)
            emis[i] = g.add(g.matvec(b["slot_W"], h[i]), b["slot_b"]);
        out.slot = crf_loss_node(g, b, emis, gold);
        terms.push_back(out.slot);
    }
    check(!terms.empty(), "no active loss terms");
    out.total = terms.size() == 1 ? terms[0] : g.add(terms);
    return out;
}

Mat OneNetModel::emissions(const std::vector<std::string>& tokens) {
    check(cfg_.slot_head, "emissions: model has no slot head");
    Graph g;
    GraphBinder b(g, store_);
    Rng rng(0);  // unused in inference mode
    std::vector<NodeId> h = build_encoder(g, b, tokens, /*train=*/false, rng);
    std::vector<NodeId> emis(h.size());
    for (size_t i = 0; i < h.size(); ++i)
        emis[i] = g.add(g.matvec(b["slot_W"], h[i]), b["slot_b"]);
    g.forward();
    Mat out(tokens.size(), tags_.size());
    for (size_t i = 0; i < h.size(); ++i) out.row(i) = g.value(emis[i]).transpose();
    return out;
}

Prediction OneNetModel::predict(const std::vector<std::string>& tokens) {
    Graph g;
    GraphBinder b(g, store_);
    Rng rng(0);
    std::vector<NodeId> h = build_encoder(g, b, tokens, /*train=*/false, rng);
    NodeId dlog = cfg_.domain_head ? pooled_logits(g, b, "domain", h) : -1;
    NodeId ilog = cfg_.intent_head ? pooled_logits(g, b, "intent", h) : -1;
    std::vector<NodeId> emis;
    if (cfg_.slot_head) {
        emis.resize(h.size());
        for (size_t i = 0; i < h.size(); ++i)
            emis[i] = g.add(g.matvec(b["slot_W"], h[i]), b["slot_b"]);
    }
    g.forward();

    Prediction p;
    auto argmax = [&](NodeId id) {
        int best = 0;
        const Mat& v = g.value(id);
        for (int i = 1; i < v.rows(); ++i)
            if (v(i, 0) > v(best, 0)) best = i;
        return best;
    };
    if (dlog >= 0) p.domain = domains_[argmax(dlog)];
    if (ilog >= 0) p.intent = intents_[argmax(ilog)];
    if (!emis.empty()) {
        Mat e(tokens.size(), tags_.size());
        for (size_t i = 0; i < emis.size(); ++i) e.row(i) = g.value(emis[i]).transpose();
        std::vector<int> y = crf::viterbi(e, store_.get("crf_T").value, cfg_.coupling);
        for (int yi : y) p.slots.push_back(tags_.labels[yi]);
        p.slots = repair_bio(p.slots);  // decoder output is always well-formed chunks
    }
    return p;
}

size_t OneNetModel::load_pretrained(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open embedding file '" + path + "'");
    Mat& table = store_.get("word_emb").value;
    auto& wv = word_vocab_;
    size_t seeded = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        std::vector<double> vals;
        double x;
        while (ss >> x) vals.push_back(x);
        check(static_cast<int>(vals.size()) == cfg_.word_emb_dim,
              path + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(cfg_.word_emb_dim) + " values, got " +
                  std::to_string(vals.size()));
        auto it = wv.index.find(token);
        if (it == wv.index.end()) continue;
        for (int j = 0; j < cfg_.word_emb_dim; ++j) table(it->second, j) = vals[j];
        wv.pretrained[it->second] = true;
        ++seeded;
    }
    return seeded;
}

}  // namespace onenet
