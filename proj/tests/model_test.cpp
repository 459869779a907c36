#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/model.hpp"

using namespace onenet;
using namespace onenet::ag;

namespace {

std::vector<Example> tiny_train() {
    return {
        {{"wake", "me", "at", "seven"}, "d0", "i0", {"O", "O", "O", "B-a"}},
        {{"move", "lunch", "to", "noon"}, "d1", "i1", {"O", "B-b", "O", "B-a"}},
        {{"text", "sam", "now"}, "d2", "i2", {"O", "B-c", "O"}},
    };
}

OneNetModel tiny_model(ModelConfig cfg = {}, uint64_t seed = 5) {
    cfg.char_emb_dim = 4;
    cfg.char_hidden = 3;
    cfg.word_emb_dim = 6;
    cfg.word_hidden = 5;
    auto [cv, wv] = build_vocab(tiny_train());
    return OneNetModel(cfg, std::move(cv), std::move(wv), {"d0", "d1", "d2"},
                       {"i0", "i1", "i2"}, TagSet::from_entity_types({"a", "b", "c"}), seed);
}

}  // namespace

TEST_CASE("lstm step: zero state and zero input is a fixed point") {
    Graph g;
    const int in = 3, hidden = 4;
    NodeId x = g.input(Mat::Zero(in, 1));
    NodeId h0 = g.input(Mat::Zero(hidden, 1));
    NodeId c0 = g.input(Mat::Zero(hidden, 1));
    NodeId W = g.input(Mat::Zero(4 * hidden, in + hidden));
    NodeId b = g.input(Mat::Zero(4 * hidden, 1));
    LstmStep s = build_lstm_step(g, x, h0, c0, W, b);
    g.forward();
    CHECK(g.value(s.h).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(g.value(s.c).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("lstm step: saturated forget gate carries the cell state") {
    Graph g;
    const int in = 2, hidden = 3;
    Mat c_prev(hidden, 1);
    c_prev << 0.7, -1.2, 0.3;
    Mat bias = Mat::Zero(4 * hidden, 1);
    // gate order input/forget/candidate/output; drive the forget gate to 1
    // and the input gate to 0 so c_new == c_prev
    for (int i = 0; i < hidden; ++i) {
        bias(i) = -30.0;           // input gate -> 0
        bias(hidden + i) = 30.0;   // forget gate -> 1
    }
    NodeId s_h = -1, s_c = -1;
    NodeId x = g.input(Mat::Zero(in, 1));
    NodeId h0 = g.input(Mat::Zero(hidden, 1));
    NodeId c0 = g.input(c_prev);
    NodeId W = g.input(Mat::Zero(4 * hidden, in + hidden));
    NodeId b = g.input(bias);
    LstmStep s = build_lstm_step(g, x, h0, c0, W, b);
    s_h = s.h;
    s_c = s.c;
    g.forward();
    CHECK((g.value(s_c) - c_prev).cwiseAbs().maxCoeff() < 1e-9);
    // output gate sits at 0.5, so h = 0.5 * tanh(c)
    for (int i = 0; i < hidden; ++i)
        CHECK(g.value(s_h)(i) == doctest::Approx(0.5 * std::tanh(c_prev(i))));
}

TEST_CASE("lstm step rejects malformed weight shapes") {
    Graph g;
    NodeId x = g.input(Mat::Zero(3, 1));
    NodeId h0 = g.input(Mat::Zero(4, 1));
    NodeId c0 = g.input(Mat::Zero(4, 1));
    NodeId W_bad = g.input(Mat::Zero(15, 7));  // not 4H rows
    NodeId b = g.input(Mat::Zero(16, 1));
    CHECK_THROWS_AS(build_lstm_step(g, x, h0, c0, W_bad, b), Error);
}

TEST_CASE("default dimensions: word representation 150, encoder state 200") {
    ModelConfig cfg;
    CHECK(cfg.word_repr_dim() == 150);
    CHECK(cfg.encoder_dim() == 200);
    cfg.use_char = false;
    CHECK(cfg.word_repr_dim() == 100);

    auto [cv, wv] = build_vocab(tiny_train());
    OneNetModel model(ModelConfig{}, std::move(cv), std::move(wv), {"d0"}, {"i0"},
                      TagSet::from_entity_types({"a"}), 1);
    Graph g;
    GraphBinder b(g, model.params());
    Rng rng(1);
    NodeId v = model.embed_word(g, b, "wake", false, rng);
    CHECK(g.node(v).rows == 150);
    std::vector<NodeId> h = model.encode(g, b, {v, v, v});
    REQUIRE(h.size() == 3);
    for (NodeId id : h) CHECK(g.node(id).rows == 200);
}

TEST_CASE("joint loss equals the sum of its three parts") {
    OneNetModel model = tiny_model();
    Rng rng(3);
    for (const Example& e : tiny_train()) {
        LossBuild all = model.build_losses(e, LossMask{}, false, rng);
        all.graph->forward();
        double total = all.graph->scalar(all.total);
        double parts = all.graph->scalar(all.domain) + all.graph->scalar(all.intent) +
                       all.graph->scalar(all.slot);
        CHECK(std::abs(total - parts) < 1e-12);

        // the same three terms built in isolation agree too
        double separate = 0.0;
        for (LossMask m : {LossMask{true, false, false}, LossMask{false, true, false},
                           LossMask{false, false, true}}) {
            LossBuild one = model.build_losses(e, m, false, rng);
            one.graph->forward();
            separate += one.graph->scalar(one.total);
        }
        CHECK(std::abs(total - separate) < 1e-12);
    }
}

TEST_CASE("masked-out heads receive no gradient") {
    OneNetModel model = tiny_model();
    Rng rng(3);
    Example e = tiny_train()[0];
    model.params().zero_grads();
    LossBuild b = model.build_losses(e, LossMask{false, true, false}, false, rng);
    b.graph->forward();
    b.graph->backward(b.total);
    b.binder->accumulate_grads();
    CHECK(b.domain == -1);
    CHECK(b.slot == -1);
    CHECK(model.params().get("domain_W").grad.cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.params().get("slot_W").grad.cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.params().get("crf_T").grad.cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.params().get("intent_W").grad.cwiseAbs().maxCoeff() > 0.0);
    // shared encoder still learns from the intent loss
    CHECK(model.params().get("word_lstm_wf_W").grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("encoder is bidirectional: the last token reaches position 0") {
    OneNetModel model = tiny_model();
    Graph g;
    GraphBinder bind(g, model.params());
    Rng rng(1);
    auto first_state = [&](const std::vector<std::string>& toks) {
        Graph gg;
        GraphBinder bb(gg, model.params());
        std::vector<NodeId> v;
        for (const auto& t : toks) v.push_back(model.embed_word(gg, bb, t, false, rng));
        std::vector<NodeId> h = model.encode(gg, bb, v);
        gg.forward();
        return Mat(gg.value(h[0]));
    };
    Mat a = first_state({"wake", "me", "at", "seven"});
    Mat b = first_state({"wake", "me", "at", "noon"});
    CHECK((a - b).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("character path distinguishes unseen inflections") {
    OneNetModel model = tiny_model();
    Graph g;
    GraphBinder bind(g, model.params());
    Rng rng(1);
    // both words are out of vocabulary; only their spellings differ
    NodeId a = model.embed_word(g, bind, "walk", false, rng);
    NodeId b = model.embed_word(g, bind, "walking", false, rng);
    g.forward();
    CHECK((g.value(a) - g.value(b)).cwiseAbs().maxCoeff() > 1e-8);
    // the shared suffix keeps the word-embedding block identical (both UNK)
    const int wdim = model.config().word_emb_dim;
    Mat wa = g.value(a).bottomRows(wdim);
    Mat wb = g.value(b).bottomRows(wdim);
    CHECK((wa - wb).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("without the char path, unseen words collapse to one vector") {
    ModelConfig cfg;
    cfg.use_char = false;
    OneNetModel model = tiny_model(cfg);
    Graph g;
    GraphBinder bind(g, model.params());
    Rng rng(1);
    NodeId a = model.embed_word(g, bind, "walk", false, rng);
    NodeId b = model.embed_word(g, bind, "walking", false, rng);
    g.forward();
    CHECK((g.value(a) - g.value(b)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("predictions stay inside the inventories and BIO-valid") {
    OneNetModel model = tiny_model();
    for (const auto& toks : std::vector<std::vector<std::string>>{
             {"wake", "me"}, {"totally", "unseen", "tokens", "here"}, {"noon"}}) {
        Prediction p = model.predict(toks);
        CHECK(std::find(model.domains().begin(), model.domains().end(), p.domain) !=
              model.domains().end());
        CHECK(std::find(model.intents().begin(), model.intents().end(), p.intent) !=
              model.intents().end());
        REQUIRE(p.slots.size() == toks.size());
        CHECK(!validate_bio(p.slots).has_value());
    }
    CHECK_THROWS_AS(model.predict({}), Error);
    CHECK_THROWS_AS(model.predict({""}), Error);
}

TEST_CASE("emission matrix shape and decode consistency") {
    OneNetModel model = tiny_model();
    std::vector<std::string> toks{"wake", "sam", "now"};
    Mat em = model.emissions(toks);
    CHECK(em.rows() == 3);
    CHECK(em.cols() == model.tags().size());
    // predict() decodes these emissions with the stored transitions, then
    // repairs any orphan I- labels into chunk starts
    Prediction p = model.predict(toks);
    std::vector<int> decoded = crf::viterbi(em, model.params().get("crf_T").value);
    std::vector<std::string> expect;
    for (int yi : decoded) expect.push_back(model.tags().labels[static_cast<size_t>(yi)]);
    CHECK(p.slots == repair_bio(expect));
}

TEST_CASE("dropout masks only perturb training-time builds") {
    OneNetModel model = tiny_model();
    model.config().dropout_keep = 0.5;
    Example e = tiny_train()[0];
    auto loss_value = [&](bool train, uint64_t seed) {
        Rng rng(seed);
        LossBuild b = model.build_losses(e, LossMask{}, train, rng);
        b.graph->forward();
        return b.graph->scalar(b.total);
    };
    CHECK(loss_value(false, 1) == loss_value(false, 2));       // inference is mask-free
    CHECK(loss_value(true, 1) != loss_value(false, 1));        // training applies masks
    CHECK(loss_value(true, 7) == loss_value(true, 7));         // seeded, reproducible
}

TEST_CASE("pretrained vectors seed matching rows") {
    namespace fs = std::filesystem;
    OneNetModel model = tiny_model();
    std::string path =
        (fs::temp_directory_path() / "model_test_vectors.txt").string();
    {
        std::ofstream out(path);
        out << "wake 1 2 3 4 5 6\n";
        out << "unknownword 9 9 9 9 9 9\n";
    }
    size_t seeded = model.load_pretrained(path);
    CHECK(seeded == 1);
    int row = model.word_vocab().lookup("wake");
    CHECK(model.params().get("word_emb").value(row, 0) == doctest::Approx(1.0));
    CHECK(model.word_vocab().pretrained[static_cast<size_t>(row)]);
    {
        std::ofstream out(path);
        out << "wake 1 2\n";  // wrong dimension
    }
    CHECK_THROWS_WITH_AS(model.load_pretrained(path), doctest::Contains(":1"), Error);
    fs::remove(path);
}
