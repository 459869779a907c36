#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/config.hpp"

using namespace onenet;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = (fs::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("defaults mirror the documented hyperparameters") {
    RunConfig c;
    CHECK(c.hyper.learning_rate == 4e-4);
    CHECK(c.hyper.beta1 == 0.9);
    CHECK(c.hyper.beta2 == 0.999);
    CHECK(c.hyper.epsilon == 1e-8);
    CHECK(c.hyper.dropout_keep == 0.4);
    CHECK(c.hyper.stage_epochs == std::array<int, 4>{3, 3, 3, 20});
    CHECK(c.hyper.patience == 5);
    CHECK(c.char_emb_dim == 25);
    CHECK(c.char_hidden == 25);
    CHECK(c.word_emb_dim == 100);
    CHECK(c.word_hidden == 100);
    CHECK(c.use_char);
    CHECK(c.unk_prob == 0.1);
    CHECK(c.crf_score == "additive");
    CHECK(c.variant == "joint");
}

TEST_CASE("config file parsing with comments and blanks") {
    std::string path = write_temp("config_test_ok.cfg",
                                  "# run setup\n"
                                  "train = data/train.jsonl\n"
                                  "\n"
                                  "seed = 9\n"
                                  "learning_rate = 0.001\n"
                                  "stage_epochs = 1, 2, 3, 4\n"
                                  "use_char = false\n"
                                  "variant = pipeline\n");
    RunConfig c = parse_config_file(path);
    fs::remove(path);
    CHECK(c.train_path == "data/train.jsonl");
    CHECK(c.hyper.seed == 9);
    CHECK(c.hyper.learning_rate == 0.001);
    CHECK(c.hyper.stage_epochs == std::array<int, 4>{1, 2, 3, 4});
    CHECK(!c.use_char);
    CHECK(c.variant == "pipeline");
}

TEST_CASE("file errors carry line numbers") {
    std::string path = write_temp("config_test_bad.cfg", "train = x\nnonsense line\n");
    CHECK_THROWS_WITH_AS(parse_config_file(path), doctest::Contains(":2"), Error);
    fs::remove(path);

    path = write_temp("config_test_badkey.cfg", "no_such_key = 1\n");
    CHECK_THROWS_WITH_AS(parse_config_file(path), doctest::Contains("no_such_key"), Error);
    fs::remove(path);

    CHECK_THROWS_AS(parse_config_file("/no/such/file.cfg"), Error);
}

TEST_CASE("overrides are validated") {
    RunConfig c;
    apply_override(c, "seed", "77");
    CHECK(c.hyper.seed == 77);
    apply_override(c, "dropout_keep", "0.7");
    CHECK(c.hyper.dropout_keep == 0.7);
    apply_override(c, "crf_score", "multiplicative");
    CHECK(c.model_config().coupling == crf::Coupling::Multiplicative);
    CHECK_THROWS_AS(apply_override(c, "learningrate", "0.1"), Error);
    CHECK_THROWS_AS(apply_override(c, "stage_epochs", "1,2,3"), Error);
    CHECK_THROWS_AS(apply_override(c, "stage_epochs", "1,2,3,4,5"), Error);
    CHECK_THROWS_AS(apply_override(c, "use_char", "maybe"), Error);
    apply_override(c, "crf_score", "bogus");
    CHECK_THROWS_AS(c.model_config(), Error);  // checked when the model config is built
}

TEST_CASE("round trip through config_to_string") {
    RunConfig a;
    a.train_path = "t.jsonl";
    a.tune_path = "u.jsonl";
    a.test_path = "s.jsonl";
    a.hyper.seed = 123;
    a.hyper.stage_epochs = {0, 0, 0, 7};
    a.word_hidden = 50;
    a.variant = "oracle";
    std::string path = write_temp("config_test_rt.cfg", config_to_string(a));
    RunConfig b = parse_config_file(path);
    fs::remove(path);
    CHECK(b.train_path == a.train_path);
    CHECK(b.hyper.seed == a.hyper.seed);
    CHECK(b.hyper.stage_epochs == a.hyper.stage_epochs);
    CHECK(b.word_hidden == 50);
    CHECK(b.variant == "oracle");
    CHECK(config_to_string(b) == config_to_string(a));
}

TEST_CASE("model_config projects the model-facing keys") {
    RunConfig c;
    c.char_emb_dim = 7;
    c.word_hidden = 33;
    c.use_char = false;
    c.unk_prob = 0.05;
    c.hyper.dropout_keep = 0.9;
    ModelConfig m = c.model_config();
    CHECK(m.char_emb_dim == 7);
    CHECK(m.word_hidden == 33);
    CHECK(!m.use_char);
    CHECK(m.unk_prob == 0.05);
    CHECK(m.dropout_keep == 0.9);
    CHECK(m.coupling == crf::Coupling::Additive);
}
