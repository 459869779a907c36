#include "config.hpp"

#include <fstream>
#include <sstream>

namespace onenet {

ModelConfig RunConfig::model_config() const {
    ModelConfig m;
    m.char_emb_dim = char_emb_dim;
    m.char_hidden = char_hidden;
    m.word_emb_dim = word_emb_dim;
    m.word_hidden = word_hidden;
    m.use_char = use_char;
    m.dropout_keep = hyper.dropout_keep;
    m.unk_prob = unk_prob;
    if (crf_score == "additive")
        m.coupling = crf::Coupling::Additive;
    else if (crf_score == "multiplicative")
        m.coupling = crf::Coupling::Multiplicative;
    else
        throw Error("crf_score must be 'additive' or 'multiplicative', got '" + crf_score +
                    "'");
    return m;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error("expected a boolean, got '" + v + "'");
}

std::array<int, 4> parse_stages(const std::string& v) {
    std::array<int, 4> out{};
    std::istringstream ss(v);
    std::string part;
    size_t i = 0;
    while (std::getline(ss, part, ',')) {
        check(i < 4, "stage_epochs needs exactly 4 comma-separated integers");
        out[i++] = std::stoi(trim(part));
    }
    check(i == 4, "stage_epochs needs exactly 4 comma-separated integers");
    return out;
}

}  // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "train") c.train_path = value;
    else if (key == "tune") c.tune_path = value;
    else if (key == "test") c.test_path = value;
    else if (key == "schema") c.schema_path = value;
    else if (key == "embeddings") c.embeddings_path = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "variant") c.variant = value;
    else if (key == "seed") c.hyper.seed = std::stoull(value);
    else if (key == "learning_rate") c.hyper.learning_rate = std::stod(value);
    else if (key == "beta1") c.hyper.beta1 = std::stod(value);
    else if (key == "beta2") c.hyper.beta2 = std::stod(value);
    else if (key == "epsilon") c.hyper.epsilon = std::stod(value);
    else if (key == "dropout_keep") c.hyper.dropout_keep = std::stod(value);
    else if (key == "stage_epochs") c.hyper.stage_epochs = parse_stages(value);
    else if (key == "patience") c.hyper.patience = std::stoi(value);
    else if (key == "grad_clip") c.hyper.grad_clip = std::stod(value);
    else if (key == "unk_prob") c.unk_prob = std::stod(value);
    else if (key == "crf_score") c.crf_score = value;
    else if (key == "use_char") c.use_char = parse_bool(value);
    else if (key == "char_emb_dim") c.char_emb_dim = std::stoi(value);
    else if (key == "char_hidden") c.char_hidden = std::stoi(value);
    else if (key == "word_emb_dim") c.word_emb_dim = std::stoi(value);
    else if (key == "word_hidden") c.word_hidden = std::stoi(value);
    else if (key == "threads") c.threads = std::stoi(value);
    else throw Error("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open config file '" + path + "'");
    RunConfig c;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        check(eq != std::string::npos,
              path + ":" + std::to_string(line_no) + ": expected key = value");
        try {
            apply_override(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const std::exception& ex) {
            throw Error(path + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return c;
}

std::string config_to_string(const RunConfig& c) {
    std::ostringstream out;
    out << "train = " << c.train_path << "\n";
    out << "tune = " << c.tune_path << "\n";
    out << "test = " << c.test_path << "\n";
    if (!c.schema_path.empty()) out << "schema = " << c.schema_path << "\n";
    if (!c.embeddings_path.empty()) out << "embeddings = " << c.embeddings_path << "\n";
    out << "out_dir = " << c.out_dir << "\n";
    out << "variant = " << c.variant << "\n";
    out << "seed = " << c.hyper.seed << "\n";
    out << "learning_rate = " << c.hyper.learning_rate << "\n";
    out << "beta1 = " << c.hyper.beta1 << "\n";
    out << "beta2 = " << c.hyper.beta2 << "\n";
    out << "epsilon = " << c.hyper.epsilon << "\n";
    out << "dropout_keep = " << c.hyper.dropout_keep << "\n";
    out << "stage_epochs = " << c.hyper.stage_epochs[0] << "," << c.hyper.stage_epochs[1]
        << "," << c.hyper.stage_epochs[2] << "," << c.hyper.stage_epochs[3] << "\n";
    out << "patience = " << c.hyper.patience << "\n";
    out << "grad_clip = " << c.hyper.grad_clip << "\n";
    out << "unk_prob = " << c.unk_prob << "\n";
    out << "crf_score = " << c.crf_score << "\n";
    out << "use_char = " << (c.use_char ? "true" : "false") << "\n";
    out << "char_emb_dim = " << c.char_emb_dim << "\n";
    out << "char_hidden = " << c.char_hidden << "\n";
    out << "word_emb_dim = " << c.word_emb_dim << "\n";
    out << "word_hidden = " << c.word_hidden << "\n";
    out << "threads = " << c.threads << "\n";
    return out.str();
}

}  // namespace onenet
