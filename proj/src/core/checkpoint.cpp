#include "checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>
#include <zlib.h>

namespace onenet {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'O', 'N', 'E', 'N', 'E', 'T', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t get_u32(std::istream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    check(in.good(), "checkpoint: truncated file");
    return v;
}

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
    uint32_t len = get_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    check(in.good(), "checkpoint: truncated string");
    return s;
}

}  // namespace

void save_model(const OneNetModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    check(out.good(), "cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);

    const ModelConfig& c = model.config();
    json header;
    header["char_emb_dim"] = c.char_emb_dim;
    header["char_hidden"] = c.char_hidden;
    header["word_emb_dim"] = c.word_emb_dim;
    header["word_hidden"] = c.word_hidden;
    header["use_char"] = c.use_char;
    header["domain_head"] = c.domain_head;
    header["intent_head"] = c.intent_head;
    header["slot_head"] = c.slot_head;
    header["dropout_keep"] = c.dropout_keep;
    header["unk_prob"] = c.unk_prob;
    header["coupling"] = c.coupling == crf::Coupling::Additive ? "additive" : "multiplicative";
    header["domains"] = model.domains();
    header["intents"] = model.intents();
    json entity_types = json::array();
    // reconstruct entity types from the tag set (B-* order)
    for (const auto& l : model.tags().labels)
        if (l.size() > 2 && l[0] == 'B') entity_types.push_back(l.substr(2));
    header["entity_types"] = entity_types;
    header["num_words"] = model.word_vocab().size();
    header["num_chars"] = static_cast<int>(model.char_vocab().index.size());
    header["num_tensors"] = model.params().tensors().size();
    put_str(out, header.dump());

    const WordVocab& wv = model.word_vocab();
    for (int i = 0; i < wv.size(); ++i) {
        put_str(out, wv.words[static_cast<size_t>(i)]);
        put_u32(out, static_cast<uint32_t>(wv.train_count[static_cast<size_t>(i)]));
        out.put(wv.pretrained[static_cast<size_t>(i)] ? 1 : 0);
    }
    std::map<int, char32_t> by_index;
    for (const auto& [cp, idx] : model.char_vocab().index) by_index[idx] = cp;
    for (const auto& [idx, cp] : by_index) {
        put_u32(out, static_cast<uint32_t>(idx));
        put_u32(out, static_cast<uint32_t>(cp));
    }

    std::string manifest;
    for (const auto& t : model.params().tensors()) {
        put_str(out, t.name);
        put_u32(out, static_cast<uint32_t>(t.value.rows()));
        put_u32(out, static_cast<uint32_t>(t.value.cols()));
        const auto bytes = static_cast<size_t>(t.value.size()) * sizeof(double);
        out.write(reinterpret_cast<const char*>(t.value.data()),
                  static_cast<std::streamsize>(bytes));
        uint32_t crc = static_cast<uint32_t>(
            ::crc32(0L, reinterpret_cast<const Bytef*>(t.value.data()),
                    static_cast<uInt>(bytes)));
        char line[160];
        std::snprintf(line, sizeof(line), "%-24s %5ldx%-5ld crc32=%08x %s\n", t.name.c_str(),
                      static_cast<long>(t.value.rows()), static_cast<long>(t.value.cols()),
                      crc, partition_name(t.partition));
        manifest += line;
    }
    check(out.good(), "checkpoint write failed for '" + path + "'");
    out.close();

    std::ofstream mf(path + ".manifest.txt", std::ios::trunc);
    mf << "format onenet-checkpoint v" << kVersion << "\n" << manifest;
}

OneNetModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    check(in.good(), "cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    check(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          "'" + path + "' is not a checkpoint file");
    uint32_t version = get_u32(in);
    check(version == kVersion, "unsupported checkpoint version " + std::to_string(version));

    json header = json::parse(get_str(in));
    ModelConfig cfg;
    cfg.char_emb_dim = header.at("char_emb_dim");
    cfg.char_hidden = header.at("char_hidden");
    cfg.word_emb_dim = header.at("word_emb_dim");
    cfg.word_hidden = header.at("word_hidden");
    cfg.use_char = header.at("use_char");
    cfg.domain_head = header.at("domain_head");
    cfg.intent_head = header.at("intent_head");
    cfg.slot_head = header.at("slot_head");
    cfg.dropout_keep = header.at("dropout_keep");
    cfg.unk_prob = header.at("unk_prob");
    cfg.coupling = header.at("coupling") == "multiplicative" ? crf::Coupling::Multiplicative
                                                             : crf::Coupling::Additive;

    WordVocab wv;
    const int num_words = header.at("num_words");
    for (int i = 0; i < num_words; ++i) {
        std::string w = get_str(in);
        uint32_t count = get_u32(in);
        int flag = in.get();
        wv.index[w] = i;
        wv.words.push_back(std::move(w));
        wv.train_count.push_back(static_cast<int>(count));
        wv.pretrained.push_back(flag != 0);
    }
    CharVocab cv;
    const int num_chars = header.at("num_chars");
    for (int i = 0; i < num_chars; ++i) {
        uint32_t idx = get_u32(in);
        uint32_t cp = get_u32(in);
        cv.index[static_cast<char32_t>(cp)] = static_cast<int>(idx);
    }

    std::vector<std::string> entity_types =
        header.at("entity_types").get<std::vector<std::string>>();
    OneNetModel model(cfg, std::move(cv), std::move(wv),
                      header.at("domains").get<std::vector<std::string>>(),
                      header.at("intents").get<std::vector<std::string>>(),
                      cfg.slot_head ? TagSet::from_entity_types(entity_types) : TagSet{},
                      /*init_seed=*/0);

    const size_t num_tensors = header.at("num_tensors");
    check(num_tensors == model.params().tensors().size(),
          "checkpoint tensor count mismatch");
    for (auto& t : model.params().tensors()) {
        std::string name = get_str(in);
        check(name == t.name, "checkpoint tensor order mismatch: expected '" + t.name +
                                  "', found '" + name + "'");
        uint32_t rows = get_u32(in), cols = get_u32(in);
        check(static_cast<long>(rows) == t.value.rows() &&
                  static_cast<long>(cols) == t.value.cols(),
              "checkpoint shape mismatch for '" + name + "'");
        in.read(reinterpret_cast<char*>(t.value.data()),
                static_cast<std::streamsize>(t.value.size() * sizeof(double)));
        check(in.good(), "checkpoint: truncated tensor '" + name + "'");
    }
    return model;
}

}  // namespace onenet
