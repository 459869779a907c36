#include "data.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace onenet {

using nlohmann::json;

int CorpusSchema::domain_index(const std::string& d) const {
    auto it = std::find(domains.begin(), domains.end(), d);
    check(it != domains.end(), "unknown domain '" + d + "'");
    return static_cast<int>(it - domains.begin());
}

int CorpusSchema::intent_index(const std::string& i) const {
    auto it = std::find(intents.begin(), intents.end(), i);
    check(it != intents.end(), "unknown intent '" + i + "'");
    return static_cast<int>(it - intents.begin());
}

TagSet TagSet::from_entity_types(const std::vector<std::string>& entity_types) {
    TagSet t;
    for (const auto& e : entity_types) {
        t.labels.push_back("B-" + e);
        t.labels.push_back("I-" + e);
    }
    t.labels.push_back("O");
    for (size_t i = 0; i < t.labels.size(); ++i) t.index[t.labels[i]] = static_cast<int>(i);
    return t;
}

int TagSet::label_index(const std::string& l) const {
    auto it = index.find(l);
    check(it != index.end(), "unknown slot label '" + l + "'");
    return it->second;
}

std::optional<std::string> validate_bio(const std::vector<std::string>& labels) {
    std::string prev_type;  // empty when previous label is O / none
    for (size_t i = 0; i < labels.size(); ++i) {
        const std::string& l = labels[i];
        if (l == "O") {
            prev_type.clear();
            continue;
        }
        if (l.size() < 3 || (l[0] != 'B' && l[0] != 'I') || l[1] != '-')
            return "malformed label '" + l + "' at index " + std::to_string(i);
        std::string type = l.substr(2);
        if (l[0] == 'I' && type != prev_type)
            return "I-" + type + " at index " + std::to_string(i) +
                   " not preceded by B-" + type + " or I-" + type;
        prev_type = type;
    }
    return std::nullopt;
}

std::vector<std::string> repair_bio(const std::vector<std::string>& labels) {
    std::vector<std::string> out = labels;
    std::string prev_type;
    for (auto& l : out) {
        if (l == "O" || l.size() < 3) {
            prev_type.clear();
            continue;
        }
        std::string type = l.substr(2);
        if (l[0] == 'I' && type != prev_type) l[0] = 'B';
        prev_type = type;
    }
    return out;
}

std::string example_to_json(const Example& e) {
    json j;
    j["tokens"] = e.tokens;
    j["domain"] = e.domain;
    j["intent"] = e.intent;
    j["slots"] = e.slots;
    return j.dump();
}

Example example_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& ex) {
        throw Error(std::string("invalid JSON: ") + ex.what());
    }
    check(j.is_object(), "expected a JSON object");
    Example e;
    for (auto& [key, _] : j.items())
        check(key == "tokens" || key == "domain" || key == "intent" || key == "slots",
              "unknown field '" + key + "'");
    e.tokens = j.at("tokens").get<std::vector<std::string>>();
    e.domain = j.at("domain").get<std::string>();
    e.intent = j.at("intent").get<std::string>();
    e.slots = j.at("slots").get<std::vector<std::string>>();
    check(!e.tokens.empty(), "empty token array");
    for (const auto& t : e.tokens) check(!t.empty(), "empty token");
    check(e.tokens.size() == e.slots.size(),
          "slots length " + std::to_string(e.slots.size()) + " != tokens length " +
              std::to_string(e.tokens.size()));
    if (auto v = validate_bio(e.slots)) throw Error("invalid BIO: " + *v);
    return e;
}

CorpusSchema infer_schema(const std::vector<Example>& examples) {
    CorpusSchema s;
    std::set<std::string> seen_d, seen_i, seen_e;
    for (const auto& e : examples) {
        if (seen_d.insert(e.domain).second) s.domains.push_back(e.domain);
        if (seen_i.insert(e.intent).second) s.intents.push_back(e.intent);
        auto& di = s.domain_intents[e.domain];
        if (std::find(di.begin(), di.end(), e.intent) == di.end()) di.push_back(e.intent);
        for (const auto& l : e.slots) {
            if (l == "O") continue;
            std::string type = l.substr(2);
            if (seen_e.insert(type).second) s.entity_types.push_back(type);
            auto& de = s.domain_entities[e.domain];
            if (std::find(de.begin(), de.end(), type) == de.end()) de.push_back(type);
        }
    }
    return s;
}

static CorpusSchema schema_from_json(const json& j) {
    CorpusSchema s;
    s.domains = j.at("domains").get<std::vector<std::string>>();
    s.intents = j.at("intents").get<std::vector<std::string>>();
    s.entity_types = j.at("entity_types").get<std::vector<std::string>>();
    if (j.contains("domain_intents"))
        s.domain_intents = j.at("domain_intents").get<std::map<std::string, std::vector<std::string>>>();
    if (j.contains("domain_entities"))
        s.domain_entities = j.at("domain_entities").get<std::map<std::string, std::vector<std::string>>>();
    return s;
}

CorpusSchema parse_schema(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open schema file '" + path + "'");
    json j = json::parse(in);
    return schema_from_json(j);
}

void write_schema(const std::string& path, const CorpusSchema& s) {
    json j;
    j["domains"] = s.domains;
    j["intents"] = s.intents;
    j["entity_types"] = s.entity_types;
    j["domain_intents"] = s.domain_intents;
    j["domain_entities"] = s.domain_entities;
    std::ofstream out(path, std::ios::trunc);
    check(out.good(), "cannot write schema file '" + path + "'");
    out << j.dump(2) << "\n";
}

Corpus parse_corpus(const std::string& path) {
    std::string sidecar = path + ".schema.json";
    if (std::filesystem::exists(sidecar)) return parse_corpus(path, sidecar);
    return parse_corpus(path, "");
}

Corpus parse_corpus(const std::string& path, const std::string& schema_path) {
    std::ifstream in(path);
    check(in.good(), "cannot open corpus file '" + path + "'");
    Corpus c;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            c.examples.push_back(example_from_json(line));
        } catch (const std::exception& ex) {
            throw Error(path + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
    check(!c.examples.empty(), path + ": no examples");
    c.schema = schema_path.empty() ? infer_schema(c.examples) : parse_schema(schema_path);
    // every label must resolve against the schema
    for (size_t i = 0; i < c.examples.size(); ++i) {
        const Example& e = c.examples[i];
        try {
            c.schema.domain_index(e.domain);
            c.schema.intent_index(e.intent);
            for (const auto& l : e.slots)
                if (l != "O")
                    check(std::find(c.schema.entity_types.begin(), c.schema.entity_types.end(),
                                    l.substr(2)) != c.schema.entity_types.end(),
                          "unknown entity type '" + l.substr(2) + "'");
        } catch (const std::exception& ex) {
            throw Error(path + ": example " + std::to_string(i + 1) + ": " + ex.what());
        }
    }
    return c;
}

void write_corpus(const std::string& path, const std::vector<Example>& examples) {
    std::ofstream out(path, std::ios::trunc);
    check(out.good(), "cannot write corpus file '" + path + "'");
    for (const auto& e : examples) out << example_to_json(e) << "\n";
}

std::vector<char32_t> utf8_codepoints(const std::string& s) {
    std::vector<char32_t> cps;
    size_t i = 0;
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 1;
        if (i + len > s.size()) len = 1;
        char32_t cp = 0;
        if (len == 1) {
            cp = b;
        } else {
            cp = b & (0x7F >> len);
            for (int k = 1; k < len; ++k) {
                unsigned char cb = static_cast<unsigned char>(s[i + k]);
                if ((cb & 0xC0) != 0x80) {
                    len = 1;
                    cp = b;
                    break;
                }
                cp = (cp << 6) | (cb & 0x3F);
            }
        }
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

int CharVocab::lookup(char32_t c) const {
    auto it = index.find(c);
    return it == index.end() ? kUnk : it->second;
}

int WordVocab::lookup(const std::string& w) const {
    auto it = index.find(w);
    if (it != index.end()) return it->second;
    it = index.find(lowercase(w));
    return it == index.end() ? kUnk : it->second;
}

std::pair<CharVocab, WordVocab> build_vocab(const std::vector<Example>& train) {
    check(!train.empty(), "build_vocab: empty training set");
    CharVocab cv;
    WordVocab wv;
    wv.words.push_back("<unk>");
    wv.index["<unk>"] = 0;
    wv.pretrained.push_back(false);
    wv.train_count.push_back(0);
    int next_char = 1;
    for (const auto& e : train) {
        for (const auto& w : e.tokens) {
            auto it = wv.index.find(w);
            if (it == wv.index.end()) {
                wv.index[w] = static_cast<int>(wv.words.size());
                wv.words.push_back(w);
                wv.pretrained.push_back(false);
                wv.train_count.push_back(1);
            } else {
                ++wv.train_count[it->second];
            }
            for (char32_t c : utf8_codepoints(w))
                if (!cv.index.count(c)) cv.index[c] = next_char++;
        }
    }
    return {cv, wv};
}

}  // namespace onenet
