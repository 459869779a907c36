#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "types.hpp"

namespace onenet {

// One annotated utterance: pre-tokenized words plus the gold triple.
struct Example {
    std::vector<std::string> tokens;
    std::string domain;
    std::string intent;
    std::vector<std::string> slots;  // BIO labels, one per token
};

// Label inventories. The joint model uses the flat unions; the pipeline and
// oracle variants additionally use the per-domain mappings.
struct CorpusSchema {
    std::vector<std::string> domains;
    std::vector<std::string> intents;
    std::vector<std::string> entity_types;
    std::map<std::string, std::vector<std::string>> domain_intents;
    std::map<std::string, std::vector<std::string>> domain_entities;

    int domain_index(const std::string& d) const;
    int intent_index(const std::string& i) const;
};

// BIO label inventory with a stable index order plus the internal START
// state used by the CRF transition matrix.
struct TagSet {
    std::vector<std::string> labels;  // B-e, I-e per entity type, then O
    std::unordered_map<std::string, int> index;

    static TagSet from_entity_types(const std::vector<std::string>& entity_types);
    int label_index(const std::string& l) const;
    int size() const { return static_cast<int>(labels.size()); }
    int start() const { return size(); }
    int outside() const { return label_index("O"); }
};

// Returns std::nullopt when valid, else a description of the first
// violation (I-e not preceded by B-e/I-e of the same type, or a malformed
// label).
std::optional<std::string> validate_bio(const std::vector<std::string>& labels);

// Rewrites orphan I-e labels to B-e so decoder output always chunks.
std::vector<std::string> repair_bio(const std::vector<std::string>& labels);

struct Corpus {
    std::vector<Example> examples;
    CorpusSchema schema;
};

// One JSON object per line: {"tokens": [...], "domain": ..., "intent": ...,
// "slots": [...]}. A sidecar schema file (same path + ".schema.json"), when
// present, fixes the inventories; otherwise they are inferred from the data.
Corpus parse_corpus(const std::string& path);
Corpus parse_corpus(const std::string& path, const std::string& schema_path);
void write_corpus(const std::string& path, const std::vector<Example>& examples);
void write_schema(const std::string& path, const CorpusSchema& schema);
CorpusSchema parse_schema(const std::string& path);
CorpusSchema infer_schema(const std::vector<Example>& examples);

std::string example_to_json(const Example& e);
Example example_from_json(const std::string& line);

// Character inventory with a reserved UNK slot at index 0.
struct CharVocab {
    std::unordered_map<char32_t, int> index;
    int size() const { return static_cast<int>(index.size()) + 1; }
    int lookup(char32_t c) const;
    static constexpr int kUnk = 0;
};

struct WordVocab {
    std::vector<std::string> words;  // index order; UNK at 0
    std::unordered_map<std::string, int> index;
    std::vector<bool> pretrained;  // per word, whether a pretrained vector seeded it
    std::vector<int> train_count;

    int size() const { return static_cast<int>(words.size()); }
    // Case-sensitive lookup with a lowercase fallback; unseen words map to
    // UNK.
    int lookup(const std::string& w) const;
    static constexpr int kUnk = 0;
};

// Deterministic construction from the training split only, index order by
// first occurrence.
std::pair<CharVocab, WordVocab> build_vocab(const std::vector<Example>& train);

// Decodes UTF-8 into code points; invalid bytes become one code point each.
std::vector<char32_t> utf8_codepoints(const std::string& s);

std::string lowercase(const std::string& s);

}  // namespace onenet
