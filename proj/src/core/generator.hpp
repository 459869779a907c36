#pragma once

#include <map>
#include <string>
#include <vector>

#include "data.hpp"

namespace onenet {

// Lexicon backing a template placeholder. Entity lexicons produce a labeled
// span (type = lexicon name); non-entity lexicons (verb alternations) label
// O. Values may themselves contain {placeholder}s; nested expansions keep
// the outer label. `test_only` values never appear in train/tune; the test
// split draws from them with probability `test_unseen_prob`.
struct LexiconSpec {
    std::vector<std::string> values;
    std::vector<std::string> test_only;
    double test_unseen_prob = 0.35;
    bool is_entity = true;
};

struct TemplateSpec {
    std::string intent;
    std::string pattern;  // tokens separated by spaces, {name} placeholders
    double weight = 1.0;
};

struct DomainSpec {
    std::string name;
    std::vector<TemplateSpec> templates;
};

struct SyntheticSpec {
    uint64_t seed = 1;
    int train_count = 1000;  // per domain
    int tune_count = 100;
    int test_count = 500;
    int max_resample = 500;  // attempts to keep splits disjoint
    std::vector<DomainSpec> domains;
    std::map<std::string, LexiconSpec> lexicons;
};

struct GeneratedCorpus {
    std::vector<Example> train;
    std::vector<Example> tune;
    std::vector<Example> test;
    CorpusSchema schema;
};

// Seeded and reproducible; splits are pairwise disjoint as token sequences
// and every example passes BIO validation.
GeneratedCorpus generate_synthetic(const SyntheticSpec& spec);

// The desk-scale five-domain benchmark spec used by the CLI when no spec
// file is given. Shared verb classes and entity lexicons across domains,
// morphologically regular held-out slot values, and calendar-flavored
// message bodies in the communication domain.
SyntheticSpec default_spec();

SyntheticSpec spec_from_json_file(const std::string& path);
std::string spec_to_json(const SyntheticSpec& spec);

// Writes train/tune/test JSONL files plus schema sidecars into out_dir.
// Returns the generated corpus.
GeneratedCorpus write_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

}  // namespace onenet
