#include "generator.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace onenet {

using nlohmann::json;

namespace {

enum class Split { Train, Tune, Test };

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

bool is_placeholder(const std::string& tok) {
    return tok.size() >= 3 && tok.front() == '{' && tok.back() == '}';
}

class Sampler {
public:
    Sampler(const SyntheticSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

    Example sample(const DomainSpec& dom, Split split) {
        std::vector<double> weights;
        for (const auto& t : dom.templates) weights.push_back(t.weight);
        std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
        const TemplateSpec& tpl = dom.templates[pick(rng_)];

        Example e;
        e.domain = dom.name;
        e.intent = tpl.intent;
        for (const auto& tok : split_ws(tpl.pattern)) {
            if (!is_placeholder(tok)) {
                e.tokens.push_back(tok);
                e.slots.push_back("O");
                continue;
            }
            std::string name = tok.substr(1, tok.size() - 2);
            const LexiconSpec& lex = find_lexicon(name);
            std::vector<std::string> expansion = expand(name, split);
            for (size_t i = 0; i < expansion.size(); ++i) {
                e.tokens.push_back(expansion[i]);
                e.slots.push_back(!lex.is_entity ? "O"
                                  : i == 0       ? "B-" + name
                                                 : "I-" + name);
            }
        }
        check(!e.tokens.empty(), "template expanded to an empty utterance: '" +
                                     tpl.pattern + "'");
        return e;
    }

private:
    const LexiconSpec& find_lexicon(const std::string& name) {
        auto it = spec_.lexicons.find(name);
        check(it != spec_.lexicons.end(), "unresolvable placeholder '{" + name + "}'");
        return it->second;
    }

    // Recursive value expansion; nested entity placeholders are flattened
    // into the outer span.
    std::vector<std::string> expand(const std::string& name, Split split) {
        const LexiconSpec& lex = find_lexicon(name);
        const std::vector<std::string>* pool = &lex.values;
        if (split == Split::Test && !lex.test_only.empty()) {
            std::bernoulli_distribution unseen(lex.test_unseen_prob);
            if (unseen(rng_)) pool = &lex.test_only;
        }
        check(!pool->empty(), "lexicon '" + name + "' has no values");
        std::uniform_int_distribution<size_t> pick(0, pool->size() - 1);
        const std::string& value = (*pool)[pick(rng_)];
        std::vector<std::string> out;
        for (const auto& tok : split_ws(value)) {
            if (is_placeholder(tok)) {
                auto nested = expand(tok.substr(1, tok.size() - 2), split);
                out.insert(out.end(), nested.begin(), nested.end());
            } else {
                out.push_back(tok);
            }
        }
        return out;
    }

    const SyntheticSpec& spec_;
    Rng& rng_;
};

std::string joined(const Example& e) {
    std::string s;
    for (const auto& t : e.tokens) {
        s += t;
        s += ' ';
    }
    return s;
}

}  // namespace

GeneratedCorpus generate_synthetic(const SyntheticSpec& spec) {
    check(!spec.domains.empty(), "spec has no domains");
    Rng rng(spec.seed);
    Sampler sampler(spec, rng);
    GeneratedCorpus out;
    std::set<std::string> earlier;  // utterances from earlier splits

    const std::array<std::pair<Split, int>, 3> splits = {
        std::make_pair(Split::Train, spec.train_count),
        std::make_pair(Split::Tune, spec.tune_count),
        std::make_pair(Split::Test, spec.test_count)};
    for (const auto& [split, count] : splits) {
        std::vector<Example>& bucket = split == Split::Train ? out.train
                                       : split == Split::Tune ? out.tune
                                                              : out.test;
        std::set<std::string> current;
        for (const auto& dom : spec.domains) {
            for (int i = 0; i < count; ++i) {
                Example e;
                bool ok = false;
                for (int attempt = 0; attempt < spec.max_resample; ++attempt) {
                    e = sampler.sample(dom, split);
                    if (!earlier.count(joined(e))) {
                        ok = true;
                        break;
                    }
                }
                check(ok, "could not generate an utterance for domain '" + dom.name +
                              "' disjoint from earlier splits; enlarge the lexicons");
                if (auto v = validate_bio(e.slots))
                    throw Error("generator produced invalid BIO: " + *v);
                current.insert(joined(e));
                bucket.push_back(std::move(e));
            }
        }
        earlier.insert(current.begin(), current.end());
    }

    std::vector<Example> all = out.train;
    all.insert(all.end(), out.tune.begin(), out.tune.end());
    all.insert(all.end(), out.test.begin(), out.test.end());
    out.schema = infer_schema(all);
    return out;
}

GeneratedCorpus write_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
    GeneratedCorpus c = generate_synthetic(spec);
    std::filesystem::create_directories(out_dir);
    write_corpus(out_dir + "/train.jsonl", c.train);
    write_corpus(out_dir + "/tune.jsonl", c.tune);
    write_corpus(out_dir + "/test.jsonl", c.test);
    for (const char* name : {"train", "tune", "test"})
        write_schema(out_dir + "/" + std::string(name) + ".jsonl.schema.json", c.schema);
    return c;
}

// ---------------------------------------------------------------------------
// Default desk-scale spec

namespace {

void add_affix_lexicon(SyntheticSpec& s, const std::string& name,
                       const std::vector<std::string>& train_prefixes,
                       const std::vector<std::string>& test_prefixes,
                       const std::vector<std::string>& suffixes, double unseen_prob) {
    LexiconSpec lex;
    lex.test_unseen_prob = unseen_prob;
    for (const auto& p : train_prefixes)
        for (const auto& suf : suffixes) lex.values.push_back(p + suf);
    for (const auto& p : test_prefixes)
        for (const auto& suf : suffixes) lex.test_only.push_back(p + suf);
    s.lexicons[name] = std::move(lex);
}

void add_verb_lexicon(SyntheticSpec& s, const std::string& name,
                      const std::vector<std::string>& all,
                      const std::vector<std::string>& train_subset) {
    LexiconSpec lex;
    lex.is_entity = false;
    lex.test_unseen_prob = 0.4;
    lex.values = train_subset;
    for (const auto& v : all)
        if (std::find(train_subset.begin(), train_subset.end(), v) == train_subset.end())
            lex.test_only.push_back(v);
    s.lexicons[name] = std::move(lex);
}

}  // namespace

SyntheticSpec default_spec() {
    SyntheticSpec s;
    s.seed = 1;
    s.train_count = 1000;
    s.tune_count = 100;
    s.test_count = 500;

    // ---- entity lexicons -------------------------------------------------
    {
        LexiconSpec time;
        const std::vector<std::string> hours = {"one", "two",  "three", "four",
                                                "five", "six",  "seven", "eight",
                                                "nine", "ten",  "eleven", "twelve"};
        const std::vector<std::string> minutes = {"", "thirty", "fifteen", "forty five",
                                                  "ten"};
        const std::vector<std::string> suffix = {"am", "pm", ""};
        for (const auto& h : hours)
            for (const auto& m : minutes)
                for (const auto& sfx : suffix) {
                    if (m.empty() && sfx.empty()) continue;
                    std::string v = h;
                    if (!m.empty()) v += " " + m;
                    if (!sfx.empty()) v += " " + sfx;
                    time.values.push_back(v);
                }
        time.values.push_back("noon");
        time.values.push_back("midnight");
        s.lexicons["time"] = std::move(time);
    }
    {
        LexiconSpec date;
        date.values = {"today",       "tomorrow",    "tonight",     "this evening",
                       "on monday",   "on tuesday",  "on wednesday", "on thursday",
                       "on friday",   "on saturday", "on sunday",    "next monday",
                       "next friday", "this weekend", "next week"};
        s.lexicons["date"] = std::move(date);
    }
    {
        LexiconSpec person;
        person.test_unseen_prob = 0.35;
        person.values = {"maya",   "liam",   "noah",  "emma",   "olivia", "ava",
                         "mia",    "amelia", "harper", "lucas",  "mason",  "ethan",
                         "logan",  "aiden",  "elena", "sofia",  "marcus", "felix",
                         "oscar",  "ruby",   "hazel", "jasper", "silas",  "nora"};
        person.test_only = {"stella", "leona", "tobias", "elias",
                            "mira",   "dario", "selina", "amara"};
        s.lexicons["person"] = std::move(person);
    }
    {
        LexiconSpec title;
        title.test_unseen_prob = 0.3;
        title.values = {"lunch",          "dinner",        "standup",
                        "yoga class",     "dentist appointment", "team meeting",
                        "book club",      "piano lesson",  "project review",
                        "soccer practice", "movie night",  "study group"};
        title.test_only = {"budget review", "choir practice", "tennis match"};
        s.lexicons["title"] = std::move(title);
    }
    add_affix_lexicon(s, "location",
                      {"spring", "maple", "oak", "cedar", "river", "lake", "stone", "mill",
                       "fox", "pine"},
                      {"elm", "ash", "birch", "clay", "dove", "hart"},
                      {"ville", "ton", "field", "burg"}, 0.5);
    add_affix_lexicon(s, "business",
                      {"quick", "fresh", "super", "value", "corner", "central", "golden",
                       "royal", "happy", "sunny"},
                      {"silver", "breezy", "lucky", "noble"}, {"mart", "grill", "cafe", "deli"},
                      0.5);
    {
        // Calendar-flavored message bodies: the utterances that confuse a
        // pipelined domain classifier.
        LexiconSpec msg;
        msg.values = {"change of {title} {date} from {time} to {time}",
                      "{title} is moved to {time}",
                      "i am running late for {title}",
                      "the {title} {date} is cancelled",
                      "meet me at {time}",
                      "can we push {title} to {time}",
                      "do not forget the {title} {date}",
                      "call me after {time}",
                      "the {title} is starting at {time}",
                      "see you at the {title} {date}"};
        s.lexicons["message"] = std::move(msg);
    }

    // ---- shared verb classes, per-domain training subsets ----------------
    const std::vector<std::string> create_all = {"set", "add", "create", "make", "schedule"};
    const std::vector<std::string> cancel_all = {"cancel", "delete", "remove", "drop",
                                                 "clear"};
    const std::vector<std::string> check_all = {"check", "show", "list", "view", "display"};
    add_verb_lexicon(s, "alarm_create", create_all, {"set", "add", "make"});
    add_verb_lexicon(s, "alarm_cancel", cancel_all, {"cancel", "delete", "clear"});
    add_verb_lexicon(s, "alarm_check", check_all, {"check", "show", "list"});
    add_verb_lexicon(s, "cal_create", create_all, {"schedule", "add", "create"});
    add_verb_lexicon(s, "cal_cancel", cancel_all, {"cancel", "remove", "drop"});
    add_verb_lexicon(s, "cal_check", check_all, {"show", "view", "check"});
    add_verb_lexicon(s, "rem_create", create_all, {"set", "create", "add"});
    add_verb_lexicon(s, "rem_cancel", cancel_all, {"delete", "remove", "clear"});
    add_verb_lexicon(s, "rem_check", check_all, {"list", "view", "display"});

    // ---- domains ---------------------------------------------------------
    auto dom = [&](const std::string& name,
                   std::vector<TemplateSpec> templates) {
        DomainSpec d;
        d.name = name;
        d.templates = std::move(templates);
        s.domains.push_back(std::move(d));
    };

    dom("alarm",
        {{"set_alarm", "{alarm_create} an alarm for {time}", 2},
         {"set_alarm", "{alarm_create} an alarm for {time} {date}", 2},
         {"set_alarm", "wake me up at {time}", 1},
         {"set_alarm", "wake me at {time} {date}", 1},
         {"cancel_alarm", "{alarm_cancel} my {time} alarm", 2},
         {"cancel_alarm", "{alarm_cancel} the alarm for {time}", 1},
         {"cancel_alarm", "{alarm_cancel} all my alarms {date}", 1},
         {"check_alarm", "{alarm_check} my alarms for {date}", 2},
         {"check_alarm", "what alarms do i have {date}", 1}});

    dom("calendar",
        {{"create_event", "{cal_create} {title} with {person} at {time} {date}", 2},
         {"create_event", "{cal_create} {title} on my calendar for {date}", 1},
         {"create_event", "{cal_create} a meeting with {person} {date} at {time}", 1},
         {"cancel_event", "{cal_cancel} my {title} {date}", 2},
         {"cancel_event", "{cal_cancel} the {title} at {time}", 1},
         {"change_event", "move {title} from {time} to {time}", 1},
         {"change_event", "change {title} {date} from {time} to {time}", 1},
         {"change_event", "reschedule {title} to {time} {date}", 1},
         {"check_calendar", "{cal_check} my calendar for {date}", 1},
         {"check_calendar", "what is on my calendar {date}", 1}});

    dom("communication",
        {{"send_message", "text {person} saying {message}", 2},
         {"send_message", "inform {person} about {message}", 2},
         {"send_message", "send a message to {person} that says {message}", 1},
         {"send_message", "tell {person} that {message}", 1},
         {"make_call", "call {person} please", 1},
         {"make_call", "give {person} a call", 1},
         {"make_call", "dial {person} for me", 1},
         {"make_call", "make a call to {person}", 1}});

    dom("places",
        {{"find_place", "how far is {location}", 2},
         {"find_place", "how far is {business}", 2},
         {"find_place", "where is {location}", 1},
         {"find_place", "where is {business}", 1},
         {"find_place", "is there a {business} nearby", 1},
         {"get_directions", "directions to {location}", 2},
         {"get_directions", "navigate to {location}", 1},
         {"get_directions", "take me to {location}", 1},
         {"get_directions", "directions to {business}", 1}});

    dom("reminder",
        {{"create_reminder", "remind me about {title} at {time}", 2},
         {"create_reminder", "remind me about {title} {date}", 1},
         {"create_reminder", "{rem_create} a reminder for {title} {date}", 2},
         {"cancel_reminder", "{rem_cancel} my reminder about {title}", 2},
         {"cancel_reminder", "{rem_cancel} the reminder for {date}", 1},
         {"check_reminder", "{rem_check} my reminders for {date}", 2},
         {"check_reminder", "what reminders do i have {date}", 1}});

    return s;
}

// ---------------------------------------------------------------------------
// JSON round trip

std::string spec_to_json(const SyntheticSpec& spec) {
    json j;
    j["seed"] = spec.seed;
    j["train_count"] = spec.train_count;
    j["tune_count"] = spec.tune_count;
    j["test_count"] = spec.test_count;
    j["max_resample"] = spec.max_resample;
    for (const auto& [name, lex] : spec.lexicons) {
        json l;
        l["values"] = lex.values;
        l["test_only"] = lex.test_only;
        l["test_unseen_prob"] = lex.test_unseen_prob;
        l["is_entity"] = lex.is_entity;
        j["lexicons"][name] = std::move(l);
    }
    j["domains"] = json::array();
    for (const auto& d : spec.domains) {
        json jd;
        jd["name"] = d.name;
        jd["templates"] = json::array();
        for (const auto& t : d.templates)
            jd["templates"].push_back(
                {{"intent", t.intent}, {"pattern", t.pattern}, {"weight", t.weight}});
        j["domains"].push_back(std::move(jd));
    }
    return j.dump(2);
}

SyntheticSpec spec_from_json_file(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open spec file '" + path + "'");
    json j = json::parse(in);
    SyntheticSpec s;
    s.seed = j.value("seed", uint64_t{1});
    s.train_count = j.value("train_count", 1000);
    s.tune_count = j.value("tune_count", 100);
    s.test_count = j.value("test_count", 500);
    s.max_resample = j.value("max_resample", 500);
    if (j.contains("lexicons"))
        for (const auto& [name, l] : j.at("lexicons").items()) {
            LexiconSpec lex;
            lex.values = l.value("values", std::vector<std::string>{});
            lex.test_only = l.value("test_only", std::vector<std::string>{});
            lex.test_unseen_prob = l.value("test_unseen_prob", 0.35);
            lex.is_entity = l.value("is_entity", true);
            s.lexicons[name] = std::move(lex);
        }
    for (const auto& jd : j.value("domains", json::array())) {
        DomainSpec d;
        d.name = jd.at("name").get<std::string>();
        for (const auto& jt : jd.value("templates", json::array())) {
            TemplateSpec t;
            t.intent = jt.at("intent").get<std::string>();
            t.pattern = jt.at("pattern").get<std::string>();
            t.weight = jt.value("weight", 1.0);
            d.templates.push_back(std::move(t));
        }
        s.domains.push_back(std::move(d));
    }
    return s;
}

}  // namespace onenet
