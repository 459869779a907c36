#include "variants.hpp"

#include <algorithm>
#include <filesystem>

#include "checkpoint.hpp"

namespace onenet {

Variant variant_from_string(const std::string& s) {
    if (s == "joint") return Variant::Joint;
    if (s == "independent") return Variant::Independent;
    if (s == "pipeline") return Variant::Pipeline;
    if (s == "oracle") return Variant::OracleDomain;
    throw Error("unknown variant '" + s + "' (expected joint|independent|pipeline|oracle)");
}

std::string variant_to_string(Variant v) {
    switch (v) {
        case Variant::Joint: return "joint";
        case Variant::Independent: return "independent";
        case Variant::Pipeline: return "pipeline";
        case Variant::OracleDomain: return "oracle";
    }
    return "?";
}

namespace {

std::unique_ptr<OneNetModel> make_model(const ModelConfig& cfg,
                                        const std::vector<Example>& train,
                                        std::vector<std::string> domains,
                                        std::vector<std::string> intents, TagSet tags,
                                        uint64_t init_seed, const std::string& embeddings) {
    auto [cv, wv] = build_vocab(train);
    auto model = std::make_unique<OneNetModel>(cfg, std::move(cv), std::move(wv),
                                               std::move(domains), std::move(intents),
                                               std::move(tags), init_seed);
    if (!embeddings.empty()) model->load_pretrained(embeddings);
    return model;
}

// Baselines train without the curriculum: only their own loss, with the
// final-stage epoch budget.
Hyperparams single_task_hyper(const Hyperparams& hp) {
    Hyperparams out = hp;
    out.stage_epochs = {0, 0, 0, hp.stage_epochs[3]};
    return out;
}

std::vector<Example> domain_slice(const std::vector<Example>& data, const std::string& d) {
    std::vector<Example> out;
    for (const auto& e : data)
        if (e.domain == d) out.push_back(e);
    return out;
}

}  // namespace

VariantTrainResult train_variant(Variant v, const std::vector<Example>& train,
                                 const std::vector<Example>& tune, const CorpusSchema& schema,
                                 const VariantTrainSetup& setup) {
    check(!train.empty(), "train_variant: empty training set");
    VariantTrainResult out;
    out.bundle.variant = v;
    TagSet full_tags = TagSet::from_entity_types(schema.entity_types);
    const uint64_t seed = setup.hyper.seed;

    auto train_one = [&](const std::string& name, std::unique_ptr<OneNetModel>& slot,
                         ModelConfig cfg, const std::vector<Example>& tr,
                         const std::vector<Example>& tu, std::vector<std::string> domains,
                         std::vector<std::string> intents, TagSet tags,
                         const Hyperparams& hp, uint64_t init_seed) {
        slot = make_model(cfg, tr, std::move(domains), std::move(intents), std::move(tags),
                          init_seed, setup.embeddings_path);
        out.logs[name] = train_curriculum(*slot, tr, tu, hp);
    };

    if (v == Variant::Joint) {
        ModelConfig cfg = setup.base;
        cfg.domain_head = cfg.intent_head = cfg.slot_head = true;
        train_one("joint", out.bundle.joint, cfg, train, tune, schema.domains, schema.intents,
                  full_tags, setup.hyper, seed * 7919 + 1);
        return out;
    }

    Hyperparams sthp = single_task_hyper(setup.hyper);

    if (v == Variant::Independent || v == Variant::Pipeline) {
        ModelConfig cfg = setup.base;
        cfg.domain_head = true;
        cfg.intent_head = cfg.slot_head = false;
        train_one("domain", out.bundle.domain_model, cfg, train, tune, schema.domains, {},
                  TagSet{}, sthp, seed * 7919 + 2);
    }
    if (v == Variant::Independent) {
        ModelConfig cfg = setup.base;
        cfg.domain_head = cfg.slot_head = false;
        cfg.intent_head = true;
        train_one("intent", out.bundle.intent_model, cfg, train, tune, {}, schema.intents,
                  TagSet{}, sthp, seed * 7919 + 3);
        cfg.intent_head = false;
        cfg.slot_head = true;
        train_one("slot", out.bundle.slot_model, cfg, train, tune, {}, {}, full_tags, sthp,
                  seed * 7919 + 4);
        return out;
    }

    // Pipeline / OracleDomain: per-domain intent and slot models.
    uint64_t idx = 10;
    for (const auto& d : schema.domains) {
        std::vector<Example> tr = domain_slice(train, d);
        std::vector<Example> tu = domain_slice(tune, d);
        check(!tr.empty(), "no training data for domain '" + d + "'");
        auto di = schema.domain_intents.find(d);
        check(di != schema.domain_intents.end() && !di->second.empty(),
              "schema lists no intents for domain '" + d + "'");
        auto de = schema.domain_entities.find(d);

        ModelConfig cfg = setup.base;
        cfg.domain_head = cfg.slot_head = false;
        cfg.intent_head = true;
        train_one("intent:" + d, out.bundle.domain_intent[d], cfg, tr, tu, {}, di->second,
                  TagSet{}, sthp, seed * 7919 + idx++);

        cfg.intent_head = false;
        cfg.slot_head = true;
        TagSet dtags = TagSet::from_entity_types(
            de == schema.domain_entities.end() ? std::vector<std::string>{} : de->second);
        train_one("slot:" + d, out.bundle.domain_slot[d], cfg, tr, tu, {}, {}, dtags, sthp,
                  seed * 7919 + idx++);
    }
    return out;
}

Prediction predict_variant(ModelBundle& b, const std::vector<std::string>& tokens,
                           const std::string& gold_domain) {
    switch (b.variant) {
        case Variant::Joint:
            check(b.joint != nullptr, "joint model missing from bundle");
            return b.joint->predict(tokens);
        case Variant::Independent: {
            check(b.domain_model && b.intent_model && b.slot_model,
                  "independent bundle requires domain, intent and slot models");
            Prediction p;
            p.domain = b.domain_model->predict(tokens).domain;
            p.intent = b.intent_model->predict(tokens).intent;
            p.slots = b.slot_model->predict(tokens).slots;
            return p;
        }
        case Variant::Pipeline:
        case Variant::OracleDomain: {
            std::string route;
            if (b.variant == Variant::Pipeline) {
                check(b.domain_model != nullptr, "pipeline bundle requires a domain model");
                route = b.domain_model->predict(tokens).domain;
            } else {
                check(!gold_domain.empty(), "oracle routing requires the gold domain");
                route = gold_domain;
            }
            auto it_i = b.domain_intent.find(route);
            auto it_s = b.domain_slot.find(route);
            check(it_i != b.domain_intent.end() && it_s != b.domain_slot.end(),
                  "no per-domain models for domain '" + route + "'");
            Prediction p;
            p.domain = route;
            p.intent = it_i->second->predict(tokens).intent;
            p.slots = it_s->second->predict(tokens).slots;
            return p;
        }
    }
    throw Error("unknown variant");
}

EvalReport evaluate_variant(ModelBundle& b, const std::vector<Example>& test) {
    check(!test.empty(), "evaluate_variant: empty test set");
    std::vector<Prediction> preds;
    preds.reserve(test.size());
    for (const auto& e : test) {
        Prediction p = predict_variant(b, e.tokens, e.domain);
        if (p.slots.empty()) p.slots.assign(e.tokens.size(), "O");
        preds.push_back(std::move(p));
    }
    return build_report(test, preds);
}

void save_bundle(const ModelBundle& b, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto save = [&](const std::unique_ptr<OneNetModel>& m, const std::string& name) {
        if (m) save_model(*m, dir + "/" + name + ".ckpt");
    };
    save(b.joint, "joint");
    save(b.domain_model, "domain");
    save(b.intent_model, "intent");
    save(b.slot_model, "slot");
    for (const auto& [d, m] : b.domain_intent) save(m, "intent_" + d);
    for (const auto& [d, m] : b.domain_slot) save(m, "slot_" + d);
}

ModelBundle load_bundle(Variant v, const std::string& dir, const CorpusSchema& schema) {
    ModelBundle b;
    b.variant = v;
    auto load = [&](const std::string& name) {
        std::string path = dir + "/" + name + ".ckpt";
        check(std::filesystem::exists(path),
              "missing checkpoint '" + path + "' for variant " + variant_to_string(v));
        return std::make_unique<OneNetModel>(load_model(path));
    };
    switch (v) {
        case Variant::Joint:
            b.joint = load("joint");
            break;
        case Variant::Independent:
            b.domain_model = load("domain");
            b.intent_model = load("intent");
            b.slot_model = load("slot");
            break;
        case Variant::Pipeline:
            b.domain_model = load("domain");
            [[fallthrough]];
        case Variant::OracleDomain:
            for (const auto& d : schema.domains) {
                b.domain_intent[d] = load("intent_" + d);
                b.domain_slot[d] = load("slot_" + d);
            }
            break;
    }
    return b;
}

}  // namespace onenet
