#include "runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "checkpoint.hpp"

namespace onenet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

uint32_t file_crc32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    check(in.good(), "cannot open '" + path + "'");
    uLong crc = ::crc32(0L, nullptr, 0);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(buf),
                      static_cast<uInt>(in.gcount()));
    return static_cast<uint32_t>(crc);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    check(out.good(), "cannot write '" + path + "'");
    out << text;
}

struct LoadedData {
    Corpus train, tune, test;
};

// All splits share one schema so label indices agree across models.
LoadedData load_splits(const RunConfig& cfg, bool need_test) {
    check(!cfg.train_path.empty(), "no training file configured (key 'train')");
    LoadedData d;
    if (!cfg.schema_path.empty()) {
        d.train = parse_corpus(cfg.train_path, cfg.schema_path);
        if (!cfg.tune_path.empty()) d.tune = parse_corpus(cfg.tune_path, cfg.schema_path);
        if (need_test) {
            check(!cfg.test_path.empty(), "no test file configured (key 'test')");
            d.test = parse_corpus(cfg.test_path, cfg.schema_path);
        }
        return d;
    }
    d.train = parse_corpus(cfg.train_path);
    std::string sidecar = cfg.train_path + ".schema.json";
    bool have_sidecar = fs::exists(sidecar);
    auto load = [&](const std::string& path) {
        return have_sidecar ? parse_corpus(path, sidecar) : parse_corpus(path);
    };
    if (!cfg.tune_path.empty()) d.tune = load(cfg.tune_path);
    if (need_test) {
        check(!cfg.test_path.empty(), "no test file configured (key 'test')");
        d.test = load(cfg.test_path);
    }
    return d;
}

CorpusSchema schema_for_eval(const RunConfig& cfg) {
    if (!cfg.schema_path.empty()) return parse_schema(cfg.schema_path);
    std::string sidecar = cfg.test_path + ".schema.json";
    if (!cfg.test_path.empty() && fs::exists(sidecar)) return parse_schema(sidecar);
    std::string saved = cfg.out_dir + "/schema.json";
    check(fs::exists(saved), "no schema found; pass one via the 'schema' key");
    return parse_schema(saved);
}

std::string epochs_table(const std::map<std::string, TrainResult>& logs) {
    std::ostringstream out;
    out << "model\tstage\tepoch\tmean_loss\ttune_domain\ttune_intent\ttune_slot_f1\tselected\n";
    char line[256];
    for (const auto& [name, res] : logs)
        for (const auto& e : res.log) {
            std::snprintf(line, sizeof(line), "%s\t%d\t%d\t%.6f\t%.2f\t%.2f\t%.2f\t%d\n",
                          name.c_str(), e.stage, e.epoch, e.mean_loss, e.tune_domain_acc,
                          e.tune_intent_acc, e.tune_slot_f1, e.selected ? 1 : 0);
            out << line;
        }
    return out.str();
}

}  // namespace

std::string run_generate(const std::string& out_dir, const std::string& spec_path,
                         long long seed) {
    SyntheticSpec spec = spec_path.empty() ? default_spec() : spec_from_json_file(spec_path);
    if (seed >= 0) spec.seed = static_cast<uint64_t>(seed);
    GeneratedCorpus c = write_synthetic(spec, out_dir);
    std::ostringstream out;
    out << "wrote " << c.train.size() << " train / " << c.tune.size() << " tune / "
        << c.test.size() << " test utterances across " << c.schema.domains.size()
        << " domains to " << out_dir << " (seed " << spec.seed << ")\n";
    return out.str();
}

std::string run_train(const RunConfig& cfg) {
    Variant v = variant_from_string(cfg.variant);
    LoadedData data = load_splits(cfg, /*need_test=*/false);
    check(!data.tune.examples.empty(), "no tuning file configured (key 'tune')");

    VariantTrainSetup setup;
    setup.base = cfg.model_config();
    setup.hyper = cfg.hyper;
    setup.embeddings_path = cfg.embeddings_path;
    VariantTrainResult result =
        train_variant(v, data.train.examples, data.tune.examples, data.train.schema, setup);

    fs::create_directories(cfg.out_dir);
    save_bundle(result.bundle, cfg.out_dir);
    write_schema(cfg.out_dir + "/schema.json", data.train.schema);
    write_text(cfg.out_dir + "/epochs.tsv", epochs_table(result.logs));

    std::ostringstream manifest;
    manifest << "# resolved configuration\n" << config_to_string(cfg);
    manifest << "# inputs\n";
    char line[512];
    for (const std::string& p : {cfg.train_path, cfg.tune_path}) {
        std::snprintf(line, sizeof(line), "input %s crc32=%08x\n", p.c_str(), file_crc32(p));
        manifest << line;
    }
    manifest << "# artifacts\n";
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        std::string n = entry.path().filename().string();
        if (n.ends_with(".ckpt") || n == "schema.json" || n == "epochs.tsv")
            names.push_back(n);
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) manifest << "artifact " << n << "\n";
    write_text(cfg.out_dir + "/run_manifest.txt", manifest.str());

    std::ostringstream out;
    out << "trained variant '" << cfg.variant << "' on " << data.train.examples.size()
        << " utterances (seed " << cfg.hyper.seed << ")\n";
    for (const auto& [name, res] : result.logs) {
        check(res.best_log_index >= 0, "no selected epoch for sub-model " + name);
        const EpochLog& best = res.log[static_cast<size_t>(res.best_log_index)];
        std::snprintf(line, sizeof(line),
                      "  %-16s best epoch %d/%d  tune domain %.2f  intent %.2f  slot F1 %.2f\n",
                      name.c_str(), best.epoch, best.stage, best.tune_domain_acc,
                      best.tune_intent_acc, best.tune_slot_f1);
        out << line;
    }
    out << "checkpoints in " << cfg.out_dir << "\n";
    return out.str();
}

std::string run_eval(const RunConfig& cfg) {
    Variant v = variant_from_string(cfg.variant);
    check(!cfg.test_path.empty(), "no test file configured (key 'test')");
    CorpusSchema schema = schema_for_eval(cfg);
    Corpus test = cfg.schema_path.empty() &&
                          !fs::exists(cfg.test_path + ".schema.json")
                      ? parse_corpus(cfg.test_path)
                      : parse_corpus(cfg.test_path, cfg.schema_path.empty()
                                                        ? cfg.test_path + ".schema.json"
                                                        : cfg.schema_path);
    ModelBundle bundle = load_bundle(v, cfg.out_dir, schema);
    EvalReport report = evaluate_variant(bundle, test.examples);
    write_text(cfg.out_dir + "/report.json", report_to_json(report));
    return report_table(report);
}

std::string run_predict(const RunConfig& cfg, const std::string& input_path) {
    Variant v = variant_from_string(cfg.variant);
    CorpusSchema schema = schema_for_eval(cfg);
    ModelBundle bundle = load_bundle(v, cfg.out_dir, schema);

    std::ifstream file;
    std::istream* in = &std::cin;
    if (input_path != "-") {
        file.open(input_path);
        check(file.good(), "cannot open '" + input_path + "'");
        in = &file;
    }
    std::ostringstream out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            throw Error(input_path + ":" + std::to_string(line_no) + ": " + ex.what());
        }
        check(j.is_object() && j.contains("tokens"),
              input_path + ":" + std::to_string(line_no) + ": expected {\"tokens\": [...]}");
        std::vector<std::string> tokens = j.at("tokens").get<std::vector<std::string>>();
        std::string gold_domain = j.value("domain", "");
        Prediction p = predict_variant(bundle, tokens, gold_domain);
        json o;
        o["tokens"] = tokens;
        o["domain"] = p.domain;
        o["intent"] = p.intent;
        o["slots"] = p.slots.empty() ? std::vector<std::string>(tokens.size(), "O") : p.slots;
        out << o.dump() << "\n";
    }
    return out.str();
}

std::string run_compare(const RunConfig& cfg, const std::vector<std::string>& variants) {
    check(!variants.empty(), "compare needs at least one variant");
    LoadedData data = load_splits(cfg, /*need_test=*/true);
    check(!data.tune.examples.empty(), "no tuning file configured (key 'tune')");

    struct Row {
        std::string name;
        EvalReport report;
    };
    std::vector<Row> rows;
    for (const std::string& name : variants) {
        Variant v = variant_from_string(name);
        VariantTrainSetup setup;
        setup.base = cfg.model_config();
        setup.hyper = cfg.hyper;
        setup.embeddings_path = cfg.embeddings_path;
        VariantTrainResult result = train_variant(v, data.train.examples, data.tune.examples,
                                                  data.train.schema, setup);
        std::string dir = cfg.out_dir + "/" + name;
        fs::create_directories(dir);
        save_bundle(result.bundle, dir);
        write_schema(dir + "/schema.json", data.train.schema);
        write_text(dir + "/epochs.tsv", epochs_table(result.logs));
        EvalReport report = evaluate_variant(result.bundle, data.test.examples);
        write_text(dir + "/report.json", report_to_json(report));
        rows.push_back({name, std::move(report)});
    }

    std::ostringstream out;
    char line[256];
    out << "variant         domain%   intent%   slotF1%\n";
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%-14s %8.2f  %8.2f  %8.2f\n", r.name.c_str(),
                      r.report.overall.domain_accuracy(), r.report.overall.intent_accuracy(),
                      r.report.overall.slots.f1());
        out << line;
    }
    return out.str();
}

GradCheckReport gradcheck_report(uint64_t seed) {
    // Miniature joint model: small enough that finite differences over a few
    // utterances finish quickly, yet every parameter class is exercised.
    std::vector<Example> train = {
        {{"wake", "me", "at", "seven"}, "d0", "i0", {"O", "O", "O", "B-a"}},
        {{"move", "lunch", "to", "noon"}, "d1", "i1", {"O", "B-b", "O", "B-a"}},
        {{"text", "sam", "about", "lunch", "plans"}, "d2", "i2",
         {"O", "B-c", "O", "B-b", "I-b"}},
        {{"wake", "sam", "at", "noon"}, "d0", "i3", {"O", "B-c", "O", "B-a"}},
    };
    ModelConfig cfg;
    cfg.char_emb_dim = 5;
    cfg.char_hidden = 5;
    cfg.word_emb_dim = 10;
    cfg.word_hidden = 8;
    cfg.dropout_keep = 1.0;  // the check rebuilds the loss, so it must be deterministic
    auto [cv, wv] = build_vocab(train);
    OneNetModel model(cfg, std::move(cv), std::move(wv), {"d0", "d1", "d2"},
                      {"i0", "i1", "i2", "i3"}, TagSet::from_entity_types({"a", "b", "c"}),
                      seed);

    auto loss = [&](bool with_grads) {
        Rng rng(0);  // unused: no dropout, no UNK replacement at eval
        double total = 0.0;
        for (const auto& e : train) {
            LossBuild b = model.build_losses(e, LossMask{}, /*train=*/false, rng);
            b.graph->forward();
            total += b.graph->scalar(b.total);
            if (with_grads) {
                b.graph->backward(b.total);
                b.binder->accumulate_grads();
            }
        }
        return total;
    };
    return gradient_check(loss, model.params(), /*step=*/1e-5, /*tolerance=*/1e-4);
}

std::string run_gradcheck(uint64_t seed) {
    GradCheckReport r = gradcheck_report(seed);
    std::ostringstream out;
    char line[256];
    out << "tensor                    coords   max_rel_err\n";
    for (const auto& t : r.tensors) {
        std::snprintf(line, sizeof(line), "%-24s %6d   %.3e\n", t.name.c_str(),
                      t.coords_checked, t.max_rel_err);
        out << line;
    }
    std::snprintf(line, sizeof(line), "overall max relative error %.3e (tolerance %.0e): %s\n",
                  r.max_rel_err, r.tolerance, r.passed() ? "PASS" : "FAIL");
    out << line;
    if (!r.passed()) throw Error("gradient check failed: " + std::string(line));
    return out.str();
}

}  // namespace onenet
