#include <onenet/onenet.h>

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/runner.hpp"

using namespace onenet;
using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void deliver(char** slot, const std::string& text) {
    if (slot) *slot = dup_string(text);
}

bool looks_like_io(const std::string& msg) {
    return msg.find("cannot open") != std::string::npos ||
           msg.find("cannot write") != std::string::npos ||
           msg.find("missing checkpoint") != std::string::npos ||
           msg.find("truncated") != std::string::npos ||
           msg.find("not a checkpoint") != std::string::npos;
}

template <typename Fn>
onenet_status guard(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ONENET_OK;
    } catch (const Error& ex) {
        g_last_error = ex.what();
        return looks_like_io(g_last_error) ? ONENET_ERR_IO : ONENET_ERR_RUNTIME;
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        return ONENET_ERR_RUNTIME;
    }
}

onenet_status invalid(const char* msg) {
    g_last_error = msg;
    return ONENET_ERR_INVALID_ARGUMENT;
}

onenet_status resolve_config(const char* config_path, const char* const* overrides,
                             size_t n_overrides, RunConfig& cfg) {
    if (n_overrides > 0 && overrides == nullptr)
        return invalid("overrides is null but n_overrides > 0");
    try {
        if (config_path && *config_path) cfg = parse_config_file(config_path);
        for (size_t i = 0; i < n_overrides; ++i) {
            if (!overrides[i]) return invalid("null override string");
            std::string kv = overrides[i];
            size_t eq = kv.find('=');
            if (eq == std::string::npos)
                return invalid("override must look like key=value");
            apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        return looks_like_io(g_last_error) ? ONENET_ERR_IO : ONENET_ERR_INVALID_ARGUMENT;
    }
    return ONENET_OK;
}

}  // namespace

extern "C" {

const char* onenet_last_error(void) { return g_last_error.c_str(); }

void onenet_free_string(char* s) { std::free(s); }

onenet_status onenet_generate(const char* out_dir, const char* spec_path, long long seed,
                              char** out_summary) {
    if (!out_dir || !*out_dir) return invalid("out_dir is required");
    return guard([&] {
        deliver(out_summary, run_generate(out_dir, spec_path ? spec_path : "", seed));
    });
}

onenet_status onenet_train(const char* config_path, const char* const* overrides,
                           size_t n_overrides, char** out_summary) {
    RunConfig cfg;
    onenet_status st = resolve_config(config_path, overrides, n_overrides, cfg);
    if (st != ONENET_OK) return st;
    return guard([&] { deliver(out_summary, run_train(cfg)); });
}

onenet_status onenet_eval(const char* config_path, const char* const* overrides,
                          size_t n_overrides, char** out_table) {
    RunConfig cfg;
    onenet_status st = resolve_config(config_path, overrides, n_overrides, cfg);
    if (st != ONENET_OK) return st;
    return guard([&] { deliver(out_table, run_eval(cfg)); });
}

onenet_status onenet_predict(const char* config_path, const char* const* overrides,
                             size_t n_overrides, const char* input_path, char** out_jsonl) {
    if (!input_path || !*input_path) return invalid("input_path is required");
    RunConfig cfg;
    onenet_status st = resolve_config(config_path, overrides, n_overrides, cfg);
    if (st != ONENET_OK) return st;
    return guard([&] { deliver(out_jsonl, run_predict(cfg, input_path)); });
}

onenet_status onenet_compare(const char* config_path, const char* const* overrides,
                             size_t n_overrides, const char* variants, char** out_table) {
    if (!variants || !*variants) return invalid("variants is required");
    RunConfig cfg;
    onenet_status st = resolve_config(config_path, overrides, n_overrides, cfg);
    if (st != ONENET_OK) return st;
    std::vector<std::string> names;
    std::string s = variants;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string name = s.substr(pos, comma - pos);
        if (!name.empty()) names.push_back(name);
        pos = comma + 1;
    }
    if (names.empty()) return invalid("variants is empty");
    return guard([&] { deliver(out_table, run_compare(cfg, names)); });
}

onenet_status onenet_gradcheck(long long seed, char** out_report) {
    if (seed < 0) return invalid("seed must be non-negative");
    return guard([&] {
        deliver(out_report, run_gradcheck(static_cast<uint64_t>(seed)));
    });
}

struct onenet_model {
    ModelBundle bundle;
};

onenet_status onenet_model_open(const char* variant, const char* run_dir,
                                const char* schema_path, onenet_model** out_model) {
    if (!variant || !run_dir || !out_model) return invalid("variant, run_dir and out_model are required");
    *out_model = nullptr;
    return guard([&] {
        std::string schema_file =
            schema_path && *schema_path ? schema_path : std::string(run_dir) + "/schema.json";
        CorpusSchema schema = parse_schema(schema_file);
        auto* m = new onenet_model;
        m->bundle = load_bundle(variant_from_string(variant), run_dir, schema);
        *out_model = m;
    });
}

onenet_status onenet_model_predict(onenet_model* model, const char* request_json,
                                   char** out_json) {
    if (!model || !request_json || !out_json)
        return invalid("model, request_json and out_json are required");
    return guard([&] {
        json req = json::parse(request_json);
        check(req.is_object() && req.contains("tokens") && req.at("tokens").is_array(),
              "request must be {\"tokens\": [...]}");
        std::vector<std::string> tokens = req.at("tokens").get<std::vector<std::string>>();
        Prediction p = predict_variant(model->bundle, tokens, req.value("domain", ""));
        json o;
        o["tokens"] = tokens;
        o["domain"] = p.domain;
        o["intent"] = p.intent;
        o["slots"] = p.slots.empty() ? std::vector<std::string>(tokens.size(), "O") : p.slots;
        deliver(out_json, o.dump());
    });
}

void onenet_model_close(onenet_model* model) { delete model; }

}  // extern "C"
