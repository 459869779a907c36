// Command-line front end; everything goes through the public C interface.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <onenet/onenet.h>

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "flat key = value configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", c.overrides,
                    "key=value override, applied after the config file (repeatable)");
}

// ONENET_SEED beats both the config file and --set seed=...
void apply_env_seed(Common& c) {
    const char* env = std::getenv("ONENET_SEED");
    if (env && *env) c.overrides.push_back(std::string("seed=") + env);
}

std::vector<const char*> as_ptrs(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

int finish(onenet_status st, char* text) {
    if (st != ONENET_OK) {
        std::fprintf(stderr, "error: %s\n", onenet_last_error());
        onenet_free_string(text);
        return st == ONENET_ERR_INVALID_ARGUMENT ? 2 : 1;
    }
    if (text) {
        std::fputs(text, stdout);
        onenet_free_string(text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint domain/intent/slot tagger for spoken language understanding"};
    app.require_subcommand(1);

    // generate
    std::string gen_out = "data";
    std::string gen_spec;
    long long gen_seed = -1;
    auto* gen = app.add_subcommand("generate", "write a synthetic benchmark corpus");
    gen->add_option("-o,--out", gen_out, "output directory")->capture_default_str();
    gen->add_option("--spec", gen_spec, "corpus spec JSON (default: built-in benchmark)")
        ->check(CLI::ExistingFile);
    gen->add_option("--seed", gen_seed, "override the spec's seed");

    Common train_c, eval_c, pred_c, cmp_c;
    auto* train = app.add_subcommand("train", "train the configured variant");
    add_common(train, train_c);
    auto* eval = app.add_subcommand("eval", "evaluate a trained run on the test split");
    add_common(eval, eval_c);

    std::string pred_input = "-";
    auto* pred = app.add_subcommand("predict", "label utterances from JSONL input");
    add_common(pred, pred_c);
    pred->add_option("-i,--input", pred_input, "input file, '-' for stdin")
        ->capture_default_str();

    std::string cmp_variants = "joint,independent,pipeline,oracle";
    auto* cmp = app.add_subcommand("compare", "train and evaluate several variants");
    add_common(cmp, cmp_c);
    cmp->add_option("--variants", cmp_variants, "comma-separated variant list")
        ->capture_default_str();

    long long gc_seed = 1;
    auto* gc = app.add_subcommand("gradcheck", "verify gradients by finite differences");
    gc->add_option("--seed", gc_seed, "initialization seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    char* text = nullptr;
    if (gen->parsed()) {
        const char* env = std::getenv("ONENET_SEED");
        if (env && *env) gen_seed = std::atoll(env);
        onenet_status st = onenet_generate(
            gen_out.c_str(), gen_spec.empty() ? nullptr : gen_spec.c_str(), gen_seed, &text);
        return finish(st, text);
    }
    if (train->parsed()) {
        apply_env_seed(train_c);
        auto ptrs = as_ptrs(train_c.overrides);
        onenet_status st = onenet_train(
            train_c.config.empty() ? nullptr : train_c.config.c_str(), ptrs.data(),
            ptrs.size(), &text);
        return finish(st, text);
    }
    if (eval->parsed()) {
        apply_env_seed(eval_c);
        auto ptrs = as_ptrs(eval_c.overrides);
        onenet_status st = onenet_eval(
            eval_c.config.empty() ? nullptr : eval_c.config.c_str(), ptrs.data(),
            ptrs.size(), &text);
        return finish(st, text);
    }
    if (pred->parsed()) {
        apply_env_seed(pred_c);
        auto ptrs = as_ptrs(pred_c.overrides);
        onenet_status st = onenet_predict(
            pred_c.config.empty() ? nullptr : pred_c.config.c_str(), ptrs.data(),
            ptrs.size(), pred_input.c_str(), &text);
        return finish(st, text);
    }
    if (cmp->parsed()) {
        apply_env_seed(cmp_c);
        auto ptrs = as_ptrs(cmp_c.overrides);
        onenet_status st = onenet_compare(
            cmp_c.config.empty() ? nullptr : cmp_c.config.c_str(), ptrs.data(),
            ptrs.size(), cmp_variants.c_str(), &text);
        return finish(st, text);
    }
    if (gc->parsed()) {
        const char* env = std::getenv("ONENET_SEED");
        if (env && *env) gc_seed = std::atoll(env);
        onenet_status st = onenet_gradcheck(gc_seed, &text);
        return finish(st, text);
    }
    return 2;
}
