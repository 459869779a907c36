#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "gradcheck.hpp"
#include "generator.hpp"
#include "variants.hpp"

namespace onenet {

// High-level operations shared by the C API and the command-line tool. Each
// returns human-readable summary text and throws Error on failure.

// Writes train/tune/test JSONL plus schema sidecars into out_dir. spec_path
// empty -> built-in five-domain benchmark. seed < 0 keeps the spec's seed.
std::string run_generate(const std::string& out_dir, const std::string& spec_path,
                         long long seed);

// Trains cfg.variant on cfg.train_path/cfg.tune_path, saves checkpoints, a
// run manifest and the per-epoch log under cfg.out_dir.
std::string run_train(const RunConfig& cfg);

// Loads the bundle from cfg.out_dir, evaluates cfg.test_path, writes
// report.json beside the checkpoints and returns the report table.
std::string run_eval(const RunConfig& cfg);

// Reads utterances from input_path ("-" = stdin): one JSON object per line
// with "tokens" (and optionally "domain", consulted by the oracle variant).
// Returns one JSON prediction per line.
std::string run_predict(const RunConfig& cfg, const std::string& input_path);

// Trains and evaluates each listed variant with the same data and
// hyperparameters; writes each run under cfg.out_dir/<variant> and returns
// a side-by-side table.
std::string run_compare(const RunConfig& cfg, const std::vector<std::string>& variants);

// Analytic-vs-numeric gradient agreement on a miniature joint model over a
// small synthetic corpus. Also exposed as a report for tests.
GradCheckReport gradcheck_report(uint64_t seed);
std::string run_gradcheck(uint64_t seed);

}  // namespace onenet
