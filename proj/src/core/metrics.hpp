#pragma once

#include <map>
#include <string>
#include <vector>

#include "data.hpp"
#include "model.hpp"

namespace onenet {

// Typed span over token positions, end exclusive.
struct Chunk {
    std::string type;
    int start = 0;
    int end = 0;
    auto operator<=>(const Chunk&) const = default;
};

// Maximal B-led same-type runs. Input must be valid BIO; decoder output goes
// through repair_bio first.
std::vector<Chunk> extract_chunks(const std::vector<std::string>& labels);

struct PRF {
    long matched = 0;
    long predicted = 0;
    long gold = 0;
    double precision() const;  // percent; 0/0 -> 0
    double recall() const;
    double f1() const;
};

// Micro-averaged exact span-and-type matching across the corpus.
PRF slot_f1(const std::vector<std::vector<std::string>>& gold,
            const std::vector<std::vector<std::string>>& predicted);

struct TaskMetrics {
    long count = 0;
    long domain_correct = 0;
    long intent_correct = 0;
    PRF slots;
    double domain_accuracy() const { return count ? 100.0 * domain_correct / count : 0.0; }
    double intent_accuracy() const { return count ? 100.0 * intent_correct / count : 0.0; }
};

struct EvalReport {
    TaskMetrics overall;
    std::map<std::string, TaskMetrics> per_domain;  // keyed by gold domain
    // Unweighted macro average of the per-domain rows.
    double avg_domain_accuracy = 0.0;
    double avg_intent_accuracy = 0.0;
    double avg_slot_f1 = 0.0;
};

EvalReport build_report(const std::vector<Example>& gold,
                        const std::vector<Prediction>& predicted);

std::string report_to_json(const EvalReport& r);
std::string report_table(const EvalReport& r);

}  // namespace onenet
