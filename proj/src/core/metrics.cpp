#include "metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace onenet {

std::vector<Chunk> extract_chunks(const std::vector<std::string>& labels) {
    if (auto v = validate_bio(labels)) throw Error("extract_chunks: " + *v);
    std::vector<Chunk> chunks;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].size() < 3 || labels[i][0] != 'B') continue;
        Chunk c;
        c.type = labels[i].substr(2);
        c.start = static_cast<int>(i);
        size_t j = i + 1;
        while (j < labels.size() && labels[j] == "I-" + c.type) ++j;
        c.end = static_cast<int>(j);
        chunks.push_back(std::move(c));
        i = j - 1;
    }
    return chunks;
}

double PRF::precision() const { return predicted ? 100.0 * matched / predicted : 0.0; }
double PRF::recall() const { return gold ? 100.0 * matched / gold : 0.0; }
double PRF::f1() const {
    double p = precision(), r = recall();
    return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
}

static void add_sentence(PRF& prf, const std::vector<std::string>& gold,
                         const std::vector<std::string>& pred) {
    check(gold.size() == pred.size(), "slot_f1: sequence length mismatch");
    auto gc = extract_chunks(gold);
    auto pc = extract_chunks(repair_bio(pred));
    std::set<Chunk> gset(gc.begin(), gc.end());
    prf.gold += static_cast<long>(gc.size());
    prf.predicted += static_cast<long>(pc.size());
    for (const auto& c : pc)
        if (gset.count(c)) ++prf.matched;
}

PRF slot_f1(const std::vector<std::vector<std::string>>& gold,
            const std::vector<std::vector<std::string>>& predicted) {
    check(gold.size() == predicted.size(), "slot_f1: corpus size mismatch");
    PRF prf;
    for (size_t i = 0; i < gold.size(); ++i) add_sentence(prf, gold[i], predicted[i]);
    return prf;
}

EvalReport build_report(const std::vector<Example>& gold,
                        const std::vector<Prediction>& predicted) {
    check(gold.size() == predicted.size(), "build_report: size mismatch");
    EvalReport r;
    for (size_t i = 0; i < gold.size(); ++i) {
        const Example& e = gold[i];
        const Prediction& p = predicted[i];
        for (TaskMetrics* m : {&r.overall, &r.per_domain[e.domain]}) {
            ++m->count;
            if (p.domain == e.domain) ++m->domain_correct;
            if (p.intent == e.intent) ++m->intent_correct;
            add_sentence(m->slots, e.slots, p.slots);
        }
    }
    if (!r.per_domain.empty()) {
        for (const auto& [_, m] : r.per_domain) {
            r.avg_domain_accuracy += m.domain_accuracy();
            r.avg_intent_accuracy += m.intent_accuracy();
            r.avg_slot_f1 += m.slots.f1();
        }
        double n = static_cast<double>(r.per_domain.size());
        r.avg_domain_accuracy /= n;
        r.avg_intent_accuracy /= n;
        r.avg_slot_f1 /= n;
    }
    return r;
}

static nlohmann::json metrics_json(const TaskMetrics& m) {
    return {
        {"count", m.count},
        {"domain_accuracy", m.domain_accuracy()},
        {"intent_accuracy", m.intent_accuracy()},
        {"slot_precision", m.slots.precision()},
        {"slot_recall", m.slots.recall()},
        {"slot_f1", m.slots.f1()},
        {"slot_matched", m.slots.matched},
        {"slot_predicted", m.slots.predicted},
        {"slot_gold", m.slots.gold},
    };
}

std::string report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["overall"] = metrics_json(r.overall);
    for (const auto& [d, m] : r.per_domain) j["per_domain"][d] = metrics_json(m);
    j["avg"] = {{"domain_accuracy", r.avg_domain_accuracy},
                {"intent_accuracy", r.avg_intent_accuracy},
                {"slot_f1", r.avg_slot_f1}};
    return j.dump(2);
}

std::string report_table(const EvalReport& r) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s %8s\n", "domain", "count",
                  "dom-acc", "int-acc", "slot-P/R", "slot-F1");
    out << line;
    auto row = [&](const std::string& name, const TaskMetrics& m) {
        char pr[32];
        std::snprintf(pr, sizeof(pr), "%.1f/%.1f", m.slots.precision(), m.slots.recall());
        std::snprintf(line, sizeof(line), "%-16s %8ld %8.2f %8.2f %8s %8.2f\n", name.c_str(),
                      m.count, m.domain_accuracy(), m.intent_accuracy(), pr, m.slots.f1());
        out << line;
    };
    for (const auto& [d, m] : r.per_domain) row(d, m);
    std::snprintf(line, sizeof(line), "%-16s %8s %8.2f %8.2f %8s %8.2f\n", "AVG", "",
                  r.avg_domain_accuracy, r.avg_intent_accuracy, "", r.avg_slot_f1);
    out << line;
    row("overall", r.overall);
    return out.str();
}

}  // namespace onenet
