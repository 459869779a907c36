#include "crf.hpp"

#include <cmath>
#include <limits>

namespace onenet::crf {

namespace {

double couple(double t, double e, Coupling c) {
    return c == Coupling::Additive ? t + e : t * e;
}

double logsumexp(const Vec& v) {
    double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double sequence_score(const Mat& emissions, const Mat& transitions,
                      const std::vector<int>& labels, Coupling coupling) {
    const int n = static_cast<int>(emissions.rows());
    const int num_labels = static_cast<int>(emissions.cols());
    check(static_cast<int>(labels.size()) == n, "sequence_score: label/emission length mismatch");
    check(transitions.rows() == num_labels + 1 && transitions.cols() == num_labels,
          "sequence_score: transition shape mismatch");
    double score = 0.0;
    int prev = start_state(num_labels);
    for (int i = 0; i < n; ++i) {
        int y = labels[i];
        check(y >= 0 && y < num_labels, "sequence_score: label out of range at position " +
                                            std::to_string(i));
        score += couple(transitions(prev, y), emissions(i, y), coupling);
        prev = y;
    }
    return score;
}

double log_partition(const Mat& emissions, const Mat& transitions, Coupling coupling) {
    const int n = static_cast<int>(emissions.rows());
    const int num_labels = static_cast<int>(emissions.cols());
    check(n >= 1, "log_partition: empty sequence");
    check(transitions.rows() == num_labels + 1 && transitions.cols() == num_labels,
          "log_partition: transition shape mismatch");
    const int start = start_state(num_labels);
    Vec alpha(num_labels);
    for (int y = 0; y < num_labels; ++y)
        alpha(y) = couple(transitions(start, y), emissions(0, y), coupling);
    Vec scores(num_labels), next(num_labels);
    for (int i = 1; i < n; ++i) {
        for (int y = 0; y < num_labels; ++y) {
            for (int p = 0; p < num_labels; ++p)
                scores(p) = alpha(p) + couple(transitions(p, y), emissions(i, y), coupling);
            next(y) = logsumexp(scores);
        }
        alpha = next;
    }
    return logsumexp(alpha);
}

double nll(const Mat& emissions, const Mat& transitions,
           const std::vector<int>& labels, Coupling coupling) {
    return log_partition(emissions, transitions, coupling) -
           sequence_score(emissions, transitions, labels, coupling);
}

std::vector<int> viterbi(const Mat& emissions, const Mat& transitions, Coupling coupling) {
    const int n = static_cast<int>(emissions.rows());
    const int num_labels = static_cast<int>(emissions.cols());
    check(n >= 1, "viterbi: empty sequence");
    check(transitions.rows() == num_labels + 1 && transitions.cols() == num_labels,
          "viterbi: transition shape mismatch");
    const int start = start_state(num_labels);
    Vec best(num_labels);
    for (int y = 0; y < num_labels; ++y)
        best(y) = couple(transitions(start, y), emissions(0, y), coupling);
    std::vector<std::vector<int>> back(n, std::vector<int>(num_labels, -1));
    Vec next(num_labels);
    for (int i = 1; i < n; ++i) {
        for (int y = 0; y < num_labels; ++y) {
            double top = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int p = 0; p < num_labels; ++p) {
                double s = best(p) + couple(transitions(p, y), emissions(i, y), coupling);
                if (s > top) {  // strict: ties keep the lowest p
                    top = s;
                    arg = p;
                }
            }
            next(y) = top;
            back[i][y] = arg;
        }
        best = next;
    }
    int arg = 0;
    double top = best(0);
    for (int y = 1; y < num_labels; ++y)
        if (best(y) > top) {
            top = best(y);
            arg = y;
        }
    std::vector<int> labels(n);
    for (int i = n - 1; i >= 0; --i) {
        labels[i] = arg;
        if (i > 0) arg = back[i][arg];
    }
    return labels;
}

}  // namespace onenet::crf
