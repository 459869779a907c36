#pragma once

#include <vector>

#include "types.hpp"

namespace onenet::crf {

// Linear-chain CRF over a label set L with an internal START state.
// `transitions` has |L|+1 rows (the last row is START -> label) and |L|
// columns; `emissions` is n x |L|. The default coupling is additive,
// T[prev, y] + emission[i, y]; the multiplicative form keeps the literal
// product reading and is exposed for comparison.

enum class Coupling : uint8_t { Additive, Multiplicative };

inline int start_state(int num_labels) { return num_labels; }

double sequence_score(const Mat& emissions, const Mat& transitions,
                      const std::vector<int>& labels,
                      Coupling coupling = Coupling::Additive);

// log Z via the forward algorithm, O(n * |L|^2), overflow safe.
double log_partition(const Mat& emissions, const Mat& transitions,
                     Coupling coupling = Coupling::Additive);

double nll(const Mat& emissions, const Mat& transitions,
           const std::vector<int>& labels, Coupling coupling = Coupling::Additive);

// Max-plus decoding with backpointers; ties break toward the lowest label
// index.
std::vector<int> viterbi(const Mat& emissions, const Mat& transitions,
                         Coupling coupling = Coupling::Additive);

}  // namespace onenet::crf
