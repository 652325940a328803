#pragma once

#include <vector>

#include "graphid/graph.hpp"

namespace graphid {

/// F1 with "edge present" as the positive class: 2TP / (2TP + FP + FN).
/// Both positive sets empty gives 1; exactly one empty gives 0.
double f1_score(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Bits of a matrix on the listed pairs (entries >= 0.5 count as 1).
std::vector<int> pair_bits(const Matrix& adjacency, const std::vector<NodePair>& pairs);

/// ||theta_hat - theta_true||_2 / ||theta_true||_2; throws on a zero-norm truth.
double theta_nrmse(const Vector& theta_true, const Vector& theta_hat);

}  // namespace graphid
