#include "graphid/metrics.hpp"

#include "graphid/error.hpp"

namespace graphid {

double f1_score(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw StructuralError("f1_score: length mismatch");
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const bool t = truth[k] != 0;
    const bool p = predicted[k] != 0;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  const bool truth_empty = tp + fn == 0;
  const bool pred_empty = tp + fp == 0;
  if (truth_empty && pred_empty) return 1.0;
  if (truth_empty || pred_empty) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

std::vector<int> pair_bits(const Matrix& adjacency, const std::vector<NodePair>& pairs) {
  std::vector<int> bits;
  bits.reserve(pairs.size());
  for (const auto& p : pairs) bits.push_back(adjacency(p.i, p.j) >= 0.5 ? 1 : 0);
  return bits;
}

double theta_nrmse(const Vector& theta_true, const Vector& theta_hat) {
  if (theta_true.size() != theta_hat.size()) throw StructuralError("theta_nrmse: length mismatch");
  const double scale = theta_true.norm();
  if (scale == 0.0) throw ArgumentError("theta_nrmse: true parameters have zero norm");
  return (theta_hat - theta_true).norm() / scale;
}

}  // namespace graphid
