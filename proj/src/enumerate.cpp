#include "graphid/enumerate.hpp"

#include <algorithm>
#include <cmath>

#include "graphid/error.hpp"

namespace graphid {
namespace {

std::string bit_key(const Matrix& binary) {
  const auto n = binary.rows();
  std::string key;
  key.reserve(num_pairs(static_cast<std::size_t>(n)) + 8);
  key += std::to_string(n) + ':';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) key += binary(i, j) >= 0.5 ? '1' : '0';
  }
  return key;
}

}  // namespace

BernoulliConfigurationPrior::BernoulliConfigurationPrior(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("Bernoulli configuration prior: p must lie in [0,1]");
}

double BernoulliConfigurationPrior::log_mass(const Matrix& completed, const std::vector<NodePair>& unknown) const {
  double total = 0.0;
  for (const auto& pair : unknown) total += completed(pair.i, pair.j) >= 0.5 ? std::log(p_) : std::log1p(-p_);
  return total;
}

EmpiricalConfigurationPrior::EmpiricalConfigurationPrior(const GraphDataset& dataset) : total_(dataset.size()) {
  dataset.validate();
  for (const auto& g : dataset.graphs) ++counts_[bit_key(g)];
}

double EmpiricalConfigurationPrior::log_mass(const Matrix& completed, const std::vector<NodePair>&) const {
  const auto it = counts_.find(bit_key(completed));
  const double count = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((count + 1.0) / (static_cast<double>(total_) + 2.0));
}

std::size_t PosteriorTable::mode() const {
  return static_cast<std::size_t>(std::max_element(probability.begin(), probability.end()) - probability.begin());
}

Matrix PosteriorTable::configuration(const AdjacencyState& problem, std::size_t c) const {
  Matrix a = problem.entries();
  for (std::size_t u = 0; u < unknown.size(); ++u) {
    const double bit = (c >> u) & 1U ? 1.0 : 0.0;
    a(unknown[u].i, unknown[u].j) = bit;
    a(unknown[u].j, unknown[u].i) = bit;
  }
  return a;
}

std::size_t PosteriorTable::index_of(const Matrix& binary) const {
  std::size_t c = 0;
  for (std::size_t u = 0; u < unknown.size(); ++u) {
    if (binary(unknown[u].i, unknown[u].j) >= 0.5) c |= std::size_t{1} << u;
  }
  return c;
}

PosteriorTable enumerate_posterior(const AdjacencyState& problem, const GraphFilter& filter, const Vector& theta,
                                   const SignalSet& signals, const ConfigurationPrior& prior) {
  const std::size_t n_unknown = problem.unknown().size();
  if (n_unknown > PosteriorTable::kMaxUnknown) {
    throw ArgumentError("enumerate_posterior: " + std::to_string(n_unknown) + " unknown pairs exceed the bound of " +
                        std::to_string(PosteriorTable::kMaxUnknown));
  }
  PosteriorTable table;
  table.unknown = problem.unknown();
  const std::size_t count = std::size_t{1} << n_unknown;
  std::vector<double> log_post(count);
  for (std::size_t c = 0; c < count; ++c) {
    const Matrix a = table.configuration(problem, c);
    log_post[c] = log_likelihood(filter, a, theta, signals) + prior.log_mass(a, table.unknown);
  }
  const double peak = *std::max_element(log_post.begin(), log_post.end());
  if (!std::isfinite(peak)) throw NumericalError("enumerate_posterior: every configuration has zero mass");
  table.probability.resize(count);
  double total = 0.0;
  for (std::size_t c = 0; c < count; ++c) total += table.probability[c] = std::exp(log_post[c] - peak);
  for (auto& p : table.probability) p /= total;
  return table;
}

}  // namespace graphid
