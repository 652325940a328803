#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "graphid/likelihood.hpp"
#include "graphid/priors.hpp"

namespace graphid {

/// Prior mass over binary completions of a partially observed graph.
class ConfigurationPrior {
 public:
  virtual ~ConfigurationPrior() = default;
  /// Unnormalized log mass of the completed binary graph.
  virtual double log_mass(const Matrix& completed, const std::vector<NodePair>& unknown) const = 0;
};

/// p^{#edges} (1-p)^{#non-edges} over the unknown pairs.
class BernoulliConfigurationPrior final : public ConfigurationPrior {
 public:
  explicit BernoulliConfigurationPrior(double p);
  double log_mass(const Matrix& completed, const std::vector<NodePair>& unknown) const override;

 private:
  double p_;
};

/// Relative frequency of the completed graph in a dataset with add-one
/// smoothing: (count + 1) / (M + 2).
class EmpiricalConfigurationPrior final : public ConfigurationPrior {
 public:
  explicit EmpiricalConfigurationPrior(const GraphDataset& dataset);
  double log_mass(const Matrix& completed, const std::vector<NodePair>& unknown) const override;

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

struct PosteriorTable {
  static constexpr std::size_t kMaxUnknown = 16;

  std::vector<NodePair> unknown;
  /// probability[c]: bit u of c is the value of unknown[u].
  std::vector<double> probability;

  std::size_t mode() const;
  double mode_probability() const { return probability[mode()]; }
  /// Completion of `problem` for configuration index `c`.
  Matrix configuration(const AdjacencyState& problem, std::size_t c) const;
  /// Configuration index of a binary matrix on the unknown pairs.
  std::size_t index_of(const Matrix& binary) const;
};

/// Exact posterior over all 2^|U| binary completions for a known theta.
/// Throws ArgumentError when |U| exceeds PosteriorTable::kMaxUnknown.
PosteriorTable enumerate_posterior(const AdjacencyState& problem, const GraphFilter& filter, const Vector& theta,
                                   const SignalSet& signals, const ConfigurationPrior& prior);

}  // namespace graphid
