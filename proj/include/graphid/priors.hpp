#pragma once

#include <memory>
#include <string>
#include <vector>

#include "graphid/graph.hpp"
#include "graphid/scorenet.hpp"

namespace graphid {

/// Binary symmetric hollow adjacency matrices, possibly of different sizes.
struct GraphDataset {
  std::vector<Matrix> graphs;

  std::size_t size() const { return graphs.size(); }
  bool empty() const { return graphs.empty(); }
  /// Members with exactly `n` nodes.
  GraphDataset with_nodes(std::size_t n) const;
  /// Members with at most `n` nodes.
  GraphDataset max_nodes(std::size_t n) const;
  /// Throws StructuralError on the first non-binary, asymmetric or looped member.
  void validate() const;
};

/// An annealed prior score s(a~, sigma) ~ grad log p_sigma(a~).
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual std::string name() const = 0;
  /// Score at the (symmetric, hollow) matrix `noisy` for smoothing level `sigma`,
  /// one entry per vech coordinate.
  virtual HalfVector score(const Matrix& noisy, double sigma) const = 0;
};

/// s = 0: likelihood-only sampling.
class ZeroScore final : public ScoreProvider {
 public:
  std::string name() const override { return "zero"; }
  HalfVector score(const Matrix& noisy, double sigma) const override;
};

/// Independent Bernoulli(p) edges smoothed by N(0, sigma^2):
/// q(t) = p phi(t - 1) + (1 - p) phi(t) per entry.
class BernoulliScore final : public ScoreProvider {
 public:
  explicit BernoulliScore(double p);
  std::string name() const override { return "bernoulli"; }
  double p() const { return p_; }
  HalfVector score(const Matrix& noisy, double sigma) const override;
  double entry_score(double t, double sigma) const;
  /// log q_sigma summed over all vech entries, normalizing constants included.
  double log_density(const Matrix& noisy, double sigma) const;
  double entry_log_density(double t, double sigma) const;

 private:
  double p_;
};

/// Exact score of the Gaussian-smoothed empirical distribution
/// (1/M) sum_m N(a~; a_m, sigma^2 I) over a size-matched dataset.
class EmpiricalScore final : public ScoreProvider {
 public:
  /// Throws ConfigError if the dataset is empty or its members differ in size.
  explicit EmpiricalScore(const GraphDataset& dataset);
  std::string name() const override { return "empirical"; }
  std::size_t n_nodes() const { return n_; }
  std::size_t dataset_size() const { return static_cast<std::size_t>(points_.rows()); }
  HalfVector score(const Matrix& noisy, double sigma) const override;
  double log_density(const Matrix& noisy, double sigma) const;

 private:
  Vector log_weights(const Vector& a, double sigma) const;
  std::size_t n_ = 0;
  Matrix points_;  // M x n(n-1)/2, one half-vector per row
};

/// Forward pass of a trained score network.
class LearnedScore final : public ScoreProvider {
 public:
  explicit LearnedScore(ScoreNetWeights weights);
  std::string name() const override { return "learned"; }
  const ScoreNetWeights& weights() const { return weights_; }
  HalfVector score(const Matrix& noisy, double sigma) const override;

 private:
  ScoreNetWeights weights_;
};

/// Agreement between a candidate score and the exact smoothed-empirical score
/// at one noise level.
struct ScoreAgreement {
  double sigma = 0.0;
  std::size_t samples = 0;
  double mean_squared_deviation = 0.0;  // per entry
  double mean_cosine = 0.0;
};

/// Draws noisy inputs a_m + sigma * n from the corpus and compares `candidate`
/// with the empirical score of the members that share the draw's node count.
std::vector<ScoreAgreement> compare_to_empirical(const ScoreProvider& candidate, const GraphDataset& corpus,
                                                 const std::vector<double>& sigmas, std::size_t samples_per_sigma,
                                                 std::uint64_t seed);

}  // namespace graphid
