#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "graphid/config.hpp"
#include "graphid/datasets.hpp"
#include "graphid/sampler.hpp"

namespace graphid {

enum class Method { langevin_prior, langevin_noprior, adam_mle };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Everything a sweep needs. Defaults reproduce the grid experiment at full
/// scale; see `BenchmarkConfig::keys()` for the accepted configuration keys.
struct BenchmarkConfig {
  GeneratorConfig generator;
  std::string filter = "polynomial";
  int order = 2;
  double theta_min = -0.1;
  double theta_max = 0.1;
  double x_min = -10.0;
  double x_max = 10.0;
  double noise_variance = 1.0;
  std::vector<std::size_t> k_grid{1, 2, 4, 8};
  double unknown_fraction = 0.25;
  AnnealingSchedule schedule = AnnealingSchedule::defaults();
  double learning_rate = 0.01;
  std::string prior = "empirical";  // empirical | bernoulli | zero | learned
  std::size_t prior_corpus_size = 200;
  std::string prior_corpus_dir;  // load instead of generating when set
  double bernoulli_p = 0.5;
  std::string weights;
  std::vector<Method> methods{Method::langevin_prior, Method::langevin_noprior, Method::adam_mle};
  std::size_t trials = 100;
  std::uint64_t seed_base = 1;
  std::string output;
  std::size_t threads = 1;
  bool timing = false;  // wall_ms is written as 0 unless enabled

  /// Throws ConfigError listing every invalid or unknown key at once.
  static BenchmarkConfig from_keys(const KeyValueConfig& keys);
  static const std::vector<std::string>& keys();
  /// Every problem found; empty when valid.
  std::vector<std::string> problems() const;
  /// Throws ConfigError listing problems().
  void validate() const;
  KeyValueConfig to_keys() const;
};

struct TrialRecord {
  Method method = Method::langevin_prior;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double theta_nrmse = 0.0;
  double wall_ms = 0.0;
};

struct AggregateRecord {
  Method method = Method::langevin_prior;
  std::size_t k = 0;
  std::size_t trials = 0;
  double f1_mean = 0.0;
  double f1_stderr = 0.0;
  double nrmse_mean = 0.0;
  double nrmse_stderr = 0.0;
  double wall_mean = 0.0;
  double wall_stderr = 0.0;
};

struct BenchmarkResult {
  std::vector<TrialRecord> trials;        // sorted by (method order, K, seed)
  std::vector<AggregateRecord> aggregates;  // one per (method, K)

  const AggregateRecord& aggregate(Method m, std::size_t k) const;
  /// `method,K,seed,f1,theta_nrmse,wall_ms`; aggregate rows use `mean` and
  /// `stderr` in the seed column.
  std::string csv() const;
};

/// mean and standard error (sample standard deviation / sqrt(n)), accumulated
/// in the given order.
std::pair<double, double> mean_and_stderr(const std::vector<double>& values);

/// Builds the (K, seed) instance consumed by every method.
ExperimentInstance make_instance(const BenchmarkConfig& config, std::uint64_t seed, std::size_t k);

/// Shape of the graph drawn for trial `seed`.
GraphShape instance_shape(const BenchmarkConfig& config, std::uint64_t seed);

/// Graphs backing the empirical prior for one shape.
GraphDataset prior_corpus(const BenchmarkConfig& config, const GraphShape& shape);

/// The configured prior for graphs of the given shape. The empirical prior
/// uses a generated corpus of that shape, or the members of prior_corpus_dir
/// with the same node count.
std::shared_ptr<const ScoreProvider> make_prior(const BenchmarkConfig& config, const GraphShape& shape);

/// Schedule, learning rate and per-method sampler seed for trial `seed`.
InferenceOptions method_options(const BenchmarkConfig& config, std::uint64_t seed, Method method);

/// `prior` is only consulted by langevin_prior.
InferenceResult run_method(Method method, const AdjacencyState& problem, const GraphFilter& filter,
                           const SignalSet& signals, const ScoreProvider& prior, const InferenceOptions& options);

BenchmarkResult run_benchmark(const BenchmarkConfig& config);
/// Runs and writes `config.output` plus `<output>.meta.json`.
BenchmarkResult run_benchmark_to_file(const BenchmarkConfig& config);

}  // namespace graphid
