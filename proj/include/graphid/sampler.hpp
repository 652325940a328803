#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "graphid/likelihood.hpp"
#include "graphid/priors.hpp"

namespace graphid {

/// Noise levels sigma_1 > ... > sigma_L, T steps per level, base step size
/// epsilon and temperature tau. Level l uses alpha_l = epsilon * sigma_l^2 / sigma_L^2.
struct AnnealingSchedule {
  std::vector<double> noise_levels;
  std::size_t steps_per_level = 300;
  double step_size = 1e-6;
  double temperature = 0.5;

  /// `levels` values evenly spaced from `first` down to `last`.
  static AnnealingSchedule linear(double first, double last, std::size_t levels, std::size_t steps_per_level,
                                  double step_size, double temperature);
  /// 10 levels 0.5 -> 0.03, T = 300, epsilon = 1e-6, tau = 0.5.
  static AnnealingSchedule defaults();

  void validate() const;
  std::size_t levels() const { return noise_levels.size(); }
  std::size_t total_steps() const { return levels() * steps_per_level; }
  double level_step(std::size_t level) const;
};

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction, minimizing the loss whose gradient is passed in.
class AdamState {
 public:
  explicit AdamState(std::size_t dim = 0, AdamConfig config = {});

  /// Updates `params` in place. Throws NumericalError on a non-finite gradient.
  void step(Vector& params, const Vector& gradient);

  const AdamConfig& config() const { return config_; }
  std::size_t steps() const { return steps_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  Vector m_;
  Vector v_;
  std::size_t steps_ = 0;
};

struct InferenceOptions {
  AnnealingSchedule schedule = AnnealingSchedule::defaults();
  AdamConfig adam;
  std::uint64_t seed = 0;
  /// When false, theta stays at `initial_theta` (which must then be set).
  bool learn_theta = true;
  std::optional<Vector> initial_theta;
};

struct InferenceResult {
  Matrix adjacency;   // round_project(continuous); observed entries equal the input
  Vector theta;
  Matrix continuous;  // final iterate before projection
  std::vector<double> level_log_likelihood;  // log-likelihood at the end of each level
};

/// One annealed Langevin update of the unknown entries at noise level `level`.
/// Observed entries are left untouched; one standard normal draw per unknown pair.
void langevin_step(AdjacencyState& state, const Vector& theta, const AnnealingSchedule& schedule,
                   std::size_t level, const GraphFilter& filter, const SignalSet& signals,
                   const ScoreProvider& prior, std::mt19937_64& rng);

/// Annealed Langevin sampling of the unknown entries jointly with Adam on
/// theta. `problem` carries the observed values and the unknown mask; its
/// current unknown values are ignored (they are re-initialized from the seed).
InferenceResult run_inference(const AdjacencyState& problem, const GraphFilter& filter, const SignalSet& signals,
                              const ScoreProvider& prior, const InferenceOptions& options);

/// Starting point shared by the sampler and the Adam baseline:
/// unknown entries ~ U[0,1], theta ~ N(0, 0.1^2) unless given.
struct InitialPoint {
  AdjacencyState state;
  Vector theta;
};
InitialPoint initial_point(const AdjacencyState& problem, const GraphFilter& filter,
                           const std::optional<Vector>& initial_theta, std::mt19937_64& rng);

}  // namespace graphid
