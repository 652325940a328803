#include "graphid/sampler.hpp"

#include <cmath>
#include <sstream>

#include "graphid/error.hpp"

namespace graphid {

AnnealingSchedule AnnealingSchedule::linear(double first, double last, std::size_t levels,
                                            std::size_t steps_per_level, double step_size, double temperature) {
  AnnealingSchedule s;
  s.steps_per_level = steps_per_level;
  s.step_size = step_size;
  s.temperature = temperature;
  if (levels == 1) {
    s.noise_levels = {last};
  } else {
    for (std::size_t l = 0; l < levels; ++l) {
      const double frac = static_cast<double>(l) / static_cast<double>(levels - 1);
      s.noise_levels.push_back(first + (last - first) * frac);
    }
  }
  return s;
}

AnnealingSchedule AnnealingSchedule::defaults() { return linear(0.5, 0.03, 10, 300, 1e-6, 0.5); }

void AnnealingSchedule::validate() const {
  if (noise_levels.empty()) throw ConfigError("schedule: at least one noise level is required");
  for (std::size_t l = 0; l < noise_levels.size(); ++l) {
    if (!(noise_levels[l] > 0.0)) throw ConfigError("schedule: noise levels must be positive");
    if (l > 0 && !(noise_levels[l] < noise_levels[l - 1])) {
      throw ConfigError("schedule: noise levels must be strictly decreasing");
    }
  }
  if (steps_per_level < 1) throw ConfigError("schedule: steps per level must be >= 1");
  if (!(step_size > 0.0)) throw ConfigError("schedule: step size must be positive");
  if (!(temperature >= 0.0)) throw ConfigError("schedule: temperature must be non-negative");
}

double AnnealingSchedule::level_step(std::size_t level) const {
  const double last = noise_levels.back();
  return step_size * noise_levels.at(level) * noise_levels.at(level) / (last * last);
}

AdamState::AdamState(std::size_t dim, AdamConfig config)
    : config_(config),
      m_(Vector::Zero(static_cast<Eigen::Index>(dim))),
      v_(Vector::Zero(static_cast<Eigen::Index>(dim))) {}

void AdamState::step(Vector& params, const Vector& gradient) {
  if (gradient.size() != m_.size() || params.size() != m_.size()) {
    throw StructuralError("Adam: parameter/gradient length does not match optimizer state");
  }
  if (!gradient.allFinite()) {
    throw NumericalError("Adam: non-finite gradient at step " + std::to_string(steps_ + 1));
  }
  ++steps_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * gradient;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * gradient.cwiseAbs2();
  const double t = static_cast<double>(steps_);
  const double m_corr = 1.0 - std::pow(config_.beta1, t);
  const double v_corr = 1.0 - std::pow(config_.beta2, t);
  params.array() -= config_.learning_rate * (m_.array() / m_corr) / ((v_.array() / v_corr).sqrt() + config_.epsilon);
}

void langevin_step(AdjacencyState& state, const Vector& theta, const AnnealingSchedule& schedule,
                   std::size_t level, const GraphFilter& filter, const SignalSet& signals,
                   const ScoreProvider& prior, std::mt19937_64& rng) {
  const double sigma = schedule.noise_levels.at(level);
  const double alpha = schedule.level_step(level);
  const double noise_scale = std::sqrt(2.0 * alpha * schedule.temperature);

  const HalfVector lik = likelihood_score_edges(filter, state.entries(), theta, signals);
  const HalfVector pri = prior.score(state.entries(), sigma);

  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& index = state.unknown_indices();
  const auto& pairs = state.unknown();
  for (std::size_t u = 0; u < index.size(); ++u) {
    const double delta = lik[index[u]] + pri[index[u]];
    if (!std::isfinite(delta)) {
      throw NumericalError("non-finite score for pair (" + std::to_string(pairs[u].i) + "," +
                           std::to_string(pairs[u].j) + ")");
    }
    const double z = normal(rng);
    state.set_unknown(pairs[u].i, pairs[u].j, state.get(pairs[u].i, pairs[u].j) + alpha * delta + noise_scale * z);
  }
}

InitialPoint initial_point(const AdjacencyState& problem, const GraphFilter& filter,
                           const std::optional<Vector>& initial_theta, std::mt19937_64& rng) {
  InitialPoint start{problem, Vector()};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector values(static_cast<Eigen::Index>(problem.unknown().size()));
  for (Eigen::Index u = 0; u < values.size(); ++u) values[u] = unit(rng);
  start.state.set_unknown_values(values);

  if (initial_theta) {
    filter.check_params(*initial_theta);
    start.theta = *initial_theta;
  } else {
    start.theta = filter.initial_params(rng);
  }
  return start;
}

InferenceResult run_inference(const AdjacencyState& problem, const GraphFilter& filter, const SignalSet& signals,
                              const ScoreProvider& prior, const InferenceOptions& options) {
  options.schedule.validate();
  if (signals.n_nodes() != problem.n_nodes()) throw StructuralError("signals do not match the graph size");
  if (!options.learn_theta && !options.initial_theta) {
    throw ConfigError("a frozen theta requires initial_theta");
  }

  std::mt19937_64 rng(options.seed);
  auto [state, theta] = initial_point(problem, filter, options.initial_theta, rng);
  AdamState adam(filter.num_params(), options.adam);

  InferenceResult result;
  const auto& schedule = options.schedule;
  std::size_t iteration = 0;
  for (std::size_t level = 0; level < schedule.levels(); ++level) {
    for (std::size_t t = 0; t < schedule.steps_per_level; ++t, ++iteration) {
      try {
        langevin_step(state, theta, schedule, level, filter, signals, prior, rng);
        if (options.learn_theta && signals.count() > 0) {
          const Vector grad = -likelihood_grad_theta(filter, state.entries(), theta, signals);
          adam.step(theta, grad);
        }
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "inference aborted at iteration " << iteration << " (level " << level << ", step " << t
            << "): " << e.what();
        throw NumericalError(msg.str());
      }
    }
    result.level_log_likelihood.push_back(log_likelihood(filter, state.entries(), theta, signals));
  }

  result.continuous = state.entries();
  result.adjacency = round_project(state.entries());
  result.theta = theta;
  return result;
}

}  // namespace graphid
