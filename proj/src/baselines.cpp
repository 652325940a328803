#include "graphid/baselines.hpp"

#include <sstream>

#include "graphid/error.hpp"

namespace graphid {

InferenceResult run_adam_mle_baseline(const AdjacencyState& problem, const GraphFilter& filter,
                                      const SignalSet& signals, const InferenceOptions& options) {
  options.schedule.validate();
  if (signals.n_nodes() != problem.n_nodes()) throw StructuralError("signals do not match the graph size");
  if (!options.learn_theta && !options.initial_theta) throw ConfigError("a frozen theta requires initial_theta");

  std::mt19937_64 rng(options.seed);
  auto [state, theta] = initial_point(problem, filter, options.initial_theta, rng);
  const auto n_unknown = static_cast<Eigen::Index>(problem.unknown().size());
  const auto n_theta = static_cast<Eigen::Index>(filter.num_params());
  const Eigen::Index n_theta_free = options.learn_theta ? n_theta : 0;

  Vector params(n_unknown + n_theta_free);
  params.head(n_unknown) = state.unknown_values();
  if (options.learn_theta) params.tail(n_theta) = theta;
  AdamState adam(static_cast<std::size_t>(params.size()), options.adam);

  InferenceResult result;
  const auto& index = state.unknown_indices();
  const std::size_t total = options.schedule.total_steps();
  for (std::size_t it = 0; it < total; ++it) {
    Vector grad = Vector::Zero(params.size());
    if (signals.count() > 0) {
      const HalfVector edge = likelihood_score_edges(filter, state.entries(), theta, signals);
      for (Eigen::Index u = 0; u < n_unknown; ++u) grad[u] = -edge[index[static_cast<std::size_t>(u)]];
      if (options.learn_theta) grad.tail(n_theta) = -likelihood_grad_theta(filter, state.entries(), theta, signals);
    }
    try {
      adam.step(params, grad);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "Adam baseline aborted at iteration " << it << ": " << e.what();
      throw NumericalError(msg.str());
    }
    params.head(n_unknown) = params.head(n_unknown).cwiseMax(0.0).cwiseMin(1.0);
    state.set_unknown_values(params.head(n_unknown));
    if (options.learn_theta) theta = params.tail(n_theta);
    if ((it + 1) % options.schedule.steps_per_level == 0) {
      result.level_log_likelihood.push_back(log_likelihood(filter, state.entries(), theta, signals));
    }
  }
  result.continuous = state.entries();
  result.adjacency = round_project(state.entries());
  result.theta = theta;
  return result;
}

}  // namespace graphid
