#pragma once

#include "graphid/sampler.hpp"

namespace graphid {

/// Maximum-likelihood baseline: joint Adam descent on -log p(Y | A, theta, X)
/// over the unknown entries and theta, clipping the entries to [0, 1] after
/// every step. Uses the same starting distribution as the sampler and
/// schedule.total_steps() iterations; the rest of the schedule is ignored.
InferenceResult run_adam_mle_baseline(const AdjacencyState& problem, const GraphFilter& filter,
                                      const SignalSet& signals, const InferenceOptions& options);

}  // namespace graphid
