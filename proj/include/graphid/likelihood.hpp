#pragma once

#include <filesystem>

#include "graphid/filters.hpp"
#include "graphid/graph.hpp"

namespace graphid {

/// K paired input/output graph signals, one pair per column.
///
/// A zero noise variance is allowed for noiseless synthesis, but every
/// likelihood evaluation with K >= 1 requires it to be positive.
/// K = 0 is accepted and denotes "no observations": the log-likelihood is
/// identically zero and both scores vanish.
struct SignalSet {
  Matrix inputs;   // N x K
  Matrix outputs;  // N x K
  double noise_variance = 1.0;

  SignalSet() = default;
  SignalSet(Matrix x, Matrix y, double noise_var);
  static SignalSet empty(std::size_t n_nodes, double noise_var = 1.0);

  std::size_t n_nodes() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(inputs.cols()); }
  /// First `k` pairs.
  SignalSet head(std::size_t k) const;
};

/// Y - h_theta(A) X
Matrix residuals(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta, const SignalSet& s);

/// -(1 / (2 sigma^2)) * sum_k ||y_k - h_theta(A) x_k||^2 (normalizing constant dropped).
double log_likelihood(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                      const SignalSet& s);

/// Gradient of log_likelihood w.r.t. every vech coordinate (callers mask to
/// the unknown set).
HalfVector likelihood_score_edges(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                                  const SignalSet& s);
HalfVector likelihood_score_edges(const GraphFilter& filter, const AdjacencyState& state, const Vector& theta,
                                  const SignalSet& s);

/// Gradient of log_likelihood w.r.t. theta.
Vector likelihood_grad_theta(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                             const SignalSet& s);

// CSV with header `k,node,x,y`, one row per (pair, node).
SignalSet read_signals_csv(const std::filesystem::path& path, double noise_variance);
void write_signals_csv(const std::filesystem::path& path, const SignalSet& s);

}  // namespace graphid
