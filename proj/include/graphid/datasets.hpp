#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "graphid/likelihood.hpp"
#include "graphid/priors.hpp"

namespace graphid {

/// 4-neighbour height x width grid (node r*width + c) plus `extra_edges`
/// uniformly chosen non-adjacent pairs.
Matrix generate_grid(std::size_t height, std::size_t width, std::size_t extra_edges, std::uint64_t seed);

/// Hub node 0 joined to every other node; nodes 2..n-1 arrive in order and each
/// links to min(attachment, i-1) earlier peripheral nodes chosen with
/// probability proportional to (peripheral degree + 1).
Matrix generate_ego_like(std::size_t n_nodes, std::size_t attachment, std::uint64_t seed);

/// Every `*.edgelist` file in `directory`, in filename order. Members larger
/// than `max_nodes` are skipped when set.
GraphDataset load_corpus(const std::filesystem::path& directory, std::optional<std::size_t> max_nodes = {});
void write_corpus(const std::filesystem::path& directory, const GraphDataset& dataset);

/// How random graphs are drawn for experiments.
struct GeneratorConfig {
  std::string generator = "grid";  // grid | ego
  std::size_t nodes_min = 40;
  std::size_t nodes_max = 50;
  std::size_t grid_min_side = 4;
  std::size_t extra_edges_min = 2;
  std::size_t extra_edges_max = 5;
  std::size_t attachment = 1;

  /// Human-readable problems; empty when valid.
  std::vector<std::string> problems() const;
};

/// Structural parameters fixed per graph draw (grid dimensions or ego size).
struct GraphShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t nodes = 0;
  friend auto operator<=>(const GraphShape&, const GraphShape&) = default;
};

/// Grid (height, width) pairs with both sides >= min_side and area in [nodes_min, nodes_max].
std::vector<std::pair<std::size_t, std::size_t>> grid_shapes(std::size_t nodes_min, std::size_t nodes_max,
                                                             std::size_t min_side);
GraphShape sample_shape(const GeneratorConfig& config, std::uint64_t seed);
Matrix generate_graph(const GeneratorConfig& config, const GraphShape& shape, std::uint64_t seed);
/// `count` independent graphs with the given shape.
GraphDataset generate_corpus(const GeneratorConfig& config, const GraphShape& shape, std::size_t count,
                             std::uint64_t seed);

struct SignalSynthesis {
  std::size_t count = 1;  // K
  double noise_variance = 1.0;
  std::pair<double, double> theta_range{-0.1, 0.1};
  std::pair<double, double> x_range{-10.0, 10.0};
  std::optional<Vector> theta;  // overrides the random draw
};

struct SynthesizedSignals {
  Vector theta;
  SignalSet signals;
};

/// theta ~ U(theta_range) per coefficient, x entries ~ U(x_range),
/// y = h_theta(A) x + N(0, noise_variance). Column k depends only on the
/// seed and k, so smaller K is a prefix of larger K.
SynthesizedSignals synthesize_signals(const Matrix& adjacency, const GraphFilter& filter,
                                      const SignalSynthesis& options, std::uint64_t seed);

struct ExperimentInstance {
  Matrix adjacency;
  std::vector<NodePair> unknown;
  Vector theta;
  SignalSet signals;
  std::string generator;
  std::uint64_t seed = 0;

  /// Ground truth with the unknown pairs masked to zero.
  AdjacencyState problem() const;
};

}  // namespace graphid
