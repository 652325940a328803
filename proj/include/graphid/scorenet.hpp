#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graphid/graph.hpp"

namespace graphid {

/// One message-passing block: H' = tanh(A H W_agg + H W_self + 1 b^T).
struct ScoreNetLayer {
  Matrix w_agg;   // d_in x d
  Matrix w_self;  // d_in x d
  Vector bias;    // d
};

/// Parameters of the permutation-equivariant edge score network.
///
/// Node features start as h0_i = [1, deg_i / N] and pass through the layers.
/// Each pair (i,j) is described by u_ij = [h_i * h_j, h_i + h_j, A_ij, log(1/sigma)]
/// (length 2d + 2) and scored by w2^T tanh(W1 u_ij + b1) + b2; the output is
/// that raw score divided by sigma.
struct ScoreNetWeights {
  static constexpr int kFormatVersion = 1;
  static constexpr int kInputFeatures = 2;

  int version = kFormatVersion;
  std::vector<ScoreNetLayer> layers;
  Matrix head_w1;  // d x (2d + 2)
  Vector head_b1;  // d
  Vector head_w2;  // d
  double head_b2 = 0.0;

  std::size_t hidden_dim() const;
  /// Throws FormatError naming the first inconsistent tensor.
  void validate() const;

  static ScoreNetWeights zeros(std::size_t l_net, std::size_t hidden_dim);
  static ScoreNetWeights random(std::size_t l_net, std::size_t hidden_dim, std::uint64_t seed, double scale = 0.3);
};

HalfVector scorenet_forward(const ScoreNetWeights& weights, const Matrix& noisy_adjacency, double sigma);

ScoreNetWeights load_weights(const std::filesystem::path& path);
ScoreNetWeights parse_weights(const std::string& json_text, const std::string& source = "<string>");
std::string serialize_weights(const ScoreNetWeights& weights);
/// Writes to a temporary sibling and renames it into place.
void save_weights(const ScoreNetWeights& weights, const std::filesystem::path& path);

}  // namespace graphid
