#include "graphid/datasets.hpp"

#include <algorithm>
#include <random>

#include "graphid/error.hpp"
#include "graphid/seeding.hpp"

namespace graphid {

Matrix generate_grid(std::size_t height, std::size_t width, std::size_t extra_edges, std::uint64_t seed) {
  const std::size_t n = height * width;
  if (n < 2) throw ArgumentError("generate_grid: need at least 2 nodes");
  const auto nn = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Zero(nn, nn);
  auto link = [&](std::size_t u, std::size_t v) { a(u, v) = a(v, u) = 1.0; };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t node = r * width + c;
      if (c + 1 < width) link(node, node + 1);
      if (r + 1 < height) link(node, node + width);
    }
  }
  if (extra_edges == 0) return a;

  std::vector<NodePair> free_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a(i, j) == 0.0) free_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  }
  if (extra_edges > free_pairs.size()) {
    throw ArgumentError("generate_grid: " + std::to_string(extra_edges) + " extra edges requested but only " +
                        std::to_string(free_pairs.size()) + " non-edges exist");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(free_pairs.begin(), free_pairs.end(), rng);
  for (std::size_t e = 0; e < extra_edges; ++e) link(free_pairs[e].i, free_pairs[e].j);
  return a;
}

Matrix generate_ego_like(std::size_t n_nodes, std::size_t attachment, std::uint64_t seed) {
  if (n_nodes < 2) throw ArgumentError("generate_ego_like: need at least 2 nodes");
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index v = 1; v < n; ++v) a(0, v) = a(v, 0) = 1.0;

  std::mt19937_64 rng(seed);
  std::vector<double> weight(n_nodes, 1.0);  // peripheral degree + 1
  for (std::size_t v = 2; v < n_nodes; ++v) {
    const std::size_t links = std::min(attachment, v - 1);
    std::vector<double> w(weight.begin() + 1, weight.begin() + static_cast<std::ptrdiff_t>(v));
    for (std::size_t e = 0; e < links; ++e) {
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const std::size_t target = pick(rng) + 1;
      w[target - 1] = 0.0;
      a(v, target) = a(target, v) = 1.0;
      weight[target] += 1.0;
      weight[v] += 1.0;
    }
  }
  return a;
}

GraphDataset load_corpus(const std::filesystem::path& directory, std::optional<std::size_t> max_nodes) {
  if (!std::filesystem::is_directory(directory)) {
    throw FormatError("corpus directory " + directory.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".edgelist") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  GraphDataset out;
  for (const auto& f : files) {
    Matrix g = read_edge_list(f);
    if (max_nodes && static_cast<std::size_t>(g.rows()) > *max_nodes) continue;
    out.graphs.push_back(std::move(g));
  }
  return out;
}

void write_corpus(const std::filesystem::path& directory, const GraphDataset& dataset) {
  std::filesystem::create_directories(directory);
  for (std::size_t m = 0; m < dataset.size(); ++m) {
    std::string name = std::to_string(m);
    name.insert(0, name.size() < 5 ? 5 - name.size() : 0, '0');
    write_edge_list(directory / ("graph_" + name + ".edgelist"), dataset.graphs[m]);
  }
}

std::vector<std::string> GeneratorConfig::problems() const {
  std::vector<std::string> out;
  if (generator != "grid" && generator != "ego") out.push_back("generator must be 'grid' or 'ego'");
  if (nodes_min < 2) out.push_back("nodes_min must be >= 2");
  if (nodes_max < nodes_min) out.push_back("nodes_max must be >= nodes_min");
  if (generator == "grid") {
    if (extra_edges_max < extra_edges_min) out.push_back("extra_edges_max must be >= extra_edges_min");
    if (grid_min_side < 1) out.push_back("grid_min_side must be >= 1");
    if (nodes_max >= nodes_min && grid_shapes(nodes_min, nodes_max, grid_min_side).empty()) {
      out.push_back("no grid shape with both sides >= grid_min_side has a node count in [nodes_min, nodes_max]");
    }
  }
  if (generator == "ego" && attachment < 1) out.push_back("attachment must be >= 1");
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> grid_shapes(std::size_t nodes_min, std::size_t nodes_max,
                                                             std::size_t min_side) {
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (std::size_t h = std::max<std::size_t>(min_side, 1); h <= nodes_max; ++h) {
    for (std::size_t w = std::max<std::size_t>(min_side, 1); h * w <= nodes_max; ++w) {
      if (h * w >= nodes_min) shapes.emplace_back(h, w);
    }
  }
  return shapes;
}

GraphShape sample_shape(const GeneratorConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GraphShape shape;
  if (config.generator == "grid") {
    const auto shapes = grid_shapes(config.nodes_min, config.nodes_max, config.grid_min_side);
    if (shapes.empty()) throw ConfigError("no admissible grid shape");
    std::uniform_int_distribution<std::size_t> pick(0, shapes.size() - 1);
    const auto [h, w] = shapes[pick(rng)];
    shape.height = h;
    shape.width = w;
    shape.nodes = h * w;
  } else if (config.generator == "ego") {
    std::uniform_int_distribution<std::size_t> pick(config.nodes_min, config.nodes_max);
    shape.nodes = pick(rng);
  } else {
    throw ConfigError("unknown generator '" + config.generator + "'");
  }
  return shape;
}

Matrix generate_graph(const GeneratorConfig& config, const GraphShape& shape, std::uint64_t seed) {
  if (config.generator == "grid") {
    std::mt19937_64 rng(derive_seed(seed, {1}));
    std::uniform_int_distribution<std::size_t> extras(config.extra_edges_min, config.extra_edges_max);
    return generate_grid(shape.height, shape.width, extras(rng), derive_seed(seed, {2}));
  }
  if (config.generator == "ego") return generate_ego_like(shape.nodes, config.attachment, seed);
  throw ConfigError("unknown generator '" + config.generator + "'");
}

GraphDataset generate_corpus(const GeneratorConfig& config, const GraphShape& shape, std::size_t count,
                             std::uint64_t seed) {
  GraphDataset out;
  out.graphs.reserve(count);
  for (std::size_t m = 0; m < count; ++m) out.graphs.push_back(generate_graph(config, shape, derive_seed(seed, {m})));
  return out;
}

SynthesizedSignals synthesize_signals(const Matrix& adjacency, const GraphFilter& filter,
                                      const SignalSynthesis& options, std::uint64_t seed) {
  if (!(options.noise_variance >= 0.0)) throw ArgumentError("synthesize_signals: noise variance must be >= 0");
  if (!(options.theta_range.first <= options.theta_range.second) ||
      !(options.x_range.first <= options.x_range.second)) {
    throw ArgumentError("synthesize_signals: ranges must satisfy lo <= hi");
  }
  SynthesizedSignals out;
  if (options.theta) {
    filter.check_params(*options.theta);
    out.theta = *options.theta;
  } else {
    std::mt19937_64 rng(derive_seed(seed, {0}));
    std::uniform_real_distribution<double> draw(options.theta_range.first, options.theta_range.second);
    out.theta.resize(static_cast<Eigen::Index>(filter.num_params()));
    for (Eigen::Index p = 0; p < out.theta.size(); ++p) out.theta[p] = draw(rng);
  }

  const auto n = adjacency.rows();
  const auto k_count = static_cast<Eigen::Index>(options.count);
  Matrix x(n, k_count);
  Matrix noise(n, k_count);
  const double noise_sd = std::sqrt(options.noise_variance);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    std::mt19937_64 rng(derive_seed(seed, {1, static_cast<std::uint64_t>(k)}));
    std::uniform_real_distribution<double> draw_x(options.x_range.first, options.x_range.second);
    std::normal_distribution<double> draw_noise(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) x(i, k) = draw_x(rng);
    for (Eigen::Index i = 0; i < n; ++i) noise(i, k) = noise_sd * draw_noise(rng);
  }
  Matrix y = filter.apply(adjacency, out.theta, x) + noise;
  out.signals = SignalSet(std::move(x), std::move(y), options.noise_variance);
  return out;
}

AdjacencyState ExperimentInstance::problem() const {
  Matrix masked = adjacency;
  for (const auto& p : unknown) masked(p.i, p.j) = masked(p.j, p.i) = 0.0;
  return AdjacencyState(masked, unknown);
}

}  // namespace graphid
