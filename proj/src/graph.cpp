#include "graphid/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "graphid/error.hpp"

namespace graphid {

NodePair pair_at(std::size_t index, std::size_t n) {
  std::size_t i = 0;
  std::size_t row_len = n - 1;
  while (index >= row_len) {
    index -= row_len;
    ++i;
    --row_len;
  }
  return {static_cast<int>(i), static_cast<int>(i + 1 + index)};
}

HalfVector::HalfVector(std::size_t n_nodes)
    : values_(Vector::Zero(static_cast<Eigen::Index>(num_pairs(n_nodes)))), n_nodes_(n_nodes) {}

HalfVector::HalfVector(Vector values, std::size_t n_nodes) : values_(std::move(values)), n_nodes_(n_nodes) {
  if (static_cast<std::size_t>(values_.size()) != num_pairs(n_nodes)) {
    throw StructuralError("half-vector of length " + std::to_string(values_.size()) +
                          " does not match n=" + std::to_string(n_nodes));
  }
}

double HalfVector::at(int i, int j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  return values_[static_cast<Eigen::Index>(pair_index(i, j, n_nodes_))];
}

void require_symmetric_hollow(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw StructuralError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected square");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i)) > tol) throw StructuralError("nonzero diagonal at node " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw StructuralError("asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

HalfVector vech(const Matrix& adjacency) {
  require_symmetric_hollow(adjacency);
  const auto n = static_cast<std::size_t>(adjacency.rows());
  HalfVector out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out[k++] = adjacency(i, j);
  }
  return out;
}

Matrix unvech(const Vector& values, std::size_t n_nodes) {
  if (static_cast<std::size_t>(values.size()) != num_pairs(n_nodes)) {
    throw StructuralError("half-vector of length " + std::to_string(values.size()) +
                          " does not match n=" + std::to_string(n_nodes));
  }
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = values[k];
      out(j, i) = values[k];
      ++k;
    }
  }
  return out;
}

Matrix unvech(const HalfVector& half) { return unvech(half.values(), half.n_nodes()); }

Matrix laplacian(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("laplacian: matrix not square");
  Matrix lap = -adjacency;
  lap.diagonal() = adjacency.rowwise().sum();
  return lap;
}

Matrix round_project(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("round_project: matrix not square");
  Matrix out = (adjacency.array() >= 0.5).cast<double>().matrix();
  out.diagonal().setZero();
  return out;
}

EntryPartition partition_entries(std::size_t n, double unknown_fraction, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("partition_entries: need at least 2 nodes");
  if (!(unknown_fraction >= 0.0 && unknown_fraction <= 1.0)) {
    throw ArgumentError("partition_entries: unknown fraction must lie in [0,1]");
  }
  const std::size_t total = num_pairs(n);
  const auto n_unknown = static_cast<std::size_t>(std::llround(unknown_fraction * static_cast<double>(total)));

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_unknown));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_unknown), order.end());

  EntryPartition part;
  for (std::size_t k = 0; k < total; ++k) {
    (k < n_unknown ? part.unknown : part.observed).push_back(pair_at(order[k], n));
  }
  return part;
}

AdjacencyState::AdjacencyState(const Matrix& adjacency, std::vector<NodePair> unknown)
    : n_(static_cast<std::size_t>(adjacency.rows())), entries_(adjacency), unknown_(std::move(unknown)) {
  require_symmetric_hollow(adjacency);
  unknown_flag_.assign(num_pairs(n_), 0);
  for (auto& p : unknown_) {
    if (p.i > p.j) std::swap(p.i, p.j);
    if (p.i == p.j || p.i < 0 || static_cast<std::size_t>(p.j) >= n_) {
      throw StructuralError("unknown pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                            ") is not an off-diagonal pair of an n=" + std::to_string(n_) + " graph");
    }
    const std::size_t k = pair_index(p.i, p.j, n_);
    if (unknown_flag_[k]) throw StructuralError("duplicate unknown pair");
    unknown_flag_[k] = 1;
  }
  std::sort(unknown_.begin(), unknown_.end());
  unknown_index_.reserve(unknown_.size());
  for (const auto& p : unknown_) unknown_index_.push_back(pair_index(p.i, p.j, n_));

  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (unknown_flag_[pair_index(i, j, n_)]) continue;
      const double v = entries_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw StructuralError("observed entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not binary");
      }
    }
  }
}

std::vector<NodePair> AdjacencyState::observed() const {
  std::vector<NodePair> out;
  out.reserve(num_pairs(n_) - unknown_.size());
  for (std::size_t k = 0; k < unknown_flag_.size(); ++k) {
    if (!unknown_flag_[k]) out.push_back(pair_at(k, n_));
  }
  return out;
}

bool AdjacencyState::is_unknown(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  return unknown_flag_[pair_index(i, j, n_)] != 0;
}

void AdjacencyState::set_unknown(int i, int j, double value) {
  if (!is_unknown(i, j)) throw StructuralError("attempt to overwrite an observed entry");
  entries_(i, j) = value;
  entries_(j, i) = value;
}

void AdjacencyState::set_unknown_values(const Vector& values) {
  if (static_cast<std::size_t>(values.size()) != unknown_.size()) {
    throw StructuralError("set_unknown_values: expected " + std::to_string(unknown_.size()) + " values");
  }
  for (std::size_t u = 0; u < unknown_.size(); ++u) {
    const auto& p = unknown_[u];
    entries_(p.i, p.j) = values[static_cast<Eigen::Index>(u)];
    entries_(p.j, p.i) = values[static_cast<Eigen::Index>(u)];
  }
}

Vector AdjacencyState::unknown_values() const {
  Vector out(static_cast<Eigen::Index>(unknown_.size()));
  for (std::size_t u = 0; u < unknown_.size(); ++u) {
    out[static_cast<Eigen::Index>(u)] = entries_(unknown_[u].i, unknown_[u].j);
  }
  return out;
}

namespace {

struct ParsedPairs {
  std::size_t n = 0;
  std::vector<NodePair> pairs;
};

ParsedPairs parse_pairs(std::istream& in, const std::string& source) {
  ParsedPairs out;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!have_header) {
      long long n = 0;
      if (first != "N" || !(ls >> n) || n < 1) fail("expected header `N <num_nodes>`");
      std::string extra;
      if (ls >> extra) fail("trailing tokens after header");
      out.n = static_cast<std::size_t>(n);
      have_header = true;
      continue;
    }
    long long i = 0;
    long long j = 0;
    std::size_t used = 0;
    try {
      i = std::stoll(first, &used);
    } catch (const std::exception&) {
      fail("expected `<i> <j>`");
    }
    if (used != first.size() || !(ls >> j)) fail("expected `<i> <j>`");
    std::string extra;
    if (ls >> extra) fail("trailing tokens after pair");
    if (i < 0 || j < 0 || static_cast<std::size_t>(std::max(i, j)) >= out.n) fail("node index out of range");
    if (i >= j) fail("pair must satisfy i < j");
    out.pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
  }
  if (!have_header) throw FormatError(source + ": missing `N <num_nodes>` header");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

}  // namespace

Matrix read_edge_list(std::istream& in, const std::string& source_name) {
  auto parsed = parse_pairs(in, source_name);
  const auto n = static_cast<Eigen::Index>(parsed.n);
  Matrix a = Matrix::Zero(n, n);
  for (const auto& p : parsed.pairs) {
    a(p.i, p.j) = 1.0;
    a(p.j, p.i) = 1.0;
  }
  return a;
}

Matrix read_edge_list(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_edge_list(in, path.string());
}

void write_edge_list(std::ostream& out, const Matrix& adjacency) {
  const auto n = adjacency.rows();
  out << "N " << n << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (adjacency(i, j) >= 0.5) out << i << ' ' << j << '\n';
    }
  }
}

void write_edge_list(const std::filesystem::path& path, const Matrix& adjacency) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_edge_list(out, adjacency);
}

std::vector<NodePair> read_pair_list(const std::filesystem::path& path, std::size_t* n_nodes) {
  auto in = open_for_read(path);
  auto parsed = parse_pairs(in, path.string());
  if (n_nodes) *n_nodes = parsed.n;
  return parsed.pairs;
}

void write_pair_list(const std::filesystem::path& path, const std::vector<NodePair>& pairs,
                     std::size_t n_nodes) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "N " << n_nodes << '\n';
  for (const auto& p : pairs) out << p.i << ' ' << p.j << '\n';
}

std::size_t edge_count(const Matrix& binary_adjacency) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < binary_adjacency.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < binary_adjacency.cols(); ++j) count += binary_adjacency(i, j) >= 0.5;
  }
  return count;
}

}  // namespace graphid
