#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace graphid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Unordered node pair with i < j.
struct NodePair {
  int i = 0;
  int j = 0;
  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Number of strictly-upper-triangular entries of an n x n matrix.
constexpr std::size_t num_pairs(std::size_t n) { return n * (n - 1) / 2; }

/// Position of (i, j), i < j, in the row-major upper-triangle ordering
/// (0,1),(0,2),...,(0,n-1),(1,2),...
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Inverse of pair_index.
NodePair pair_at(std::size_t index, std::size_t n);

/// Strictly-upper-triangular entries of a symmetric hollow matrix.
class HalfVector {
 public:
  HalfVector() = default;
  explicit HalfVector(std::size_t n_nodes);
  HalfVector(Vector values, std::size_t n_nodes);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
  double& operator[](std::size_t k) { return values_[static_cast<Eigen::Index>(k)]; }
  double at(int i, int j) const;

 private:
  Vector values_;
  std::size_t n_nodes_ = 0;
};

HalfVector vech(const Matrix& adjacency);
Matrix unvech(const HalfVector& half);
Matrix unvech(const Vector& values, std::size_t n_nodes);

/// Throws StructuralError unless `m` is square, symmetric (to `tol`) and hollow.
void require_symmetric_hollow(const Matrix& m, double tol = 0.0);

Matrix laplacian(const Matrix& adjacency);

/// Off-diagonal entries >= 0.5 become 1, others 0; the diagonal is zeroed.
Matrix round_project(const Matrix& adjacency);

struct EntryPartition {
  std::vector<NodePair> observed;
  std::vector<NodePair> unknown;
};

/// Splits all i<j pairs; round(fraction * n(n-1)/2) of them become unknown.
EntryPartition partition_entries(std::size_t n, double unknown_fraction, std::uint64_t seed);

/// A partially known adjacency matrix.
///
/// Entries on observed pairs are fixed binary values; entries on unknown
/// pairs may hold any real value while sampling. Symmetry and the zero
/// diagonal are maintained by every mutator.
class AdjacencyState {
 public:
  AdjacencyState() = default;
  /// `unknown` lists the pairs to be estimated; all other pairs are observed
  /// and must hold 0 or 1 in `adjacency`.
  AdjacencyState(const Matrix& adjacency, std::vector<NodePair> unknown);

  std::size_t n_nodes() const { return n_; }
  const Matrix& entries() const { return entries_; }
  const std::vector<NodePair>& unknown() const { return unknown_; }
  std::vector<NodePair> observed() const;
  /// vech positions of the unknown pairs, ascending.
  const std::vector<std::size_t>& unknown_indices() const { return unknown_index_; }
  bool is_unknown(int i, int j) const;

  double get(int i, int j) const { return entries_(i, j); }
  /// Writes both (i,j) and (j,i). Only unknown pairs may be written.
  void set_unknown(int i, int j, double value);
  /// Overwrites every unknown entry from `values` (one per unknown pair, in
  /// unknown_indices order).
  void set_unknown_values(const Vector& values);
  Vector unknown_values() const;

  HalfVector half() const { return vech(entries_); }

 private:
  std::size_t n_ = 0;
  Matrix entries_;
  std::vector<NodePair> unknown_;
  std::vector<std::size_t> unknown_index_;
  std::vector<char> unknown_flag_;
};

// Plain-text edge list: `N <n>` header, then `<i> <j>` lines (0-based, i<j).
// Blank lines and `#` comments are ignored.
Matrix read_edge_list(std::istream& in, const std::string& source_name = "<stream>");
Matrix read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Matrix& adjacency);
void write_edge_list(const std::filesystem::path& path, const Matrix& adjacency);

// Pair lists (e.g. unknown-entry masks) share the same file format.
std::vector<NodePair> read_pair_list(const std::filesystem::path& path, std::size_t* n_nodes = nullptr);
void write_pair_list(const std::filesystem::path& path, const std::vector<NodePair>& pairs,
                     std::size_t n_nodes);

std::size_t edge_count(const Matrix& binary_adjacency);

}  // namespace graphid
