#include "graphid/likelihood.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "graphid/error.hpp"

namespace graphid {

SignalSet::SignalSet(Matrix x, Matrix y, double noise_var)
    : inputs(std::move(x)), outputs(std::move(y)), noise_variance(noise_var) {
  if (inputs.rows() != outputs.rows() || inputs.cols() != outputs.cols()) {
    throw StructuralError("signal inputs and outputs must have the same shape");
  }
  if (!(noise_variance >= 0.0)) throw ArgumentError("noise variance must be non-negative");
}

SignalSet SignalSet::empty(std::size_t n_nodes, double noise_var) {
  const auto n = static_cast<Eigen::Index>(n_nodes);
  return SignalSet(Matrix(n, 0), Matrix(n, 0), noise_var);
}

SignalSet SignalSet::head(std::size_t k) const {
  if (k > count()) throw ArgumentError("requested more signal pairs than available");
  const auto kk = static_cast<Eigen::Index>(k);
  return SignalSet(inputs.leftCols(kk), outputs.leftCols(kk), noise_variance);
}

namespace {

void check_signals(const Matrix& adjacency, const SignalSet& s, bool needs_variance = true) {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("adjacency must be square");
  if (s.inputs.rows() != adjacency.rows()) {
    throw StructuralError("signals have " + std::to_string(s.inputs.rows()) + " nodes, graph has " +
                          std::to_string(adjacency.rows()));
  }
  if (needs_variance && s.count() > 0 && !(s.noise_variance > 0.0)) {
    throw ArgumentError("likelihood needs a positive noise variance");
  }
}

}  // namespace

Matrix residuals(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta, const SignalSet& s) {
  check_signals(adjacency, s, false);
  return s.outputs - filter.apply(adjacency, theta, s.inputs);
}

double log_likelihood(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                      const SignalSet& s) {
  check_signals(adjacency, s);
  if (s.count() == 0) return 0.0;
  return -residuals(filter, adjacency, theta, s).squaredNorm() / (2.0 * s.noise_variance);
}

HalfVector likelihood_score_edges(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                                  const SignalSet& s) {
  check_signals(adjacency, s);
  const auto n = static_cast<std::size_t>(adjacency.rows());
  if (s.count() == 0) return HalfVector(n);
  // d/da [-(1/2s2)||y - h x||^2] = (1/s2) d/da <r, h x> with r held fixed.
  const Matrix r = residuals(filter, adjacency, theta, s);
  HalfVector g = filter.edge_gradient(adjacency, theta, r, s.inputs);
  g.values() /= s.noise_variance;
  return g;
}

HalfVector likelihood_score_edges(const GraphFilter& filter, const AdjacencyState& state, const Vector& theta,
                                  const SignalSet& s) {
  return likelihood_score_edges(filter, state.entries(), theta, s);
}

Vector likelihood_grad_theta(const GraphFilter& filter, const Matrix& adjacency, const Vector& theta,
                             const SignalSet& s) {
  check_signals(adjacency, s);
  if (s.count() == 0) return Vector::Zero(static_cast<Eigen::Index>(filter.num_params()));
  const Matrix r = residuals(filter, adjacency, theta, s);
  return filter.theta_gradient(adjacency, theta, r, s.inputs) / s.noise_variance;
}

SignalSet read_signals_csv(const std::filesystem::path& path, double noise_variance) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty signal file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "k,node,x,y") throw FormatError(path.string() + ":1: expected header `k,node,x,y`");

  std::map<std::pair<long, long>, std::pair<double, double>> cells;
  long max_k = -1;
  long max_node = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string fk, fn, fx, fy, extra;
    if (!std::getline(ls, fk, ',') || !std::getline(ls, fn, ',') || !std::getline(ls, fx, ',') ||
        !std::getline(ls, fy, ',') || std::getline(ls, extra, ',')) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    }
    try {
      const long k = std::stol(fk);
      const long node = std::stol(fn);
      if (k < 0 || node < 0) throw std::out_of_range("negative index");
      if (!cells.emplace(std::pair{k, node}, std::pair{std::stod(fx), std::stod(fy)}).second) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": duplicate (k,node)");
      }
      max_k = std::max(max_k, k);
      max_node = std::max(max_node, node);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  const long k_count = max_k + 1;
  const long n_count = max_node + 1;
  if (static_cast<long>(cells.size()) != k_count * n_count) {
    throw FormatError(path.string() + ": signal table is incomplete");
  }
  Matrix x(n_count, k_count);
  Matrix y(n_count, k_count);
  for (const auto& [key, value] : cells) {
    x(key.second, key.first) = value.first;
    y(key.second, key.first) = value.second;
  }
  return SignalSet(std::move(x), std::move(y), noise_variance);
}

void write_signals_csv(const std::filesystem::path& path, const SignalSet& s) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "k,node,x,y\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < s.inputs.cols(); ++k) {
    for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
      out << k << ',' << i << ',' << s.inputs(i, k) << ',' << s.outputs(i, k) << '\n';
    }
  }
}

}  // namespace graphid
