#include "graphid/filters.hpp"

#include <cmath>
#include <vector>

#include "graphid/error.hpp"
#include "graphid/expm.hpp"

namespace graphid {
namespace {

constexpr double kFdStep = 1e-5;

double bilinear(const Matrix& v, const Matrix& hx) { return (v.array() * hx.array()).sum(); }

}  // namespace

Vector GraphFilter::initial_params(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 0.1);
  Vector theta(static_cast<Eigen::Index>(num_params()));
  for (Eigen::Index p = 0; p < theta.size(); ++p) theta[p] = normal(rng);
  return theta;
}

void GraphFilter::check_params(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != num_params()) {
    throw StructuralError(name() + " filter expects " + std::to_string(num_params()) + " parameters, got " +
                          std::to_string(theta.size()));
  }
  if (!theta.allFinite()) throw ArgumentError(name() + " filter parameters must be finite");
}

void GraphFilter::check_dims(const Matrix& adjacency, const Matrix& v, const Matrix& x) const {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("adjacency must be square");
  if (v.rows() != adjacency.rows() || x.rows() != adjacency.rows() || v.cols() != x.cols()) {
    throw StructuralError("signal dimensions do not match the graph");
  }
}

Matrix GraphFilter::apply(const Matrix& adjacency, const Vector& theta, const Matrix& signals) const {
  if (signals.rows() != adjacency.rows()) throw StructuralError("signal length does not match the graph");
  return matrix(adjacency, theta) * signals;
}

HalfVector GraphFilter::edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                      const Matrix& x) const {
  check_dims(adjacency, v, x);
  const auto n = static_cast<std::size_t>(adjacency.rows());
  HalfVector g(n);
  Matrix probe = adjacency;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto [i, j] = pair_at(k, n);
    const double base = adjacency(i, j);
    probe(i, j) = probe(j, i) = base + kFdStep;
    const double up = bilinear(v, apply(probe, theta, x));
    probe(i, j) = probe(j, i) = base - kFdStep;
    const double down = bilinear(v, apply(probe, theta, x));
    probe(i, j) = probe(j, i) = base;
    g[k] = (up - down) / (2.0 * kFdStep);
  }
  return g;
}

Vector GraphFilter::theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                   const Matrix& x) const {
  check_dims(adjacency, v, x);
  check_params(theta);
  Vector g(theta.size());
  Vector probe = theta;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    probe[p] = theta[p] + kFdStep;
    const double up = bilinear(v, apply(adjacency, probe, x));
    probe[p] = theta[p] - kFdStep;
    const double down = bilinear(v, apply(adjacency, probe, x));
    probe[p] = theta[p];
    g[p] = (up - down) / (2.0 * kFdStep);
  }
  return g;
}

HalfVector symmetrize_gradient(const Matrix& g) {
  const auto n = static_cast<std::size_t>(g.rows());
  HalfVector out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out[k++] = g(i, j) + g(j, i);
  }
  return out;
}

// --- polynomial -------------------------------------------------------------

PolynomialFilter::PolynomialFilter(int order) : order_(order) {
  if (order < 0) throw ArgumentError("polynomial filter order must be >= 0");
}

Matrix PolynomialFilter::matrix(const Matrix& adjacency, const Vector& theta) const {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("adjacency must be square");
  check_params(theta);
  // Horner: (((theta_P A + theta_{P-1}) A + ...) A + theta_0)
  const auto n = adjacency.rows();
  Matrix h = theta[order_] * Matrix::Identity(n, n);
  for (int p = order_ - 1; p >= 0; --p) {
    h = h * adjacency;
    h.diagonal().array() += theta[p];
  }
  return h;
}

Matrix PolynomialFilter::apply(const Matrix& adjacency, const Vector& theta, const Matrix& signals) const {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("adjacency must be square");
  if (signals.rows() != adjacency.rows()) throw StructuralError("signal length does not match the graph");
  check_params(theta);
  Matrix out = theta[order_] * signals;
  for (int p = order_ - 1; p >= 0; --p) out = adjacency * out + theta[p] * signals;
  return out;
}

HalfVector PolynomialFilter::edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                           const Matrix& x) const {
  check_dims(adjacency, v, x);
  check_params(theta);
  // d<V, A^p X> = sum_{q+r=p-1} <(A^T)^q V X^T (A^T)^r, dA>
  const auto n = adjacency.rows();
  if (order_ == 0) return HalfVector(static_cast<std::size_t>(n));

  // left[q] = (A^T)^q V and right[r] = (A^r X)^T, so each term is left[q] * right[r].
  std::vector<Matrix> left{v};
  std::vector<Matrix> right{x};
  const Matrix at = adjacency.transpose();
  for (int q = 1; q < order_; ++q) {
    left.push_back(at * left.back());
    right.push_back(adjacency * right.back());
  }
  Matrix g = Matrix::Zero(n, n);
  for (int p = 1; p <= order_; ++p) {
    if (theta[p] == 0.0) continue;
    for (int q = 0; q < p; ++q) g.noalias() += theta[p] * left[q] * right[p - 1 - q].transpose();
  }
  return symmetrize_gradient(g);
}

Vector PolynomialFilter::theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                        const Matrix& x) const {
  check_dims(adjacency, v, x);
  check_params(theta);
  Vector g(order_ + 1);
  Matrix power_x = x;
  for (int p = 0; p <= order_; ++p) {
    g[p] = bilinear(v, power_x);
    if (p < order_) power_x = adjacency * power_x;
  }
  return g;
}

// --- heat diffusion ---------------------------------------------------------

Matrix HeatDiffusionFilter::matrix(const Matrix& adjacency, const Vector& theta) const {
  if (adjacency.rows() != adjacency.cols()) throw StructuralError("adjacency must be square");
  check_params(theta);
  return expm(-theta[0] * laplacian(adjacency));
}

HalfVector HeatDiffusionFilter::edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                              const Matrix& x) const {
  check_dims(adjacency, v, x);
  check_params(theta);
  const auto n = static_cast<std::size_t>(adjacency.rows());
  HalfVector out(n);
  const double rate = theta[0];
  if (rate == 0.0) return out;

  // Gradient of <V, exp(M) X> w.r.t. M is L_exp(M^T, V X^T); dM/da_ij = -rate * dL/da_ij.
  const Matrix m = -rate * laplacian(adjacency);
  const Matrix g = expm_frechet(m.transpose(), v * x.transpose());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out[k++] = -rate * (g(i, i) + g(j, j) - g(i, j) - g(j, i));
  }
  return out;
}

Vector HeatDiffusionFilter::theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                           const Matrix& x) const {
  check_dims(adjacency, v, x);
  check_params(theta);
  const Matrix lap = laplacian(adjacency);
  const Matrix hx = expm(-theta[0] * lap) * x;
  Vector g(1);
  g[0] = -bilinear(v, lap * hx);
  return g;
}

// --- custom -----------------------------------------------------------------

CustomFilter::CustomFilter(std::string name, std::size_t num_params, MatrixFn fn)
    : name_(std::move(name)), num_params_(num_params), fn_(std::move(fn)) {
  if (!fn_) throw ArgumentError("custom filter needs a matrix function");
}

Matrix CustomFilter::matrix(const Matrix& adjacency, const Vector& theta) const {
  check_params(theta);
  Matrix h = fn_(adjacency, theta);
  if (h.rows() != adjacency.rows() || h.cols() != adjacency.cols()) {
    throw StructuralError("custom filter returned a matrix of the wrong size");
  }
  return h;
}

std::shared_ptr<const GraphFilter> make_filter(const std::string& family, int order) {
  if (family == "polynomial") return std::make_shared<PolynomialFilter>(order);
  if (family == "heat") return std::make_shared<HeatDiffusionFilter>();
  throw ConfigError("unknown filter family '" + family + "' (expected polynomial or heat)");
}

Vector HeatDiffusionFilter::initial_params(std::mt19937_64& rng) const {
  return GraphFilter::initial_params(rng).cwiseAbs();
}

}  // namespace graphid
