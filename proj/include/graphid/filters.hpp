#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>

#include "graphid/graph.hpp"

namespace graphid {

/// A parametric graph filter h_theta(A).
///
/// Implementations describe the functional form only; parameters are passed
/// on every call so one filter object can be shared between concurrent runs.
/// Signals are N x K matrices (one column per signal); a single vector is the
/// K = 1 case.
///
/// The two gradient hooks differentiate the bilinear form
/// <V, h_theta(A) X> = sum_k v_k^T h_theta(A) x_k. Perturbing the vech
/// coordinate (i,j) moves both A_ij and A_ji. The base-class versions use
/// central finite differences, so a new family only needs `matrix`.
class GraphFilter {
 public:
  virtual ~GraphFilter() = default;

  virtual std::string name() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual Matrix matrix(const Matrix& adjacency, const Vector& theta) const = 0;

  virtual Matrix apply(const Matrix& adjacency, const Vector& theta, const Matrix& signals) const;
  virtual HalfVector edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                   const Matrix& x) const;
  virtual Vector theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                                const Matrix& x) const;

  /// Starting point for estimation: N(0, 0.1^2) per entry.
  virtual Vector initial_params(std::mt19937_64& rng) const;

  /// Throws unless theta has num_params() finite entries.
  void check_params(const Vector& theta) const;

 protected:
  void check_dims(const Matrix& adjacency, const Matrix& v, const Matrix& x) const;
};

/// sum_{p=0}^{order} theta_p A^p
class PolynomialFilter final : public GraphFilter {
 public:
  explicit PolynomialFilter(int order = 2);

  std::string name() const override { return "polynomial"; }
  std::size_t num_params() const override { return static_cast<std::size_t>(order_) + 1; }
  int order() const { return order_; }

  Matrix matrix(const Matrix& adjacency, const Vector& theta) const override;
  Matrix apply(const Matrix& adjacency, const Vector& theta, const Matrix& signals) const override;
  HalfVector edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                           const Matrix& x) const override;
  Vector theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                        const Matrix& x) const override;

 private:
  int order_;
};

/// exp(-theta * L(A)), L(A) = diag(A 1) - A. Continuous (even negative)
/// entries are used as given.
class HeatDiffusionFilter final : public GraphFilter {
 public:
  std::string name() const override { return "heat"; }
  std::size_t num_params() const override { return 1; }

  Matrix matrix(const Matrix& adjacency, const Vector& theta) const override;
  /// One 2N x 2N block exponential per call.
  HalfVector edge_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                           const Matrix& x) const override;
  Vector theta_gradient(const Matrix& adjacency, const Vector& theta, const Matrix& v,
                        const Matrix& x) const override;
  /// |N(0, 0.1^2)|: a diffusion time is nonnegative, and theta < 0 together
  /// with negated unknown entries nearly reproduces the same filter.
  Vector initial_params(std::mt19937_64& rng) const override;
};

/// A filter given only by its matrix function; gradients come from the
/// finite-difference defaults.
class CustomFilter final : public GraphFilter {
 public:
  using MatrixFn = std::function<Matrix(const Matrix&, const Vector&)>;
  CustomFilter(std::string name, std::size_t num_params, MatrixFn fn);

  std::string name() const override { return name_; }
  std::size_t num_params() const override { return num_params_; }
  Matrix matrix(const Matrix& adjacency, const Vector& theta) const override;

 private:
  std::string name_;
  std::size_t num_params_;
  MatrixFn fn_;
};

/// "polynomial" (with `order`) or "heat".
std::shared_ptr<const GraphFilter> make_filter(const std::string& family, int order = 2);

/// Symmetrized gradient of <V, h(A) X> given the matrix gradient G w.r.t. A
/// treated as unconstrained: g_(i,j) = G_ij + G_ji.
HalfVector symmetrize_gradient(const Matrix& g);

}  // namespace graphid
