#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "graphid/error.hpp"
#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "oracles.hpp"

using namespace graphid;
namespace gt = graphid::testing;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Independent evaluation of sum_p theta_p A^p by repeated multiplication.
Matrix polynomial_direct(const Matrix& a, const Vector& theta) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  Matrix power = Matrix::Identity(a.rows(), a.cols());
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    out += theta[p] * power;
    power = power * a;
  }
  return out;
}

Matrix heat_oracle(const Matrix& a, double theta) {
  Matrix lap = -a;
  lap.diagonal() += a.rowwise().sum();
  return gt::taylor_expm(-theta * lap);
}

// Central differences of <V, h(A) X> over each vech coordinate.
Vector edge_fd(const GraphFilter& f, const Matrix& a, const Vector& theta, const Matrix& v, const Matrix& x,
               double h = 1e-5) {
  const auto n = static_cast<std::size_t>(a.rows());
  Vector g(static_cast<Eigen::Index>(num_pairs(n)));
  for (std::size_t k = 0; k < num_pairs(n); ++k) {
    const auto p = pair_at(k, n);
    Matrix plus = a, minus = a;
    plus(p.i, p.j) += h;
    plus(p.j, p.i) += h;
    minus(p.i, p.j) -= h;
    minus(p.j, p.i) -= h;
    const double fp = (v.array() * (f.matrix(plus, theta) * x).array()).sum();
    const double fm = (v.array() * (f.matrix(minus, theta) * x).array()).sum();
    g[static_cast<Eigen::Index>(k)] = (fp - fm) / (2 * h);
  }
  return g;
}

Vector theta_fd(const GraphFilter& f, const Matrix& a, const Vector& theta, const Matrix& v, const Matrix& x) {
  return gt::central_difference(
      [&](const Vector& t) { return (v.array() * (f.matrix(a, t) * x).array()).sum(); }, theta, 1e-6);
}

}  // namespace

TEST_CASE("polynomial filter examples") {
  PolynomialFilter f(2);
  std::mt19937_64 rng(1);
  const Matrix a = gt::random_binary_graph(6, 0.5, rng);
  CHECK(f.matrix(a, vec({1, 0, 0})) == Matrix::Identity(6, 6));

  const Vector x = gt::random_matrix(6, 1, rng).col(0);
  CHECK(f.apply(a, vec({1, 0, 0}), x).isApprox(x));

  Matrix k3 = Matrix::Ones(3, 3);
  k3.diagonal().setZero();
  CHECK(f.apply(k3, vec({0, 1, 0}), Vector::Ones(3)) == Vector::Constant(3, 2.0));

  CHECK_THROWS_AS(f.matrix(a, vec({1, 0})), StructuralError);
  CHECK_THROWS_AS(f.apply(a, vec({1, 0, 0}), Vector::Ones(5)), StructuralError);
  CHECK_THROWS_AS(f.matrix(Matrix::Zero(2, 3), vec({1, 0, 0})), StructuralError);
  CHECK_THROWS_AS(PolynomialFilter(-1), ArgumentError);
}

TEST_CASE("polynomial filter matches a direct power sum") {
  std::mt19937_64 rng(3);
  for (int order = 0; order <= 4; ++order) {
    PolynomialFilter f(order);
    const Matrix a = gt::random_symmetric_hollow(7, rng, -0.2, 1.2);
    const Vector theta = gt::random_matrix(order + 1, 1, rng).col(0);
    CHECK(gt::rel_error(f.matrix(a, theta), polynomial_direct(a, theta)) < 1e-13);
    const Matrix x = gt::random_matrix(7, 3, rng);
    CHECK(gt::rel_error(f.apply(a, theta, x), polynomial_direct(a, theta) * x) < 1e-13);
  }
}

TEST_CASE("heat filter examples") {
  HeatDiffusionFilter f;
  std::mt19937_64 rng(4);
  const Matrix a = gt::random_binary_graph(5, 0.5, rng);
  CHECK(gt::rel_error(f.matrix(a, vec({0.0})), Matrix::Identity(5, 5)) == 0.0);

  // Frozen from the eigendecomposition of the 2-path Laplacian: (1 +/- e^-1) / 2.
  Matrix path(2, 2);
  path << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 0.6839397205857212, 0.31606027941427883, 0.31606027941427883, 0.6839397205857212;
  CHECK(gt::rel_error(heat_oracle(path, 0.5), expected) < 1e-15);
  CHECK(gt::rel_error(f.matrix(path, vec({0.5})), expected) < 1e-14);
  Vector e0(2);
  e0 << 1, 0;
  CHECK(gt::rel_error_inf(f.apply(path, vec({0.5}), e0), expected.col(0)) < 1e-14);
}

TEST_CASE("heat apply matches the matrix path on random graphs") {
  HeatDiffusionFilter f;
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix a = gt::random_symmetric_hollow(9, rng, 0.0, 1.0);
    const Vector theta = vec({0.3 + 0.1 * rep});
    const Matrix x = gt::random_matrix(9, 4, rng);
    CHECK(gt::rel_error(f.apply(a, theta, x), heat_oracle(a, theta[0]) * x) < 1e-10);
  }
}

TEST_CASE("filter matrices commute with node permutations") {
  std::mt19937_64 rng(8);
  PolynomialFilter poly(3);
  HeatDiffusionFilter heat;
  for (Eigen::Index n = 2; n <= 8; ++n) {
    const Matrix a = gt::random_symmetric_hollow(n, rng, 0.0, 1.0);
    const Matrix p = gt::random_permutation(n, rng);
    const Vector tp = gt::random_matrix(4, 1, rng).col(0);
    CHECK(gt::rel_error(poly.matrix(p * a * p.transpose(), tp), p * poly.matrix(a, tp) * p.transpose()) < 1e-13);
    const Vector th = vec({0.6});
    CHECK(gt::rel_error(heat.matrix(p * a * p.transpose(), th), p * heat.matrix(a, th) * p.transpose()) < 1e-12);
  }
}

TEST_CASE("gradients vanish where the filter does not depend on the input") {
  std::mt19937_64 rng(9);
  const Matrix a = gt::random_binary_graph(5, 0.5, rng);
  const Matrix v = gt::random_matrix(5, 2, rng);
  const Matrix x = gt::random_matrix(5, 2, rng);

  PolynomialFilter poly(2);
  CHECK(poly.edge_gradient(a, vec({0.7, 0, 0}), v, x).values().isZero());
  CHECK(poly.theta_gradient(a, vec({0.7, 0.2, 0.1}), v, x)[0] == doctest::Approx((v.array() * x.array()).sum()));

  HeatDiffusionFilter heat;
  CHECK(heat.edge_gradient(a, vec({0.0}), v, x).values().cwiseAbs().maxCoeff() < 1e-14);
  CHECK(heat.theta_gradient(Matrix::Zero(5, 5), vec({0.5}), v, x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(12);
  PolynomialFilter poly2(2), poly4(4);
  HeatDiffusionFilter heat;
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 3 + rep % 6;
    const Matrix a = gt::random_symmetric_hollow(n, rng, 0.0, 1.0);
    const Matrix v = gt::random_matrix(n, 1 + rep % 3, rng);
    const Matrix x = gt::random_matrix(n, v.cols(), rng);

    for (const PolynomialFilter* f : {&poly2, &poly4}) {
      const Vector theta = gt::random_matrix(static_cast<Eigen::Index>(f->num_params()), 1, rng).col(0);
      CHECK(gt::rel_error_inf(f->edge_gradient(a, theta, v, x).values(), edge_fd(*f, a, theta, v, x)) < 1e-5);
      CHECK(gt::rel_error_inf(f->theta_gradient(a, theta, v, x), theta_fd(*f, a, theta, v, x)) < 1e-6);
    }
    const Vector th = vec({0.3 + 0.04 * rep});
    CHECK(gt::rel_error_inf(heat.edge_gradient(a, th, v, x).values(), edge_fd(heat, a, th, v, x)) < 1e-5);
    CHECK(gt::rel_error_inf(heat.theta_gradient(a, th, v, x), theta_fd(heat, a, th, v, x)) < 1e-6);
  }
}

TEST_CASE("custom filters fall back to finite-difference gradients") {
  CustomFilter f("cubic-shift", 1, [](const Matrix& a, const Vector& t) -> Matrix {
    return t[0] * a * a * a + Matrix::Identity(a.rows(), a.cols());
  });
  std::mt19937_64 rng(13);
  const Matrix a = gt::random_symmetric_hollow(5, rng, 0.0, 1.0);
  const Matrix v = gt::random_matrix(5, 2, rng);
  const Matrix x = gt::random_matrix(5, 2, rng);
  const Vector theta = vec({0.4});

  // The same functional form through the analytic polynomial path.
  PolynomialFilter cubic(3);
  const Vector as_poly = vec({1.0, 0.0, 0.0, 0.4});
  CHECK(gt::rel_error_inf(f.edge_gradient(a, theta, v, x).values(),
                          cubic.edge_gradient(a, as_poly, v, x).values()) < 1e-6);
  CHECK(f.theta_gradient(a, theta, v, x)[0] ==
        doctest::Approx(cubic.theta_gradient(a, as_poly, v, x)[3]).epsilon(1e-6));
}

TEST_CASE("make_filter") {
  CHECK(make_filter("polynomial", 3)->num_params() == 4);
  CHECK(make_filter("heat")->name() == "heat");
  CHECK_THROWS_AS(make_filter("wavelet"), ConfigError);
}

TEST_CASE("initial parameters") {
  std::mt19937_64 a(11), b(11);
  const PolynomialFilter poly(2);
  const HeatDiffusionFilter heat;
  bool poly_negative = false;
  for (int r = 0; r < 50; ++r) {
    const Vector p = poly.initial_params(a);
    REQUIRE(p.size() == 3);
    poly_negative = poly_negative || (p.array() < 0.0).any();
    const Vector h = heat.initial_params(b);
    REQUIRE(h.size() == 1);
    CHECK(h[0] >= 0.0);
  }
  CHECK(poly_negative);

  // Same draws, folded onto the nonnegative half-line.
  std::mt19937_64 c(5), d(5);
  const Vector folded = heat.initial_params(c);
  std::normal_distribution<double> normal(0.0, 0.1);
  CHECK(folded[0] == std::abs(normal(d)));
}
