#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "graphid/error.hpp"
#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "graphid/likelihood.hpp"
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

// Loop-based re-evaluation of -(1/2s2) sum_k ||y_k - H x_k||^2.
double direct_log_likelihood(const Matrix& h, const SignalSet& s) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < s.inputs.cols(); ++k) {
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      double pred = 0.0;
      for (Eigen::Index j = 0; j < h.cols(); ++j) pred += h(i, j) * s.inputs(j, k);
      const double r = s.outputs(i, k) - pred;
      total += r * r;
    }
  }
  return -total / (2.0 * s.noise_variance);
}

SignalSet random_signals(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng, double var = 1.0) {
  return SignalSet(gt::random_matrix(n, k, rng, 2.0), gt::random_matrix(n, k, rng, 2.0), var);
}

}  // namespace

TEST_CASE("log_likelihood examples") {
  PolynomialFilter f(2);
  std::mt19937_64 rng(1);
  const Matrix a = gt::random_binary_graph(5, 0.5, rng);
  const Vector theta = vec({0.2, -0.1, 0.05});
  const Matrix x = gt::random_matrix(5, 3, rng);
  const SignalSet clean(x, f.apply(a, theta, x), 1.0);
  CHECK(log_likelihood(f, a, theta, clean) == doctest::Approx(0.0));

  // Identity filter, residual r = y - x with ||r||^2 = 2.
  Matrix x1 = Matrix::Zero(5, 1), y1 = Matrix::Zero(5, 1);
  y1(0, 0) = 1.0;
  y1(3, 0) = -1.0;
  CHECK(log_likelihood(f, a, vec({1, 0, 0}), SignalSet(x1, y1, 1.0)) == -1.0);
}

TEST_CASE("log_likelihood matches an independent loop evaluator") {
  std::mt19937_64 rng(2);
  PolynomialFilter poly(3);
  HeatDiffusionFilter heat;
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 3 + rep;
    const Matrix a = gt::random_symmetric_hollow(n, rng, 0.0, 1.0);
    const SignalSet s = random_signals(n, 1 + rep % 4, rng, 0.5 + rep);
    const Vector tp = gt::random_matrix(4, 1, rng).col(0);
    CHECK(log_likelihood(poly, a, tp, s) == doctest::Approx(direct_log_likelihood(poly.matrix(a, tp), s)));
    const Vector th = vec({0.5});
    CHECK(log_likelihood(heat, a, th, s) ==
          doctest::Approx(direct_log_likelihood(gt::taylor_expm(-0.5 * (Matrix(a.rowwise().sum().asDiagonal()) - a)), s)));
  }
}

TEST_CASE("log_likelihood is invariant under simultaneous node permutation") {
  std::mt19937_64 rng(3);
  PolynomialFilter f(2);
  HeatDiffusionFilter heat;
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::Index n = 4 + rep;
    const Matrix a = gt::random_symmetric_hollow(n, rng, 0.0, 1.0);
    const SignalSet s = random_signals(n, 3, rng);
    const Matrix p = gt::random_permutation(n, rng);
    const SignalSet ps(p * s.inputs, p * s.outputs, s.noise_variance);
    const Vector theta = vec({0.1, 0.3, -0.2});
    CHECK(log_likelihood(f, p * a * p.transpose(), theta, ps) == doctest::Approx(log_likelihood(f, a, theta, s)));
    CHECK(log_likelihood(heat, p * a * p.transpose(), vec({0.4}), ps) ==
          doctest::Approx(log_likelihood(heat, a, vec({0.4}), s)));
  }
}

TEST_CASE("scores vanish at zero residual and for a constant filter") {
  std::mt19937_64 rng(4);
  PolynomialFilter f(2);
  HeatDiffusionFilter heat;
  const Matrix a = gt::random_symmetric_hollow(5, rng, 0.0, 1.0);
  const Matrix x = gt::random_matrix(5, 2, rng);
  const Vector theta = vec({0.3, 0.2, 0.1});

  const SignalSet clean(x, f.apply(a, theta, x), 1.0);
  CHECK(likelihood_score_edges(f, a, theta, clean).values().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(likelihood_grad_theta(f, a, theta, clean).cwiseAbs().maxCoeff() < 1e-12);

  const SignalSet noisy = random_signals(5, 2, rng);
  CHECK(likelihood_score_edges(f, a, vec({2.0, 0, 0}), noisy).values().isZero());
  CHECK(likelihood_grad_theta(heat, Matrix::Zero(5, 5), vec({0.5}), noisy).cwiseAbs().maxCoeff() < 1e-14);

  const SignalSet none = SignalSet::empty(5);
  CHECK(log_likelihood(f, a, theta, none) == 0.0);
  CHECK(likelihood_score_edges(f, a, theta, none).values().isZero());
  CHECK(likelihood_grad_theta(f, a, theta, none).isZero());
}

TEST_CASE("likelihood scores match finite differences of log_likelihood") {
  std::mt19937_64 rng(5);
  PolynomialFilter poly(2);
  HeatDiffusionFilter heat;
  for (int rep = 0; rep < 6; ++rep) {
    const Eigen::Index n = 5;
    const Matrix a = gt::random_symmetric_hollow(n, rng, 0.0, 1.0);
    const SignalSet s = random_signals(n, 1 + rep, rng, 0.7);
    for (const GraphFilter* f : {static_cast<const GraphFilter*>(&poly), static_cast<const GraphFilter*>(&heat)}) {
      const Vector theta = f == &heat ? vec({0.45}) : gt::random_matrix(3, 1, rng).col(0);
      const Vector got = likelihood_score_edges(*f, a, theta, s).values();
      const Vector fd = gt::central_difference(
          [&](const Vector& half) { return log_likelihood(*f, unvech(half, n), theta, s); },
          vech(a).values(), 1e-5);
      CHECK(gt::rel_error_inf(got, fd) < 1e-5);
      const Vector fdt = gt::central_difference(
          [&](const Vector& t) { return log_likelihood(*f, a, t, s); }, theta, 1e-6);
      CHECK(gt::rel_error_inf(likelihood_grad_theta(*f, a, theta, s), fdt) < 1e-6);
    }
  }
}

TEST_CASE("score over K pairs is the sum of per-pair scores") {
  std::mt19937_64 rng(6);
  HeatDiffusionFilter heat;
  const Matrix a = gt::random_symmetric_hollow(6, rng, 0.0, 1.0);
  const SignalSet s = random_signals(6, 4, rng, 2.0);
  const Vector theta = vec({0.5});
  Vector sum = Vector::Zero(15);
  Vector sum_theta = Vector::Zero(1);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const SignalSet one(s.inputs.col(k), s.outputs.col(k), 2.0);
    sum += likelihood_score_edges(heat, a, theta, one).values();
    sum_theta += likelihood_grad_theta(heat, a, theta, one);
  }
  CHECK(gt::rel_error_inf(likelihood_score_edges(heat, a, theta, s).values(), sum) < 1e-12);
  CHECK(gt::rel_error_inf(likelihood_grad_theta(heat, a, theta, s), sum_theta) < 1e-12);
}

TEST_CASE("signal set validation") {
  CHECK_THROWS_AS(SignalSet(Matrix::Zero(3, 2), Matrix::Zero(3, 1), 1.0), StructuralError);
  CHECK_THROWS_AS(SignalSet(Matrix::Zero(3, 2), Matrix::Zero(3, 2), -1.0), ArgumentError);
  PolynomialFilter f(2);
  const SignalSet zero_var(Matrix::Ones(3, 1), Matrix::Ones(3, 1), 0.0);
  CHECK_THROWS_AS(log_likelihood(f, Matrix::Zero(3, 3), vec({1, 0, 0}), zero_var), ArgumentError);
  const SignalSet wrong_n(Matrix::Ones(4, 1), Matrix::Ones(4, 1), 1.0);
  CHECK_THROWS_AS(log_likelihood(f, Matrix::Zero(3, 3), vec({1, 0, 0}), wrong_n), StructuralError);
  CHECK(SignalSet(Matrix::Ones(3, 5), Matrix::Ones(3, 5), 1.0).head(2).count() == 2);
}

TEST_CASE("signal CSV round trip and malformed files") {
  std::mt19937_64 rng(7);
  const SignalSet s = random_signals(4, 3, rng, 1.5);
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "graphid_test_signals.csv";
  write_signals_csv(path, s);
  const SignalSet back = read_signals_csv(path, 1.5);
  CHECK(back.inputs == s.inputs);
  CHECK(back.outputs == s.outputs);

  const auto bad = dir / "graphid_test_signals_bad.csv";
  {
    std::ofstream out(bad);
    out << "k,node,x,y\n0,0,1.0,2.0\n0,1,1.0\n";
  }
  CHECK_THROWS_AS(read_signals_csv(bad, 1.0), FormatError);
  {
    std::ofstream out(bad);
    out << "k,node,x,y\n0,0,1,2\n0,0,1,2\n";
  }
  CHECK_THROWS_AS(read_signals_csv(bad, 1.0), FormatError);
  {
    std::ofstream out(bad);
    out << "k,node,x,y\n0,0,1,2\n1,1,1,2\n";
  }
  CHECK_THROWS_AS(read_signals_csv(bad, 1.0), FormatError);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}
