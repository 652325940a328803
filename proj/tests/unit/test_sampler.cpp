#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "graphid/datasets.hpp"
#include "graphid/error.hpp"
#include "graphid/filters.hpp"
#include "graphid/graph.hpp"
#include "graphid/likelihood.hpp"
#include "graphid/priors.hpp"
#include "graphid/sampler.hpp"
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

class NanScore final : public ScoreProvider {
 public:
  std::string name() const override { return "nan"; }
  HalfVector score(const Matrix& noisy, double) const override {
    HalfVector out(static_cast<std::size_t>(noisy.rows()));
    out.values().setConstant(std::numeric_limits<double>::quiet_NaN());
    return out;
  }
};

SignalSynthesis with_count(std::size_t k) {
  SignalSynthesis s;
  s.count = k;
  return s;
}

AdamConfig with_rate(double lr) {
  AdamConfig c;
  c.learning_rate = lr;
  return c;
}

AdjacencyState masked(const Matrix& truth, const std::vector<NodePair>& unknown) {
  Matrix a = truth;
  for (const auto& p : unknown) a(p.i, p.j) = a(p.j, p.i) = 0.0;
  return AdjacencyState(a, unknown);
}

}  // namespace

TEST_CASE("schedule construction and validation") {
  const auto s = AnnealingSchedule::defaults();
  REQUIRE(s.levels() == 10);
  CHECK(s.noise_levels.front() == 0.5);
  CHECK(s.noise_levels.back() == doctest::Approx(0.03));
  CHECK(s.total_steps() == 3000);
  CHECK(s.level_step(9) == doctest::Approx(1e-6));
  CHECK(s.level_step(0) == doctest::Approx(1e-6 * (0.5 * 0.5) / (0.03 * 0.03)));
  CHECK_NOTHROW(s.validate());

  AnnealingSchedule bad = s;
  bad.noise_levels[3] = bad.noise_levels[2];
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.noise_levels.back() = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.steps_per_level = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.noise_levels.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("Adam examples") {
  AdamState zero(2);
  Vector p = vec({0.5, -1.0});
  zero.step(p, Vector::Zero(2));
  CHECK(p == vec({0.5, -1.0}));
  CHECK(zero.steps() == 1);

  AdamState first(3, with_rate(0.01));
  Vector q = Vector::Zero(3);
  first.step(q, vec({4.0, -0.002, 100.0}));
  CHECK(q[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(q[1] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(q[2] == doctest::Approx(-0.01).epsilon(1e-6));

  Vector r = Vector::Zero(3);
  CHECK_THROWS_AS(first.step(r, vec({1.0, std::nan(""), 0.0})), NumericalError);
  CHECK_THROWS_AS(first.step(r, Vector::Zero(2)), StructuralError);
}

TEST_CASE("Adam three-step trace on a scalar quadratic") {
  // Minimizing (theta - 3)^2 / 2 from 0 with lr 0.1; values frozen from a hand-stepped trace.
  AdamState adam(1, with_rate(0.1));
  Vector theta = Vector::Zero(1);
  const double expected[] = {0.09999999966666669, 0.19989729224944813, 0.2996184760421757};
  for (double want : expected) {
    adam.step(theta, vec({theta[0] - 3.0}));
    CHECK(std::abs(theta[0] - want) < 1e-12);
  }
}

TEST_CASE("langevin_step degenerate cases") {
  PolynomialFilter f(2);
  std::mt19937_64 rng(1);
  const Matrix truth = generate_grid(2, 3, 1, 4);
  const auto part = partition_entries(6, 0.4, 2);
  AnnealingSchedule sched = AnnealingSchedule::defaults();
  sched.temperature = 0.0;

  // No signals, zero prior, tau = 0: nothing moves.
  AdjacencyState s = masked(truth, part.unknown);
  s.set_unknown_values(Vector::Constant(static_cast<Eigen::Index>(part.unknown.size()), 0.3));
  const Matrix before = s.entries();
  langevin_step(s, vec({0.1, 0.2, 0.0}), sched, 0, f, SignalSet::empty(6), ZeroScore{}, rng);
  CHECK(s.entries() == before);

  // Perfect fit at the truth is a fixed point.
  const Vector theta = vec({0.2, 0.5, -0.1});
  const Matrix x = gt::random_matrix(6, 4, rng);
  const SignalSet clean(x, f.apply(truth, theta, x), 1.0);
  AdjacencyState at_truth(truth, part.unknown);
  langevin_step(at_truth, theta, sched, 3, f, clean, ZeroScore{}, rng);
  CHECK((at_truth.entries() - truth).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("langevin_step aborts on a non-finite score") {
  PolynomialFilter f(2);
  std::mt19937_64 rng(1);
  AdjacencyState s(Matrix::Zero(4, 4), {{0, 1}});
  CHECK_THROWS_AS(langevin_step(s, vec({0, 0, 0}), AnnealingSchedule::defaults(), 0, f, SignalSet::empty(4),
                                NanScore{}, rng),
                  NumericalError);
  InferenceOptions opts;
  opts.schedule.steps_per_level = 2;
  try {
    run_inference(s, f, SignalSet::empty(4), NanScore{}, opts);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
  }
}

TEST_CASE("run_inference pins observed entries, stays symmetric and is deterministic") {
  PolynomialFilter f(2);
  const Matrix truth = generate_grid(3, 3, 2, 9);
  const auto part = partition_entries(9, 0.25, 5);
  const AdjacencyState problem = masked(truth, part.unknown);
  const auto synth = synthesize_signals(truth, f, with_count(4), 11);

  InferenceOptions opts;
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 4, 50, 1e-6, 0.5);
  opts.seed = 21;
  const auto a = run_inference(problem, f, synth.signals, BernoulliScore(0.3), opts);
  const auto b = run_inference(problem, f, synth.signals, BernoulliScore(0.3), opts);
  CHECK(a.adjacency == b.adjacency);
  CHECK(a.continuous == b.continuous);
  CHECK(a.theta == b.theta);
  CHECK(a.level_log_likelihood == b.level_log_likelihood);
  CHECK(a.level_log_likelihood.size() == 4);

  CHECK(a.continuous == a.continuous.transpose());
  CHECK(a.continuous.diagonal().isZero());
  CHECK(a.adjacency == round_project(a.continuous));
  for (const auto& p : problem.observed()) {
    CHECK(a.adjacency(p.i, p.j) == truth(p.i, p.j));
    CHECK(a.continuous(p.i, p.j) == truth(p.i, p.j));
  }

  opts.seed = 22;
  const auto c = run_inference(problem, f, synth.signals, BernoulliScore(0.3), opts);
  CHECK(c.continuous != a.continuous);
}

TEST_CASE("run_inference with no unknowns returns the observed graph") {
  PolynomialFilter f(2);
  const Matrix truth = generate_grid(3, 3, 0, 1);
  const auto synth = synthesize_signals(truth, f, with_count(3), 2);
  InferenceOptions opts;
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 2, 20, 1e-6, 0.5);
  const auto r = run_inference(AdjacencyState(truth, {}), f, synth.signals, ZeroScore{}, opts);
  CHECK(r.adjacency == truth);
  CHECK(r.theta.size() == 3);
}

TEST_CASE("frozen theta needs an initial value and is left untouched") {
  PolynomialFilter f(2);
  const Matrix truth = generate_grid(2, 3, 0, 1);
  const auto synth = synthesize_signals(truth, f, with_count(2), 3);
  InferenceOptions opts;
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 2, 10, 1e-6, 0.5);
  opts.learn_theta = false;
  CHECK_THROWS_AS(run_inference(AdjacencyState(truth, {{0, 2}}), f, synth.signals, ZeroScore{}, opts),
                  ConfigError);
  opts.initial_theta = synth.theta;
  const auto r = run_inference(AdjacencyState(truth, {{0, 2}}), f, synth.signals, ZeroScore{}, opts);
  CHECK(r.theta == synth.theta);
}

TEST_CASE("theta-only inference does not increase the loss") {
  PolynomialFilter f(2);
  const Matrix truth = generate_grid(3, 4, 2, 7);
  InferenceOptions opts;
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 10, 30, 1e-6, 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto synth = synthesize_signals(truth, f, with_count(4), 100 + seed);
    opts.seed = seed;
    std::mt19937_64 rng(seed);
    const Vector theta0 = initial_point(AdjacencyState(truth, {}), f, std::nullopt, rng).theta;
    const auto r = run_inference(AdjacencyState(truth, {}), f, synth.signals, ZeroScore{}, opts);
    CHECK(-log_likelihood(f, truth, r.theta, synth.signals) <= -log_likelihood(f, truth, theta0, synth.signals));
  }
}

TEST_CASE("prior-only sampling recovers the Bernoulli marginal") {
  PolynomialFilter f(2);
  const auto part = partition_entries(6, 1.0, 0);
  const AdjacencyState problem(Matrix::Zero(6, 6), part.unknown);
  InferenceOptions opts;
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 10, 300, 1e-5, 1.0);
  for (double p : {0.3, 0.7}) {
    BernoulliScore prior(p);
    double edges = 0.0;
    const int runs = 200;
    for (int r = 0; r < runs; ++r) {
      opts.seed = static_cast<std::uint64_t>(r);
      edges += static_cast<double>(edge_count(run_inference(problem, f, SignalSet::empty(6), prior, opts).adjacency));
    }
    const double freq = edges / (runs * 15.0);
    CHECK(std::abs(freq - p) <= 0.07);
  }
}

TEST_CASE("near-noiseless signals identify the unknown entries") {
  PolynomialFilter f(2);
  const Matrix truth = generate_grid(2, 4, 1, 3);
  const auto part = partition_entries(8, 0.25, 4);
  const AdjacencyState problem = masked(truth, part.unknown);
  SignalSynthesis syn;
  syn.count = 50;
  syn.noise_variance = 1e-4;
  const auto synth = synthesize_signals(truth, f, syn, 5);

  InferenceOptions opts;
  // The likelihood curvature scales with K / noise variance, so the step must shrink with it.
  opts.schedule = AnnealingSchedule::linear(0.5, 0.03, 10, 300, 1e-9, 0.5);
  opts.learn_theta = false;
  opts.initial_theta = synth.theta;
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    opts.seed = seed;
    const auto r = run_inference(problem, f, synth.signals, ZeroScore{}, opts);
    exact += r.adjacency == truth ? 1 : 0;
  }
  CHECK(exact >= 19);
}
