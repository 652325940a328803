#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "graphid/error.hpp"
#include "graphid/graph.hpp"
#include "graphid/priors.hpp"
#include "graphid/scorenet.hpp"
#include "oracles.hpp"

using namespace graphid;
namespace gt = graphid::testing;
using nlohmann::json;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(GRAPHID_FIXTURE_DIR) / "weights" / "small.json";

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Rows = std::vector<std::vector<double>>;

// Scalar loop evaluation of the layer equations, read straight from the JSON.
std::vector<double> manual_forward(const json& w, const Rows& a, double sigma) {
  const std::size_t n = a.size();
  Rows h(n, std::vector<double>(2));
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0;
    for (std::size_t j = 0; j < n; ++j) deg += a[i][j];
    h[i] = {1.0, deg / static_cast<double>(n)};
  }
  for (const auto& layer : w["layers"]) {
    const auto wa = layer["W_a"].get<Rows>();
    const auto ws = layer["W_s"].get<Rows>();
    const auto b = layer["b"].get<std::vector<double>>();
    const std::size_t d_in = wa.size(), d = b.size();
    Rows next(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        double acc = b[c];
        for (std::size_t r = 0; r < d_in; ++r) {
          double agg = 0;
          for (std::size_t j = 0; j < n; ++j) agg += a[i][j] * h[j][r];
          acc += agg * wa[r][c] + h[i][r] * ws[r][c];
        }
        next[i][c] = std::tanh(acc);
      }
    }
    h = next;
  }
  const auto w1 = w["W1"].get<Rows>();
  const auto b1 = w["b1"].get<std::vector<double>>();
  const auto w2 = w["w2"].get<std::vector<double>>();
  const double b2 = w["b2"].get<double>();
  const std::size_t d = b1.size();
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> u;
      for (std::size_t c = 0; c < d; ++c) u.push_back(h[i][c] * h[j][c]);
      for (std::size_t c = 0; c < d; ++c) u.push_back(h[i][c] + h[j][c]);
      u.push_back(a[i][j]);
      u.push_back(std::log(1.0 / sigma));
      double s = b2;
      for (std::size_t r = 0; r < d; ++r) {
        double z = b1[r];
        for (std::size_t c = 0; c < u.size(); ++c) z += w1[r][c] * u[c];
        s += w2[r] * std::tanh(z);
      }
      out.push_back(s / sigma);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("fixture weights match a step-by-step evaluation on a 4-node input") {
  const ScoreNetWeights w = load_weights(kFixture);
  CHECK(w.hidden_dim() == 2);
  CHECK(w.layers.size() == 2);
  const json doc = json::parse(read_text(kFixture));
  const Rows a = {{0, 0.9, 0.1, 0}, {0.9, 0, 0.6, -0.2}, {0.1, 0.6, 0, 1.1}, {0, -0.2, 1.1, 0}};
  Matrix am(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) am(i, j) = a[i][j];
  for (double sigma : {0.5, 0.12, 0.03}) {
    const auto want = manual_forward(doc, a, sigma);
    const HalfVector got = scorenet_forward(w, am, sigma);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-13));
  }
}

TEST_CASE("all-zero weights give a constant output") {
  ScoreNetWeights w = ScoreNetWeights::zeros(2, 3);
  w.head_b2 = 0.7;
  std::mt19937_64 rng(1);
  const HalfVector out = scorenet_forward(w, gt::random_symmetric_hollow(5, rng), 0.25);
  CHECK(out.size() == 10);
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == doctest::Approx(0.7 / 0.25));
}

TEST_CASE("score network is permutation equivariant") {
  const ScoreNetWeights w = ScoreNetWeights::random(2, 5, 77);
  std::mt19937_64 rng(2);
  for (Eigen::Index n = 2; n <= 12; ++n) {
    const Matrix a = gt::random_symmetric_hollow(n, rng, -0.3, 1.3);
    const Matrix p = gt::random_permutation(n, rng);
    const Matrix out = unvech(scorenet_forward(w, a, 0.2));
    const Matrix out_perm = unvech(scorenet_forward(w, p * a * p.transpose(), 0.2));
    CHECK((out_perm - p * out * p.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("save and load round trip is bitwise exact") {
  const ScoreNetWeights w = ScoreNetWeights::random(3, 4, 5);
  const auto path = std::filesystem::temp_directory_path() / "graphid_test_weights.json";
  save_weights(w, path);
  const ScoreNetWeights back = load_weights(path);
  REQUIRE(back.layers.size() == w.layers.size());
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    CHECK(back.layers[l].w_agg == w.layers[l].w_agg);
    CHECK(back.layers[l].w_self == w.layers[l].w_self);
    CHECK(back.layers[l].bias == w.layers[l].bias);
  }
  CHECK(back.head_w1 == w.head_w1);
  CHECK(back.head_b1 == w.head_b1);
  CHECK(back.head_w2 == w.head_w2);
  CHECK(back.head_b2 == w.head_b2);
  CHECK(serialize_weights(back) == serialize_weights(w));
  std::filesystem::remove(path);
}

TEST_CASE("malformed weight files are rejected") {
  const std::string text = read_text(kFixture);
  CHECK_THROWS_AS(parse_weights(text.substr(0, text.size() / 2)), FormatError);

  json doc = json::parse(text);
  doc["W1"].push_back(doc["W1"][0]);
  try {
    parse_weights(doc.dump());
    FAIL("expected a shape error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("W1") != std::string::npos);
    CHECK(std::string(e.what()).find("hidden_dim") != std::string::npos);
  }

  json wrong_version = json::parse(text);
  wrong_version["version"] = 2;
  CHECK_THROWS_AS(parse_weights(wrong_version.dump()), FormatError);

  json missing = json::parse(text);
  missing.erase("b2");
  CHECK_THROWS_AS(parse_weights(missing.dump()), FormatError);

  CHECK_THROWS_AS(load_weights("/nonexistent/graphid/weights.json"), FormatError);
}

TEST_CASE("learned score provider wraps the forward pass") {
  const ScoreNetWeights w = load_weights(kFixture);
  LearnedScore s(w);
  std::mt19937_64 rng(3);
  const Matrix a = gt::random_symmetric_hollow(6, rng);
  CHECK(s.score(a, 0.3).values() == scorenet_forward(w, a, 0.3).values());
  CHECK_THROWS_AS(s.score(a, 0.0), ArgumentError);
}
