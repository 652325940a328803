#include "graphid/priors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "graphid/error.hpp"

namespace graphid {
namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("prior score: sigma must be positive");
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

GraphDataset GraphDataset::with_nodes(std::size_t n) const {
  GraphDataset out;
  for (const auto& g : graphs) {
    if (static_cast<std::size_t>(g.rows()) == n) out.graphs.push_back(g);
  }
  return out;
}

GraphDataset GraphDataset::max_nodes(std::size_t n) const {
  GraphDataset out;
  for (const auto& g : graphs) {
    if (static_cast<std::size_t>(g.rows()) <= n) out.graphs.push_back(g);
  }
  return out;
}

void GraphDataset::validate() const {
  for (std::size_t m = 0; m < graphs.size(); ++m) {
    try {
      require_symmetric_hollow(graphs[m]);
    } catch (const StructuralError& e) {
      throw StructuralError("dataset graph " + std::to_string(m) + ": " + e.what());
    }
    if (!((graphs[m].array() == 0.0) || (graphs[m].array() == 1.0)).all()) {
      throw StructuralError("dataset graph " + std::to_string(m) + " is not binary");
    }
  }
}

HalfVector ZeroScore::score(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  return HalfVector(static_cast<std::size_t>(noisy.rows()));
}

// --- Bernoulli --------------------------------------------------------------

BernoulliScore::BernoulliScore(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("Bernoulli prior: p must lie in [0,1]");
}

double BernoulliScore::entry_score(double t, double sigma) const {
  const double s2 = sigma * sigma;
  // Responsibilities of the two components, computed in log space.
  const double log_one = std::log(p_) - (t - 1.0) * (t - 1.0) / (2.0 * s2);
  const double log_zero = std::log1p(-p_) - t * t / (2.0 * s2);
  const double m = std::max(log_one, log_zero);
  const double w_one = std::exp(log_one - m);
  const double w_zero = std::exp(log_zero - m);
  return (w_one * (1.0 - t) - w_zero * t) / ((w_one + w_zero) * s2);
}

double BernoulliScore::entry_log_density(double t, double sigma) const {
  const double s2 = sigma * sigma;
  const double log_one = std::log(p_) - (t - 1.0) * (t - 1.0) / (2.0 * s2);
  const double log_zero = std::log1p(-p_) - t * t / (2.0 * s2);
  const double m = std::max(log_one, log_zero);
  return m + std::log(std::exp(log_one - m) + std::exp(log_zero - m)) -
         0.5 * std::log(2.0 * std::numbers::pi * s2);
}

HalfVector BernoulliScore::score(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  HalfVector out = vech(noisy);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = entry_score(out[k], sigma);
  return out;
}

double BernoulliScore::log_density(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  const HalfVector a = vech(noisy);
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) total += entry_log_density(a[k], sigma);
  return total;
}

// --- smoothed empirical -----------------------------------------------------

EmpiricalScore::EmpiricalScore(const GraphDataset& dataset) {
  if (dataset.empty()) throw ConfigError("empirical prior: dataset is empty");
  dataset.validate();
  n_ = static_cast<std::size_t>(dataset.graphs.front().rows());
  points_.resize(static_cast<Eigen::Index>(dataset.size()), static_cast<Eigen::Index>(num_pairs(n_)));
  for (std::size_t m = 0; m < dataset.size(); ++m) {
    if (static_cast<std::size_t>(dataset.graphs[m].rows()) != n_) {
      throw ConfigError("empirical prior: dataset graph " + std::to_string(m) + " has " +
                        std::to_string(dataset.graphs[m].rows()) + " nodes, expected " + std::to_string(n_));
    }
    points_.row(static_cast<Eigen::Index>(m)) = vech(dataset.graphs[m]).values().transpose();
  }
}

Vector EmpiricalScore::log_weights(const Vector& a, double sigma) const {
  const Vector sq = (points_.rowwise() - a.transpose()).rowwise().squaredNorm();
  return -sq / (2.0 * sigma * sigma);
}

HalfVector EmpiricalScore::score(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  if (static_cast<std::size_t>(noisy.rows()) != n_) {
    throw ConfigError("empirical prior built for " + std::to_string(n_) + " nodes, queried with " +
                      std::to_string(noisy.rows()));
  }
  const HalfVector a = vech(noisy);
  Vector logw = log_weights(a.values(), sigma);
  logw.array() -= logw.maxCoeff();
  Vector w = logw.array().exp().matrix();
  w /= w.sum();
  return HalfVector((points_.transpose() * w - a.values()) / (sigma * sigma), n_);
}

double EmpiricalScore::log_density(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  if (static_cast<std::size_t>(noisy.rows()) != n_) throw ConfigError("empirical prior: size mismatch");
  const HalfVector a = vech(noisy);
  const double dim = static_cast<double>(a.size());
  return log_sum_exp(log_weights(a.values(), sigma)) - std::log(static_cast<double>(points_.rows())) -
         0.5 * dim * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

// --- learned ----------------------------------------------------------------

LearnedScore::LearnedScore(ScoreNetWeights weights) : weights_(std::move(weights)) { weights_.validate(); }

HalfVector LearnedScore::score(const Matrix& noisy, double sigma) const {
  require_sigma(sigma);
  return scorenet_forward(weights_, noisy, sigma);
}

std::vector<ScoreAgreement> compare_to_empirical(const ScoreProvider& candidate, const GraphDataset& corpus,
                                                 const std::vector<double>& sigmas, std::size_t samples_per_sigma,
                                                 std::uint64_t seed) {
  if (corpus.empty()) throw ConfigError("score comparison: corpus is empty");
  std::map<std::size_t, EmpiricalScore> oracles;
  for (const auto& g : corpus.graphs) {
    const auto n = static_cast<std::size_t>(g.rows());
    if (!oracles.count(n)) oracles.emplace(n, EmpiricalScore(corpus.with_nodes(n)));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<ScoreAgreement> out;
  for (double sigma : sigmas) {
    require_sigma(sigma);
    ScoreAgreement agg;
    agg.sigma = sigma;
    double cosine_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t entries = 0;
    for (std::size_t s = 0; s < samples_per_sigma; ++s) {
      const Matrix& clean = corpus.graphs[pick(rng)];
      const auto n = static_cast<std::size_t>(clean.rows());
      if (n < 2) continue;
      Vector noisy = vech(clean).values();
      for (Eigen::Index k = 0; k < noisy.size(); ++k) noisy[k] += sigma * normal(rng);
      const Matrix noisy_m = unvech(noisy, n);
      const Vector reference = oracles.at(n).score(noisy_m, sigma).values();
      const Vector got = candidate.score(noisy_m, sigma).values();
      const double denom = reference.norm() * got.norm();
      cosine_sum += denom > 0.0 ? reference.dot(got) / denom : 0.0;
      sq_sum += (reference - got).squaredNorm();
      entries += static_cast<std::size_t>(reference.size());
      ++agg.samples;
    }
    if (agg.samples > 0) {
      agg.mean_cosine = cosine_sum / static_cast<double>(agg.samples);
      agg.mean_squared_deviation = sq_sum / static_cast<double>(std::max<std::size_t>(entries, 1));
    }
    out.push_back(agg);
  }
  return out;
}

}  // namespace graphid
