#include "graphid/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graphid/baselines.hpp"
#include "graphid/error.hpp"
#include "graphid/metrics.hpp"
#include "graphid/seeding.hpp"

namespace graphid {

std::string method_name(Method m) {
  switch (m) {
    case Method::langevin_prior:
      return "langevin_prior";
    case Method::langevin_noprior:
      return "langevin_noprior";
    case Method::adam_mle:
      return "adam_mle";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "langevin_prior") return Method::langevin_prior;
  if (name == "langevin_noprior") return Method::langevin_noprior;
  if (name == "adam_mle") return Method::adam_mle;
  throw ConfigError("unknown method '" + name + "'");
}

// --- configuration ----------------------------------------------------------

const std::vector<std::string>& BenchmarkConfig::keys() {
  static const std::vector<std::string> all = {
      "generator",      "nodes_min",        "nodes_max",       "grid_min_side",   "extra_edges_min",
      "extra_edges_max", "attachment",      "filter",          "order",           "theta_min",
      "theta_max",      "x_min",            "x_max",           "noise_variance",  "k_grid",
      "unknown_fraction", "sigma_first",    "sigma_last",      "levels",          "steps_per_level",
      "step_size",      "temperature",      "learning_rate",   "prior",           "prior_corpus_size",
      "prior_corpus_dir", "bernoulli_p",    "weights",         "methods",         "trials",
      "seed_base",      "output",           "threads",         "timing"};
  return all;
}

namespace {

class KeyReader {
 public:
  explicit KeyReader(const KeyValueConfig& keys) : keys_(keys) {}

  template <typename T>
  void read(const std::string& key, T& target) {
    const auto raw = keys_.get(key);
    if (!raw) return;
    try {
      target = convert<T>(*raw);
    } catch (const std::exception&) {
      errors.push_back(key + ": cannot parse '" + *raw + "'");
    }
  }

  std::vector<std::string> errors;

 private:
  template <typename T>
  static T convert(const std::string& raw) {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_same_v<T, std::string>) {
      return raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (raw == "on" || raw == "true" || raw == "1") return true;
      if (raw == "off" || raw == "false" || raw == "0") return false;
      throw std::invalid_argument(raw);
    } else if constexpr (std::is_floating_point_v<T>) {
      value = std::stod(raw, &used);
    } else if constexpr (std::is_signed_v<T>) {
      value = static_cast<T>(std::stoll(raw, &used));
    } else {
      if (!raw.empty() && raw.front() == '-') throw std::invalid_argument(raw);
      value = static_cast<T>(std::stoull(raw, &used));
    }
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  }

  const KeyValueConfig& keys_;
};

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

BenchmarkConfig BenchmarkConfig::from_keys(const KeyValueConfig& keys) {
  BenchmarkConfig c;
  KeyReader r(keys);
  const auto& known = BenchmarkConfig::keys();
  for (const auto& [key, value] : keys.entries()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) r.errors.push_back(key + ": unknown key");
  }
  r.read("generator", c.generator.generator);
  r.read("nodes_min", c.generator.nodes_min);
  r.read("nodes_max", c.generator.nodes_max);
  r.read("grid_min_side", c.generator.grid_min_side);
  r.read("extra_edges_min", c.generator.extra_edges_min);
  r.read("extra_edges_max", c.generator.extra_edges_max);
  r.read("attachment", c.generator.attachment);
  r.read("filter", c.filter);
  r.read("order", c.order);
  r.read("theta_min", c.theta_min);
  r.read("theta_max", c.theta_max);
  r.read("x_min", c.x_min);
  r.read("x_max", c.x_max);
  r.read("noise_variance", c.noise_variance);
  r.read("unknown_fraction", c.unknown_fraction);
  r.read("learning_rate", c.learning_rate);
  r.read("prior", c.prior);
  r.read("prior_corpus_size", c.prior_corpus_size);
  r.read("prior_corpus_dir", c.prior_corpus_dir);
  r.read("bernoulli_p", c.bernoulli_p);
  r.read("weights", c.weights);
  r.read("trials", c.trials);
  r.read("seed_base", c.seed_base);
  r.read("output", c.output);
  r.read("threads", c.threads);
  r.read("timing", c.timing);

  double sigma_first = c.schedule.noise_levels.front();
  double sigma_last = c.schedule.noise_levels.back();
  std::size_t levels = c.schedule.levels();
  r.read("sigma_first", sigma_first);
  r.read("sigma_last", sigma_last);
  r.read("levels", levels);
  r.read("steps_per_level", c.schedule.steps_per_level);
  r.read("step_size", c.schedule.step_size);
  r.read("temperature", c.schedule.temperature);
  if (levels < 1) {
    r.errors.push_back("levels: must be >= 1");
  } else {
    c.schedule = AnnealingSchedule::linear(sigma_first, sigma_last, levels, c.schedule.steps_per_level,
                                           c.schedule.step_size, c.schedule.temperature);
  }

  if (auto raw = keys.get("k_grid")) {
    c.k_grid.clear();
    for (const auto& item : split_list(*raw)) {
      try {
        std::size_t used = 0;
        if (!item.empty() && item.front() == '-') throw std::invalid_argument(item);
        c.k_grid.push_back(static_cast<std::size_t>(std::stoull(item, &used)));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        r.errors.push_back("k_grid: cannot parse '" + item + "'");
      }
    }
  }
  if (auto raw = keys.get("methods")) {
    c.methods.clear();
    for (const auto& item : split_list(*raw)) {
      try {
        c.methods.push_back(parse_method(item));
      } catch (const ConfigError&) {
        r.errors.push_back("methods: unknown method '" + item + "'");
      }
    }
  }

  std::vector<std::string> problems = std::move(r.errors);
  for (auto& p : c.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError("invalid benchmark configuration:\n  " + join(problems, "\n  "));
  return c;
}

void BenchmarkConfig::validate() const {
  const auto p = problems();
  if (!p.empty()) throw ConfigError("invalid benchmark configuration:\n  " + join(p, "\n  "));
}

std::vector<std::string> BenchmarkConfig::problems() const {
  std::vector<std::string> p;
  for (const auto& g : generator.problems()) p.push_back(g);
  if (filter != "polynomial" && filter != "heat") p.push_back("filter: must be 'polynomial' or 'heat'");
  if (filter == "polynomial" && order < 0) p.push_back("order: must be >= 0");
  if (!(theta_min <= theta_max)) p.push_back("theta_min must be <= theta_max");
  if (!(x_min <= x_max)) p.push_back("x_min must be <= x_max");
  if (!(noise_variance > 0.0)) p.push_back("noise_variance: must be positive");
  if (k_grid.empty()) p.push_back("k_grid: at least one K is required");
  if (!(unknown_fraction >= 0.0 && unknown_fraction <= 1.0)) p.push_back("unknown_fraction: must lie in [0,1]");
  try {
    schedule.validate();
  } catch (const ConfigError& e) {
    p.push_back(e.what());
  }
  if (!(learning_rate > 0.0)) p.push_back("learning_rate: must be positive");
  const bool needs_prior = std::find(methods.begin(), methods.end(), Method::langevin_prior) != methods.end();
  if (prior != "empirical" && prior != "bernoulli" && prior != "zero" && prior != "learned") {
    p.push_back("prior: must be empirical, bernoulli, zero or learned");
  }
  if (needs_prior && prior == "empirical" && prior_corpus_dir.empty() && prior_corpus_size == 0) {
    p.push_back("prior_corpus_size: must be positive for a generated empirical prior");
  }
  if (needs_prior && prior == "empirical" && !prior_corpus_dir.empty() &&
      !std::filesystem::is_directory(prior_corpus_dir)) {
    p.push_back("prior_corpus_dir: '" + prior_corpus_dir + "' is not a directory");
  }
  if (needs_prior && prior == "learned" && weights.empty()) p.push_back("weights: required for the learned prior");
  if (needs_prior && prior == "learned" && !weights.empty() && !std::filesystem::exists(weights)) {
    p.push_back("weights: file '" + weights + "' does not exist");
  }
  if (!(bernoulli_p >= 0.0 && bernoulli_p <= 1.0)) p.push_back("bernoulli_p: must lie in [0,1]");
  if (methods.empty()) p.push_back("methods: at least one method is required");
  if (threads < 1) p.push_back("threads: must be >= 1");
  return p;
}

KeyValueConfig BenchmarkConfig::to_keys() const {
  KeyValueConfig k;
  k.set("generator", generator.generator);
  k.set("nodes_min", std::to_string(generator.nodes_min));
  k.set("nodes_max", std::to_string(generator.nodes_max));
  k.set("grid_min_side", std::to_string(generator.grid_min_side));
  k.set("extra_edges_min", std::to_string(generator.extra_edges_min));
  k.set("extra_edges_max", std::to_string(generator.extra_edges_max));
  k.set("attachment", std::to_string(generator.attachment));
  k.set("filter", filter);
  k.set("order", std::to_string(order));
  k.set("theta_min", format_double(theta_min));
  k.set("theta_max", format_double(theta_max));
  k.set("x_min", format_double(x_min));
  k.set("x_max", format_double(x_max));
  k.set("noise_variance", format_double(noise_variance));
  std::vector<std::string> ks;
  for (auto v : k_grid) ks.push_back(std::to_string(v));
  k.set("k_grid", join(ks, ","));
  k.set("unknown_fraction", format_double(unknown_fraction));
  k.set("sigma_first", format_double(schedule.noise_levels.front()));
  k.set("sigma_last", format_double(schedule.noise_levels.back()));
  k.set("levels", std::to_string(schedule.levels()));
  k.set("steps_per_level", std::to_string(schedule.steps_per_level));
  k.set("step_size", format_double(schedule.step_size));
  k.set("temperature", format_double(schedule.temperature));
  k.set("learning_rate", format_double(learning_rate));
  k.set("prior", prior);
  k.set("prior_corpus_size", std::to_string(prior_corpus_size));
  k.set("prior_corpus_dir", prior_corpus_dir);
  k.set("bernoulli_p", format_double(bernoulli_p));
  k.set("weights", weights);
  std::vector<std::string> ms;
  for (auto m : methods) ms.push_back(method_name(m));
  k.set("methods", join(ms, ","));
  k.set("trials", std::to_string(trials));
  k.set("seed_base", std::to_string(seed_base));
  k.set("output", output);
  k.set("threads", std::to_string(threads));
  k.set("timing", timing ? "on" : "off");
  return k;
}

// --- results ----------------------------------------------------------------

const AggregateRecord& BenchmarkResult::aggregate(Method m, std::size_t k) const {
  for (const auto& a : aggregates) {
    if (a.method == m && a.k == k) return a;
  }
  throw ArgumentError("no aggregate for " + method_name(m) + " at K=" + std::to_string(k));
}

std::string BenchmarkResult::csv() const {
  std::string out = "method,K,seed,f1,theta_nrmse,wall_ms\n";
  for (const auto& t : trials) {
    out += method_name(t.method) + ',' + std::to_string(t.k) + ',' + std::to_string(t.seed) + ',' +
           format_double(t.f1) + ',' + format_double(t.theta_nrmse) + ',' + format_double(t.wall_ms) + '\n';
  }
  for (const auto& a : aggregates) {
    const std::string prefix = method_name(a.method) + ',' + std::to_string(a.k) + ',';
    out += prefix + "mean," + format_double(a.f1_mean) + ',' + format_double(a.nrmse_mean) + ',' +
           format_double(a.wall_mean) + '\n';
    out += prefix + "stderr," + format_double(a.f1_stderr) + ',' + format_double(a.nrmse_stderr) + ',' +
           format_double(a.wall_stderr) + '\n';
  }
  return out;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

// --- execution --------------------------------------------------------------

namespace {

constexpr std::uint64_t kShapeStream = 1;
constexpr std::uint64_t kGraphStream = 2;
constexpr std::uint64_t kMaskStream = 3;
constexpr std::uint64_t kSignalStream = 4;
constexpr std::uint64_t kSamplerStream = 5;
constexpr std::uint64_t kCorpusSeed = 0x5eedc0de;

GraphDataset generated_prior_corpus(const BenchmarkConfig& config, const GraphShape& shape) {
  return generate_corpus(config.generator, shape, config.prior_corpus_size,
                         derive_seed(kCorpusSeed, {shape.height, shape.width, shape.nodes}));
}

using ProviderMap = std::map<GraphShape, std::shared_ptr<const ScoreProvider>>;

std::shared_ptr<const ScoreProvider> empirical_prior(const BenchmarkConfig& config, const GraphShape& shape,
                                                     const GraphDataset* loaded) {
  GraphDataset corpus = loaded ? loaded->with_nodes(shape.nodes) : generated_prior_corpus(config, shape);
  if (corpus.empty()) return nullptr;
  return std::make_shared<EmpiricalScore>(corpus);
}

ProviderMap build_priors(const BenchmarkConfig& config, const std::set<GraphShape>& shapes) {
  ProviderMap out;
  if (config.prior != "empirical") {
    const auto p = make_prior(config, shapes.empty() ? GraphShape{} : *shapes.begin());
    for (const auto& s : shapes) out[s] = p;
    return out;
  }
  GraphDataset loaded;
  if (!config.prior_corpus_dir.empty()) loaded = load_corpus(config.prior_corpus_dir);
  std::vector<std::string> missing;
  for (const auto& s : shapes) {
    auto p = empirical_prior(config, s, config.prior_corpus_dir.empty() ? nullptr : &loaded);
    if (!p) {
      missing.push_back(std::to_string(s.nodes));
      continue;
    }
    out[s] = std::move(p);
  }
  if (!missing.empty()) throw ConfigError("prior corpus has no graphs with node counts: " + join(missing, ", "));
  return out;
}

struct Cell {
  std::uint64_t seed;
  std::size_t k;
};

}  // namespace

ExperimentInstance make_instance(const BenchmarkConfig& config, std::uint64_t seed, std::size_t k) {
  const auto filter = make_filter(config.filter, config.order);
  const GraphShape shape = sample_shape(config.generator, derive_seed(seed, {kShapeStream}));
  ExperimentInstance inst;
  inst.seed = seed;
  inst.adjacency = generate_graph(config.generator, shape, derive_seed(seed, {kGraphStream}));
  inst.generator = config.generator.generator == "grid"
                       ? "grid " + std::to_string(shape.height) + "x" + std::to_string(shape.width)
                       : "ego " + std::to_string(shape.nodes);
  inst.unknown = partition_entries(shape.nodes, config.unknown_fraction, derive_seed(seed, {kMaskStream})).unknown;
  SignalSynthesis synth;
  synth.count = k;
  synth.noise_variance = config.noise_variance;
  synth.theta_range = {config.theta_min, config.theta_max};
  synth.x_range = {config.x_min, config.x_max};
  auto [theta, signals] = synthesize_signals(inst.adjacency, *filter, synth, derive_seed(seed, {kSignalStream}));
  inst.theta = std::move(theta);
  inst.signals = std::move(signals);
  return inst;
}

GraphShape instance_shape(const BenchmarkConfig& config, std::uint64_t seed) {
  return sample_shape(config.generator, derive_seed(seed, {kShapeStream}));
}

GraphDataset prior_corpus(const BenchmarkConfig& config, const GraphShape& shape) {
  if (config.prior_corpus_dir.empty()) return generated_prior_corpus(config, shape);
  return load_corpus(config.prior_corpus_dir).with_nodes(shape.nodes);
}

std::shared_ptr<const ScoreProvider> make_prior(const BenchmarkConfig& config, const GraphShape& shape) {
  if (config.prior == "zero") return std::make_shared<ZeroScore>();
  if (config.prior == "bernoulli") return std::make_shared<BernoulliScore>(config.bernoulli_p);
  if (config.prior == "learned") return std::make_shared<LearnedScore>(load_weights(config.weights));
  if (config.prior != "empirical") throw ConfigError("unknown prior '" + config.prior + "'");
  GraphDataset loaded;
  if (!config.prior_corpus_dir.empty()) loaded = load_corpus(config.prior_corpus_dir);
  auto p = empirical_prior(config, shape, config.prior_corpus_dir.empty() ? nullptr : &loaded);
  if (!p) throw ConfigError("prior corpus has no graphs with " + std::to_string(shape.nodes) + " nodes");
  return p;
}

InferenceOptions method_options(const BenchmarkConfig& config, std::uint64_t seed, Method method) {
  InferenceOptions opts;
  opts.schedule = config.schedule;
  opts.adam.learning_rate = config.learning_rate;
  opts.seed = derive_seed(seed, {kSamplerStream, static_cast<std::uint64_t>(method)});
  return opts;
}

InferenceResult run_method(Method method, const AdjacencyState& problem, const GraphFilter& filter,
                           const SignalSet& signals, const ScoreProvider& prior, const InferenceOptions& options) {
  switch (method) {
    case Method::langevin_prior:
      return run_inference(problem, filter, signals, prior, options);
    case Method::langevin_noprior:
      return run_inference(problem, filter, signals, ZeroScore{}, options);
    case Method::adam_mle:
      return run_adam_mle_baseline(problem, filter, signals, options);
  }
  throw ConfigError("unknown method");
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  const auto filter = make_filter(config.filter, config.order);

  std::vector<std::uint64_t> seeds;
  std::set<GraphShape> shapes;
  for (std::size_t t = 0; t < config.trials; ++t) {
    seeds.push_back(config.seed_base + t);
    shapes.insert(instance_shape(config, seeds.back()));
  }
  const bool needs_prior =
      std::find(config.methods.begin(), config.methods.end(), Method::langevin_prior) != config.methods.end();
  const ProviderMap priors = needs_prior ? build_priors(config, shapes) : ProviderMap{};
  const ZeroScore zero;

  std::vector<Cell> cells;
  for (auto s : seeds) {
    for (auto k : config.k_grid) cells.push_back({s, k});
  }

  const std::size_t n_methods = config.methods.size();
  std::vector<TrialRecord> records(cells.size() * n_methods);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const auto [seed, k] = cells[c];
        const ExperimentInstance inst = make_instance(config, seed, k);
        const AdjacencyState problem = inst.problem();
        const auto truth_bits = pair_bits(inst.adjacency, inst.unknown);
        const GraphShape shape = instance_shape(config, seed);

        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          const Method method = config.methods[mi];
          const InferenceOptions opts = method_options(config, seed, method);
          const ScoreProvider& prior = method == Method::langevin_prior ? *priors.at(shape) : zero;
          const auto start = std::chrono::steady_clock::now();
          const InferenceResult res = run_method(method, problem, *filter, inst.signals, prior, opts);
          const auto stop = std::chrono::steady_clock::now();

          TrialRecord& rec = records[c * n_methods + mi];
          rec.method = method;
          rec.k = k;
          rec.seed = seed;
          rec.f1 = f1_score(truth_bits, pair_bits(res.adjacency, inst.unknown));
          rec.theta_nrmse = theta_nrmse(inst.theta, res.theta);
          rec.wall_ms = config.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads = std::min(config.threads, std::max<std::size_t>(cells.size(), 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto method_rank = [&](Method m) {
    return std::find(config.methods.begin(), config.methods.end(), m) - config.methods.begin();
  };
  std::sort(records.begin(), records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
    return std::tuple(method_rank(a.method), a.k, a.seed) < std::tuple(method_rank(b.method), b.k, b.seed);
  });

  BenchmarkResult result;
  result.trials = std::move(records);
  if (config.trials == 0) return result;
  for (const auto method : config.methods) {
    std::vector<std::size_t> ks = config.k_grid;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (const auto k : ks) {
      std::vector<double> f1, nrmse, wall;
      for (const auto& t : result.trials) {
        if (t.method != method || t.k != k) continue;
        f1.push_back(t.f1);
        nrmse.push_back(t.theta_nrmse);
        wall.push_back(t.wall_ms);
      }
      AggregateRecord agg;
      agg.method = method;
      agg.k = k;
      agg.trials = f1.size();
      std::tie(agg.f1_mean, agg.f1_stderr) = mean_and_stderr(f1);
      std::tie(agg.nrmse_mean, agg.nrmse_stderr) = mean_and_stderr(nrmse);
      std::tie(agg.wall_mean, agg.wall_stderr) = mean_and_stderr(wall);
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

BenchmarkResult run_benchmark_to_file(const BenchmarkConfig& config) {
  if (config.output.empty()) throw ConfigError("output: a CSV path is required");
  BenchmarkResult result = run_benchmark(config);
  {
    std::ofstream out(config.output, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + config.output);
    out << result.csv();
  }
  nlohmann::json meta;
  meta["schema"] = "method,K,seed,f1,theta_nrmse,wall_ms";
  meta["aggregate_rows"] = "seed column 'mean' or 'stderr' (sample standard deviation / sqrt(trials))";
  meta["f1"] = "2TP/(2TP+FP+FN) over unknown pairs, edge present = positive class";
  meta["theta_nrmse"] = "||theta_hat - theta_true||_2 / ||theta_true||_2";
  meta["wall_ms"] = config.timing ? "per-run wall time" : "timing disabled (written as 0)";
  nlohmann::json cfg = nlohmann::json::object();
  const KeyValueConfig keys = config.to_keys();
  for (const auto& [k, v] : keys.entries()) cfg[k] = v;
  meta["config"] = cfg;
  std::ofstream meta_out(config.output + ".meta.json", std::ios::binary | std::ios::trunc);
  meta_out << meta.dump(2) << '\n';
  return result;
}

}  // namespace graphid
