#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphid/benchmark.hpp"
#include "graphid/config.hpp"
#include "graphid/enumerate.hpp"
#include "graphid/error.hpp"
#include "graphid/filters.hpp"
#include "graphid/metrics.hpp"
#include "graphid/priors.hpp"
#include "graphid/scorenet.hpp"
#include "graphid/seeding.hpp"

namespace fs = std::filesystem;
using namespace graphid;
using nlohmann::json;

namespace {

// Config file plus `--set key=value` overrides plus dedicated flags.
struct ConfigSource {
  std::string path;
  std::vector<std::string> assignments;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", path, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("-s,--set", assignments, "override a configuration key (key=value, repeatable)");
  }

  KeyValueConfig keys() const {
    KeyValueConfig k = path.empty() ? KeyValueConfig{} : KeyValueConfig::from_file(path);
    for (const auto& a : assignments) k.set_assignment(a);
    return k;
  }
};

std::string join_vector(const Vector& v) {
  std::ostringstream out;
  out << std::setprecision(6);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct LoadedInstance {
  ExperimentInstance instance;
  GraphShape shape;
  std::string filter;
  int order = 2;
};

void write_instance(const fs::path& dir, const ExperimentInstance& inst, const GraphShape& shape,
                    const BenchmarkConfig& cfg) {
  fs::create_directories(dir);
  write_edge_list(dir / "truth.edgelist", inst.adjacency);
  write_edge_list(dir / "observed.edgelist", inst.problem().entries());
  write_pair_list(dir / "unknown.pairs", inst.unknown, inst.adjacency.rows());
  write_signals_csv(dir / "signals.csv", inst.signals);
  json meta;
  meta["seed"] = inst.seed;
  meta["generator"] = inst.generator;
  meta["height"] = shape.height;
  meta["width"] = shape.width;
  meta["nodes"] = shape.nodes;
  meta["filter"] = cfg.filter;
  meta["order"] = cfg.order;
  meta["theta"] = vector_json(inst.theta);
  meta["noise_variance"] = inst.signals.noise_variance;
  meta["k"] = inst.signals.count();
  std::ofstream(dir / "instance.json") << meta.dump(2) << '\n';
}

LoadedInstance read_instance(const fs::path& dir) {
  std::ifstream in(dir / "instance.json");
  if (!in) throw FormatError("cannot open " + (dir / "instance.json").string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError((dir / "instance.json").string() + ": " + e.what());
  }
  LoadedInstance out;
  out.filter = meta.at("filter").get<std::string>();
  out.order = meta.at("order").get<int>();
  out.shape.height = meta.at("height").get<std::size_t>();
  out.shape.width = meta.at("width").get<std::size_t>();
  out.shape.nodes = meta.at("nodes").get<std::size_t>();
  auto& inst = out.instance;
  inst.seed = meta.at("seed").get<std::uint64_t>();
  inst.generator = meta.at("generator").get<std::string>();
  inst.theta = json_vector(meta.at("theta"));
  inst.adjacency = fs::exists(dir / "truth.edgelist") ? read_edge_list(dir / "truth.edgelist")
                                                      : read_edge_list(dir / "observed.edgelist");
  inst.unknown = read_pair_list(dir / "unknown.pairs");
  inst.signals = read_signals_csv(dir / "signals.csv", meta.at("noise_variance").get<double>());
  return out;
}

// --- gen ----------------------------------------------------------------------

int gen_graph(const ConfigSource& src, std::uint64_t seed, const std::string& out) {
  const auto cfg = BenchmarkConfig::from_keys(src.keys());
  const GraphShape shape = sample_shape(cfg.generator, derive_seed(seed, {1}));
  const Matrix g = generate_graph(cfg.generator, shape, derive_seed(seed, {2}));
  if (out.empty()) {
    write_edge_list(std::cout, g);
  } else {
    write_edge_list(fs::path(out), g);
    std::cerr << "wrote " << out << " (" << shape.nodes << " nodes, " << edge_count(g) << " edges)\n";
  }
  return 0;
}

int gen_corpus(const ConfigSource& src, std::uint64_t seed, std::size_t count, const std::string& out) {
  const auto cfg = BenchmarkConfig::from_keys(src.keys());
  GraphDataset d;
  for (std::size_t m = 0; m < count; ++m) {
    const GraphShape shape = sample_shape(cfg.generator, derive_seed(seed, {m, 1}));
    d.graphs.push_back(generate_graph(cfg.generator, shape, derive_seed(seed, {m, 2})));
  }
  write_corpus(out, d);
  std::cerr << "wrote " << count << " graphs to " << out << '\n';
  return 0;
}

int gen_instance(const ConfigSource& src, std::uint64_t seed, std::size_t k, const std::string& out) {
  const auto cfg = BenchmarkConfig::from_keys(src.keys());
  const auto inst = make_instance(cfg, seed, k);
  write_instance(out, inst, instance_shape(cfg, seed), cfg);
  std::cerr << "wrote " << inst.generator << " instance, " << inst.unknown.size() << " unknown pairs, K=" << k
            << " to " << out << '\n';
  return 0;
}

// --- infer / oracle -------------------------------------------------------------

int infer(const ConfigSource& src, const std::string& dir, const std::string& method_name_arg,
          std::uint64_t seed, const std::string& out) {
  auto cfg = BenchmarkConfig::from_keys(src.keys());
  const LoadedInstance loaded = read_instance(dir);
  cfg.filter = loaded.filter;
  cfg.order = loaded.order;
  const Method method = parse_method(method_name_arg);
  const auto filter = make_filter(cfg.filter, cfg.order);
  const auto& inst = loaded.instance;
  const auto prior = method == Method::langevin_prior ? make_prior(cfg, loaded.shape)
                                                      : std::shared_ptr<const ScoreProvider>(new ZeroScore);
  const auto res = run_method(method, inst.problem(), *filter, inst.signals, *prior,
                              method_options(cfg, seed, method));

  std::cout << "method       " << method_name_arg << '\n'
            << "graph        " << inst.generator << ", " << inst.unknown.size() << " unknown pairs, K="
            << inst.signals.count() << '\n'
            << "prior        " << (method == Method::langevin_prior ? prior->name() : "none") << '\n'
            << "theta_hat    " << join_vector(res.theta) << '\n'
            << "theta_true   " << join_vector(inst.theta) << '\n'
            << "f1           " << f1_score(pair_bits(inst.adjacency, inst.unknown), pair_bits(res.adjacency, inst.unknown))
            << '\n'
            << "theta_nrmse  " << theta_nrmse(inst.theta, res.theta) << '\n'
            << "log_lik      ";
  for (double l : res.level_log_likelihood) std::cout << ' ' << l;
  std::cout << '\n';
  if (!out.empty()) write_edge_list(fs::path(out), res.adjacency);
  return 0;
}

int oracle(const ConfigSource& src, const std::string& dir, std::size_t top) {
  const auto cfg = BenchmarkConfig::from_keys(src.keys());
  const LoadedInstance loaded = read_instance(dir);
  const auto filter = make_filter(loaded.filter, loaded.order);
  const auto& inst = loaded.instance;
  std::unique_ptr<ConfigurationPrior> prior;
  if (cfg.prior == "bernoulli") {
    prior = std::make_unique<BernoulliConfigurationPrior>(cfg.bernoulli_p);
  } else if (cfg.prior == "empirical") {
    prior = std::make_unique<EmpiricalConfigurationPrior>(prior_corpus(cfg, loaded.shape));
  } else if (cfg.prior == "zero") {
    prior = std::make_unique<BernoulliConfigurationPrior>(0.5);  // flat
  } else {
    throw ConfigError("oracle supports prior = bernoulli, empirical or zero");
  }
  const AdjacencyState problem = inst.problem();
  const auto table = enumerate_posterior(problem, *filter, inst.theta, inst.signals, *prior);
  std::vector<std::size_t> order(table.probability.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return table.probability[a] > table.probability[b]; });
  const std::size_t truth = table.index_of(inst.adjacency);
  std::cout << "unknown pairs:";
  for (const auto& p : table.unknown) std::cout << " (" << p.i << ',' << p.j << ')';
  std::cout << "\nrank  bits  probability\n";
  for (std::size_t r = 0; r < std::min(top, order.size()); ++r) {
    const std::size_t c = order[r];
    std::string bits;
    for (std::size_t u = 0; u < table.unknown.size(); ++u) bits += (c >> u) & 1U ? '1' : '0';
    std::cout << std::setw(4) << r + 1 << "  " << bits << "  " << std::setprecision(6) << table.probability[c]
              << (c == truth ? "  (truth)" : "") << '\n';
  }
  return 0;
}

// --- bench / check-weights --------------------------------------------------------

int bench(const ConfigSource& src, const CLI::App& cmd, std::size_t trials, std::uint64_t seed_base,
          std::size_t threads, const std::string& output) {
  KeyValueConfig keys = src.keys();
  if (cmd.count("--trials")) keys.set("trials", std::to_string(trials));
  if (cmd.count("--seed-base")) keys.set("seed_base", std::to_string(seed_base));
  if (cmd.count("--threads")) keys.set("threads", std::to_string(threads));
  if (cmd.count("--output")) keys.set("output", output);
  const auto cfg = BenchmarkConfig::from_keys(keys);
  if (cfg.output.empty()) {
    std::cout << run_benchmark(cfg).csv();
  } else {
    const auto res = run_benchmark_to_file(cfg);
    std::cerr << "wrote " << res.trials.size() << " trial rows to " << cfg.output << '\n';
  }
  return 0;
}

int check_weights(const std::string& weights, const std::string& corpus_dir, const std::vector<double>& sigmas,
                  std::size_t samples, std::uint64_t seed) {
  const LearnedScore net(load_weights(weights));
  std::cout << "weights ok: " << net.weights().layers.size() << " layers, hidden_dim "
            << net.weights().hidden_dim() << '\n';
  if (corpus_dir.empty()) return 0;
  const GraphDataset corpus = load_corpus(corpus_dir);
  corpus.validate();
  std::cout << "sigma  samples  mean_sq_dev  mean_cosine\n";
  for (const auto& r : compare_to_empirical(net, corpus, sigmas, samples, seed)) {
    std::cout << std::setprecision(4) << r.sigma << "  " << r.samples << "  " << std::setprecision(6)
              << r.mean_squared_deviation << "  " << r.mean_cosine << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph identification with annealed Langevin sampling"};
  app.require_subcommand(1);

  ConfigSource gen_src, infer_src, oracle_src, bench_src;
  std::uint64_t seed = 1;
  std::size_t count = 200, k = 4, top = 10, trials = 0, threads = 1, samples = 20;
  std::string out, dir, method = "langevin_prior", weights, corpus;
  std::vector<double> sigmas{0.5, 0.25, 0.1, 0.03};
  std::uint64_t seed_base = 1;

  auto* gen = app.add_subcommand("gen", "generate graphs, corpora or experiment instances");
  gen->require_subcommand(1);
  auto* gen_g = gen->add_subcommand("graph", "one random graph as an edge list");
  auto* gen_c = gen->add_subcommand("corpus", "a directory of random graphs");
  auto* gen_i = gen->add_subcommand("instance", "a masked graph with signals, as used by the benchmark");
  for (auto* sub : {gen_g, gen_c, gen_i}) {
    gen_src.attach(sub);
    sub->add_option("--seed", seed, "random seed");
  }
  gen_g->add_option("-o,--out", out, "output edge list (stdout when omitted)");
  gen_c->add_option("-n,--count", count, "number of graphs");
  gen_c->add_option("-o,--out", out, "output directory")->required();
  gen_i->add_option("-k,--signals", k, "number of signal pairs");
  gen_i->add_option("-o,--out", out, "output directory")->required();

  auto* inf = app.add_subcommand("infer", "run one method on an instance directory");
  infer_src.attach(inf);
  inf->add_option("-i,--instance", dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  inf->add_option("-m,--method", method, "langevin_prior | langevin_noprior | adam_mle");
  inf->add_option("--seed", seed, "sampler seed");
  inf->add_option("-o,--out", out, "write the estimated graph to this edge list");

  auto* orc = app.add_subcommand("oracle", "exact posterior over completions of a small instance");
  oracle_src.attach(orc);
  orc->add_option("-i,--instance", dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  orc->add_option("--top", top, "configurations to list");

  auto* bch = app.add_subcommand("bench", "run the method comparison sweep and write CSV");
  bench_src.attach(bch);
  bch->add_option("--trials", trials, "trials per K");
  bch->add_option("--seed-base", seed_base, "seed of the first trial");
  bch->add_option("--threads", threads, "worker threads");
  bch->add_option("-o,--output", out, "CSV path (stdout when omitted)");

  auto* chk = app.add_subcommand("check-weights", "validate a score network file against the empirical score");
  chk->add_option("-w,--weights", weights, "weight file")->required();
  chk->add_option("--corpus", corpus, "corpus directory to compare against")->check(CLI::ExistingDirectory);
  chk->add_option("--sigmas", sigmas, "noise levels");
  chk->add_option("--samples", samples, "noisy draws per noise level");
  chk->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_g->parsed()) return gen_graph(gen_src, seed, out);
    if (gen_c->parsed()) return gen_corpus(gen_src, seed, count, out);
    if (gen_i->parsed()) return gen_instance(gen_src, seed, k, out);
    if (inf->parsed()) return infer(infer_src, dir, method, seed, out);
    if (orc->parsed()) return oracle(oracle_src, dir, top);
    if (bch->parsed()) return bench(bench_src, *bch, trials, seed_base, threads, out);
    if (chk->parsed()) return check_weights(weights, corpus, sigmas, samples, seed);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
