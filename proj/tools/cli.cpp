#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypergcn/dataio.hpp"
#include "hypergcn/densek.hpp"
#include "hypergcn/models.hpp"

namespace hgcn::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct ModelFlags {
  std::string method = "hypergcn";
  std::size_t hidden = 32;
  double dropout = 0.5;
  double lr = 0.01;
  double weight_decay = 5e-4;
  std::string decay_mode = "decoupled";
  std::size_t epochs = 200;
  double hlr_lambda = 0.001;
  std::string self_loops = "unit";
};

struct Flags {
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t trials = 1;
  ModelFlags model;
  // densek
  std::string densek_method = "remove-min-degree";
  double k_frac = 0.75;
  std::size_t maps = 4;
  std::size_t train_samples = 200;
  std::size_t train_n_min = 100;
  std::size_t train_n_max = 300;
  double p = 0.75;
  // generators
  double eta = 0.5;
  std::string eta_reading = "ratio";
  std::size_t n = 1000;
  std::size_t feature_dim = 256;
};

const std::vector<std::string> kMethodNames = {"hypergcn", "one-hypergcn", "fast-hypergcn", "hgnn", "mlp", "mlp-hlr"};
const std::vector<std::string> kDenseKMethods = {"max-degree", "remove-min-degree", "brute-force", "learned"};

void add_model_flags(CLI::App& cmd, ModelFlags& m) {
  cmd.add_option("--method", m.method, "hypergcn | one-hypergcn | fast-hypergcn | hgnn | mlp | mlp-hlr")
      ->check(CLI::IsMember(kMethodNames));
  cmd.add_option("--hidden", m.hidden, "hidden units")->check(CLI::PositiveNumber);
  cmd.add_option("--dropout", m.dropout, "dropout rate")->check(CLI::Range(0.0, 0.999));
  cmd.add_option("--lr", m.lr, "learning rate")->check(CLI::PositiveNumber);
  cmd.add_option("--weight-decay", m.weight_decay, "weight decay on the first layer")->check(CLI::NonNegativeNumber);
  cmd.add_option("--decay-mode", m.decay_mode, "decoupled | l2")->check(CLI::IsMember({"decoupled", "l2"}));
  cmd.add_option("--epochs", m.epochs, "training epochs");
  cmd.add_option("--hlr-lambda", m.hlr_lambda, "mlp-hlr penalty weight")->check(CLI::NonNegativeNumber);
  cmd.add_option("--self-loops", m.self_loops, "unit | degree-restoring")
      ->check(CLI::IsMember({"unit", "degree-restoring"}));
}

TrainConfig to_train_config(const ModelFlags& m, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.method = parse_method(m.method);
  cfg.hidden = m.hidden;
  cfg.dropout = static_cast<Real>(m.dropout);
  cfg.learning_rate = static_cast<Real>(m.lr);
  cfg.weight_decay = static_cast<Real>(m.weight_decay);
  cfg.decay_mode = m.decay_mode == "l2" ? WeightDecay::l2 : WeightDecay::decoupled;
  cfg.epochs = m.epochs;
  cfg.hlr_lambda = static_cast<Real>(m.hlr_lambda);
  cfg.seed = seed;
  cfg.self_loops = m.self_loops == "degree-restoring" ? SelfLoops::degree_restoring : SelfLoops::unit;
  return cfg;
}

json model_json(const ModelFlags& m) {
  return {{"method", m.method}, {"hidden", m.hidden},         {"dropout", m.dropout},
          {"lr", m.lr},         {"weight_decay", m.weight_decay}, {"decay_mode", m.decay_mode}, {"epochs", m.epochs},
          {"hlr_lambda", m.hlr_lambda}, {"self_loops", m.self_loops}};
}

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

void echo_config(std::ostream& out, const std::string& command, json config) {
  emit(out, {{"command", command}, {"config", std::move(config)}});
}

void log_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::size_t worker_count() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HYPERGCN_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) threads = std::min(threads, static_cast<std::size_t>(cap));
  }
  return threads;
}

std::size_t k_from_fraction(double frac, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

json vertex_list(const std::vector<VertexId>& vs) { return json(vs); }

int cmd_train(const Flags& f, std::ostream& out, std::ostream& err) {
  echo_config(out, "train", {{"data", f.data}, {"budget", f.budget}, {"seed", f.seed}, {"model", model_json(f.model)}});
  std::vector<std::string> warnings;
  const auto bundle = load_bundle(f.data, &warnings);
  log_warnings(err, warnings);
  Rng split_rng = make_rng(f.seed, Stream::split);
  const auto split = balanced_split(bundle, f.budget, split_rng);
  const auto report = train_ssl(bundle.hypergraph, bundle.features, split, to_train_config(f.model, f.seed));
  out << to_json(report) << '\n';
  return kExitOk;
}

int cmd_trials(const Flags& f, std::ostream& out, std::ostream& err) {
  echo_config(out, "trials",
              {{"data", f.data}, {"budget", f.budget}, {"trials", f.trials}, {"seed", f.seed}, {"model", model_json(f.model)}});
  std::vector<std::string> warnings;
  const auto bundle = load_bundle(f.data, &warnings);
  log_warnings(err, warnings);
  const auto cfg = to_train_config(f.model, f.seed);
  const auto summary = run_trials(bundle.hypergraph, bundle.features, bundle.labels, bundle.num_classes, cfg, f.trials,
                                  f.budget, worker_count());
  double seconds = 0;
  for (const auto& r : summary.reports) {
    out << to_json(r) << '\n';
    seconds += r.seconds_per_epoch;
  }
  seconds /= static_cast<double>(summary.reports.size());
  emit(out, {{"method", f.model.method},
             {"dataset", bundle.name},
             {"label_budget", f.budget},
             {"trials", f.trials},
             {"mean", summary.mean},
             {"stdev", summary.stdev},
             {"epochs", cfg.epochs},
             {"seconds_per_epoch", seconds}});
  if (!f.out.empty()) {
    const bool fresh = !fs::exists(f.out);
    std::ofstream csv(f.out, std::ios::app);
    if (!csv) throw DataError("cannot write " + f.out);
    if (fresh) csv << "method,dataset,label_budget,mean,stdev,epochs,seconds_per_epoch\n";
    csv << f.model.method << ',' << bundle.name << ',' << f.budget << ',' << summary.mean << ',' << summary.stdev << ','
        << cfg.epochs << ',' << seconds << '\n';
  }
  return kExitOk;
}

int cmd_densek(const Flags& f, std::ostream& out, std::ostream& err) {
  json config = {{"data", f.data}, {"method", f.densek_method}, {"k_frac", f.k_frac}, {"seed", f.seed}};
  if (f.densek_method == "learned") {
    config["maps"] = f.maps;
    config["train_samples"] = f.train_samples;
    config["train_n_min"] = f.train_n_min;
    config["train_n_max"] = f.train_n_max;
    config["p"] = f.p;
    config["model"] = model_json(f.model);
  }
  echo_config(out, "densek", config);
  std::vector<std::string> warnings;
  DenseKInstance inst;
  inst.hypergraph = load_hypergraph(f.data, &warnings);
  log_warnings(err, warnings);
  inst.k = k_from_fraction(f.k_frac, inst.hypergraph.num_vertices());

  std::vector<VertexId> chosen;
  if (f.densek_method == "max-degree") {
    chosen = max_degree(inst);
  } else if (f.densek_method == "remove-min-degree") {
    chosen = remove_min_degree(inst);
  } else if (f.densek_method == "brute-force") {
    chosen = brute_force(inst).vertices;
  } else {
    if (f.train_n_min < 2 || f.train_n_min > f.train_n_max) throw std::invalid_argument("invalid training size range");
    Rng gen = make_rng(f.seed, Stream::generator);
    std::uniform_int_distribution<std::size_t> size_dist(f.train_n_min, f.train_n_max);
    std::vector<DenseKSample> samples;
    for (std::size_t i = 0; i < f.train_samples; ++i) {
      const std::size_t n = size_dist(gen);
      samples.push_back(gen_sample(n, k_from_fraction(f.k_frac, n), f.p, gen));
    }
    const auto model = train_densek(samples, to_train_config(f.model, f.seed), {.maps = f.maps});
    chosen = decode_topk(predict_maps(model, inst.hypergraph, f.seed), inst);
  }
  emit(out, {{"method", f.densek_method},
             {"k", inst.k},
             {"density", density(inst.hypergraph, chosen)},
             {"vertex_set", vertex_list(chosen)}});
  return kExitOk;
}

int cmd_gen_noisy(const Flags& f, std::ostream& out, std::ostream&) {
  echo_config(out, "gen-noisy",
              {{"eta", f.eta},
               {"eta_reading", f.eta_reading},
               {"seed", f.seed},
               {"out", f.out},
               {"n", f.n},
               {"feature_dim", f.feature_dim}});
  NoisySslConfig cfg;
  cfg.eta = f.eta;
  cfg.reading = f.eta_reading == "majority-share" ? EtaReading::majority_share : EtaReading::ratio;
  cfg.num_vertices = f.n;
  cfg.feature_dim = f.feature_dim;
  Rng rng = make_rng(f.seed, Stream::generator);
  const auto bundle = gen_noisy_ssl(cfg, rng);
  save_bundle(bundle, f.out);
  const auto counts = size_counts(bundle.hypergraph);
  emit(out, {{"name", bundle.name},
             {"n", bundle.hypergraph.num_vertices()},
             {"m", bundle.hypergraph.num_edges()},
             {"p", bundle.features.cols()},
             {"q", bundle.num_classes},
             {"N", counts.incidences},
             {"dir", f.out}});
  return kExitOk;
}

int cmd_gen_densek(const Flags& f, std::ostream& out, std::ostream&) {
  echo_config(out, "gen-densek", {{"n", f.n}, {"k_frac", f.k_frac}, {"p", f.p}, {"seed", f.seed}, {"out", f.out}});
  Rng rng = make_rng(f.seed, Stream::generator);
  const std::size_t k = k_from_fraction(f.k_frac, f.n);
  const auto sample = gen_sample(f.n, k, f.p, rng);
  fs::create_directories(f.out);
  {
    std::ofstream edges(fs::path(f.out) / kHyperedgesFile);
    if (!edges) throw DataError("cannot write " + f.out);
    write_hyperedges(edges, sample.hypergraph);
  }
  {
    std::ofstream target(fs::path(f.out) / "target.txt");
    write_labels(target, sample.target);
  }
  {
    std::ofstream manifest(fs::path(f.out) / kManifestFile);
    manifest << json{{"name", "densek-sample"}, {"n", f.n}}.dump(2) << '\n';
  }
  std::vector<VertexId> planted;
  for (std::size_t v = 0; v < sample.target.size(); ++v) {
    if (sample.target[v]) planted.push_back(static_cast<VertexId>(v));
  }
  emit(out, {{"n", f.n},
             {"m", sample.hypergraph.num_edges()},
             {"k", k},
             {"planted_density", density(sample.hypergraph, planted)},
             {"dir", f.out}});
  return kExitOk;
}

int cmd_counts(const Flags& f, std::ostream& out, std::ostream& err) {
  echo_config(out, "counts", {{"data", f.data}});
  std::vector<std::string> warnings;
  const auto h = load_hypergraph(f.data, &warnings);
  log_warnings(err, warnings);
  const auto c = size_counts(h);
  emit(out, {{"n", h.num_vertices()}, {"m", h.num_edges()}, {"N", c.incidences}, {"N_m", c.mediator}, {"N_c", c.clique}});
  return kExitOk;
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream&) {
  echo_config(out, "validate", {{"data", f.data}});
  fs::path file = f.data;
  std::optional<std::size_t> n;
  if (fs::is_directory(file)) {
    if (fs::exists(file / kManifestFile)) {
      std::ifstream in(file / kManifestFile);
      const auto j = json::parse(in, nullptr, false);
      if (j.is_object() && j.contains("n") && j["n"].is_number_unsigned()) n = j["n"].get<std::size_t>();
    }
    file /= kHyperedgesFile;
  }
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<std::string> warnings;
  const auto parsed = read_hyperedges(in, std::nullopt, &warnings, file.string());
  const Hypergraph h(n.value_or(parsed.num_vertices()), {parsed.edges().begin(), parsed.edges().end()});
  const auto report = validate(h);
  json violations = json::array();
  for (const auto& v : report.violations) violations.push_back({{"edge", v.edge}, {"message", v.message}});
  emit(out, {{"ok", report.ok()},
             {"n", h.num_vertices()},
             {"m", h.num_edges()},
             {"violations", violations},
             {"warnings", warnings}});
  return report.ok() ? kExitOk : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypergraph convolutional networks and densest-k-subhypergraph solvers", "hypergcn"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "train one model on a bundle and report test error");
  train->add_option("--data", f.data, "bundle directory")->required();
  train->add_option("--budget", f.budget, "number of labelled vertices (divisible by q)")->required();
  train->add_option("--seed", f.seed, "base seed");
  add_model_flags(*train, f.model);

  auto* trials = app.add_subcommand("trials", "repeat training over class-balanced random splits");
  trials->add_option("--data", f.data, "bundle directory")->required();
  trials->add_option("--budget", f.budget, "number of labelled vertices (divisible by q)")->required();
  trials->add_option("--trials", f.trials, "number of splits")->check(CLI::PositiveNumber);
  trials->add_option("--seed", f.seed, "base seed; trial t uses seed + t");
  trials->add_option("--out", f.out, "append the aggregate CSV row to this file");
  add_model_flags(*trials, f.model);

  auto* densek = app.add_subcommand("densek", "densest-k-subhypergraph on a hyperedge list");
  densek->add_option("--data", f.data, "hyperedge file or directory")->required();
  densek->add_option("--method", f.densek_method, "max-degree | remove-min-degree | brute-force | learned")
      ->check(CLI::IsMember(kDenseKMethods));
  densek->add_option("--k-frac", f.k_frac, "k as a fraction of n")->check(CLI::Range(0.0, 1.0));
  densek->add_option("--seed", f.seed, "seed for the learned solver");
  densek->add_option("--maps", f.maps, "probability maps of the learned solver")->check(CLI::PositiveNumber);
  densek->add_option("--train-samples", f.train_samples, "synthetic training samples")->check(CLI::PositiveNumber);
  densek->add_option("--train-n-min", f.train_n_min, "smallest training hypergraph");
  densek->add_option("--train-n-max", f.train_n_max, "largest training hypergraph");
  densek->add_option("--p", f.p, "probability a training hyperedge lies in the planted set")->check(CLI::Range(0.0, 1.0));
  densek->add_option("--propagation", f.model.method, "propagation of the learned solver")
      ->check(CLI::IsMember(kMethodNames));
  densek->add_option("--epochs", f.model.epochs, "training epochs of the learned solver");
  densek->add_option("--hidden", f.model.hidden, "hidden units")->check(CLI::PositiveNumber);
  densek->add_option("--dropout", f.model.dropout, "dropout rate")->check(CLI::Range(0.0, 0.999));
  densek->add_option("--lr", f.model.lr, "learning rate")->check(CLI::PositiveNumber);
  densek->add_option("--weight-decay", f.model.weight_decay, "weight decay")->check(CLI::NonNegativeNumber);
  densek->add_option("--decay-mode", f.model.decay_mode, "decoupled | l2")->check(CLI::IsMember({"decoupled", "l2"}));

  auto* gen_noisy = app.add_subcommand("gen-noisy", "write a synthetic pure/noisy two-class bundle");
  gen_noisy->add_option("--eta", f.eta, "class balance of noisy hyperedges, see --eta-reading")
      ->check(CLI::Range(0.0, 1.0));
  gen_noisy->add_option("--eta-reading", f.eta_reading, "ratio (minority/majority) | majority-share (majority/size)")
      ->check(CLI::IsMember({"ratio", "majority-share"}));
  gen_noisy->add_option("--seed", f.seed, "generator seed");
  gen_noisy->add_option("--out", f.out, "output directory")->required();
  gen_noisy->add_option("--n", f.n, "number of vertices")->check(CLI::PositiveNumber);
  gen_noisy->add_option("--features", f.feature_dim, "feature dimension")->check(CLI::PositiveNumber);

  auto* gen_densek = app.add_subcommand("gen-densek", "write a synthetic densest-k training sample");
  gen_densek->add_option("--n", f.n, "number of vertices")->check(CLI::PositiveNumber);
  gen_densek->add_option("--k-frac", f.k_frac, "planted set size as a fraction of n")->check(CLI::Range(0.0, 1.0));
  gen_densek->add_option("--p", f.p, "probability a hyperedge lies in the planted set")->check(CLI::Range(0.0, 1.0));
  gen_densek->add_option("--seed", f.seed, "generator seed");
  gen_densek->add_option("--out", f.out, "output directory")->required();

  auto* counts = app.add_subcommand("counts", "incidence, mediator and clique pair counts");
  counts->add_option("--data", f.data, "hyperedge file or directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "check hypergraph invariants");
  validate_cmd->add_option("--data", f.data, "hyperedge file or directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(f, out, err);
    if (*trials) return cmd_trials(f, out, err);
    if (*densek) return cmd_densek(f, out, err);
    if (*gen_noisy) return cmd_gen_noisy(f, out, err);
    if (*gen_densek) return cmd_gen_densek(f, out, err);
    if (*counts) return cmd_counts(f, out, err);
    if (*validate_cmd) return cmd_validate(f, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace hgcn::cli
