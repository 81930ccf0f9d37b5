#include "hypergcn/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace hgcn {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  return in;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct ParsedEdges {
  std::vector<Hyperedge> edges;
  std::vector<std::size_t> lines;  // source line of each kept hyperedge
  std::size_t max_id_plus_one = 0;
};

ParsedEdges parse_hyperedges(std::istream& in, std::optional<std::size_t> n, std::vector<std::string>* warnings,
                             const std::string& source) {
  ParsedEdges parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    Hyperedge e;
    std::string tok;
    while (tokens >> tok) {
      std::uint64_t id = 0;
      if (!parse_number(tok, id) || id > std::numeric_limits<VertexId>::max()) {
        fail(source, line_no, "invalid vertex id '" + tok + "'");
      }
      if (n && id >= *n) fail(source, line_no, "vertex " + tok + " out of range (n=" + std::to_string(*n) + ")");
      e.push_back(static_cast<VertexId>(id));
    }
    if (e.empty()) continue;
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    parsed.max_id_plus_one = std::max<std::size_t>(parsed.max_id_plus_one, e.back() + 1u);
    if (e.size() < 2) {
      if (warnings) warnings->push_back(source + ":" + std::to_string(line_no) + ": dropped hyperedge with a single vertex");
      continue;
    }
    parsed.edges.push_back(std::move(e));
    parsed.lines.push_back(line_no);
  }
  return parsed;
}

std::vector<double> read_weights(std::istream& in, const ParsedEdges& parsed, const std::string& source) {
  std::vector<double> by_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      by_line.push_back(1.0);
      continue;
    }
    double w = 0;
    if (!parse_number(line, w) || !std::isfinite(w) || w <= 0.0) fail(source, line_no, "invalid hyperedge weight");
    by_line.push_back(w);
  }
  std::vector<double> weights;
  weights.reserve(parsed.lines.size());
  for (std::size_t l : parsed.lines) {
    if (l > by_line.size()) fail(source, by_line.size(), "fewer weights than hyperedge lines");
    weights.push_back(by_line[l - 1]);
  }
  return weights;
}

struct Manifest {
  std::string name;
  std::optional<std::size_t> n, p, q;
};

Manifest read_manifest(const fs::path& path) {
  Manifest m;
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path.string() + ": manifest must be a JSON object");
  auto count = [&](const char* key) -> std::optional<std::size_t> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number_unsigned()) throw DataError(path.string() + ": '" + key + "' must be a non-negative integer");
    return j[key].get<std::size_t>();
  };
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw DataError(path.string() + ": 'name' must be a string");
    m.name = j["name"].get<std::string>();
  }
  m.n = count("n");
  m.p = count("p");
  m.q = count("q");
  return m;
}

bool unit_weights(const Hypergraph& h) {
  return std::all_of(h.weights().begin(), h.weights().end(), [](double w) { return w == 1.0; });
}

}  // namespace

Hypergraph read_hyperedges(std::istream& in, std::optional<std::size_t> n, std::vector<std::string>* warnings,
                           const std::string& source) {
  auto parsed = parse_hyperedges(in, n, warnings, source);
  return Hypergraph(n.value_or(parsed.max_id_plus_one), std::move(parsed.edges));
}

void write_hyperedges(std::ostream& out, const Hypergraph& h) {
  for (const auto& e : h.edges()) {
    for (std::size_t i = 0; i < e.size(); ++i) out << (i ? " " : "") << e[i];
    out << '\n';
  }
}

Matrix read_features(std::istream& in, const std::string& source) {
  std::vector<Real> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      double v = 0;
      const auto field = rest.substr(0, comma);
      if (!parse_number(field, v) || !std::isfinite(v)) {
        fail(source, line_no, "invalid feature value '" + std::string(trim(field)) + "'");
      }
      values.push_back(static_cast<Real>(v));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      fail(source, line_no, "expected " + std::to_string(cols) + " values, found " + std::to_string(count));
    }
    ++rows;
  }
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

void write_features(std::ostream& out, const Matrix& features) {
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_real(row[c]);
    out << '\n';
  }
}

std::vector<Label> read_labels(std::istream& in, std::optional<std::size_t> num_classes, const std::string& source) {
  std::vector<Label> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Label y = 0;
    if (!parse_number(line, y)) fail(source, line_no, "invalid label '" + std::string(trim(line)) + "'");
    if (y < 0 || (num_classes && static_cast<std::size_t>(y) >= *num_classes)) {
      fail(source, line_no,
           "label " + std::to_string(y) + " out of range" +
               (num_classes ? " (q=" + std::to_string(*num_classes) + ")" : std::string{}));
    }
    labels.push_back(y);
  }
  return labels;
}

void write_labels(std::ostream& out, std::span<const Label> labels) {
  for (Label y : labels) out << y << '\n';
}

DatasetBundle load_bundle(const fs::path& dir, std::vector<std::string>* warnings) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  Manifest manifest;
  if (fs::exists(dir / kManifestFile)) manifest = read_manifest(dir / kManifestFile);

  DatasetBundle b;
  b.name = manifest.name.empty() ? dir.filename().string() : manifest.name;
  {
    auto in = open_input(dir / kLabelsFile);
    b.labels = read_labels(in, manifest.q, (dir / kLabelsFile).string());
  }
  const std::size_t n = b.labels.size();
  if (manifest.n && *manifest.n != n) {
    throw DataError((dir / kManifestFile).string() + ": manifest n=" + std::to_string(*manifest.n) + " but " +
                    std::to_string(n) + " labels");
  }
  {
    auto in = open_input(dir / kFeaturesFile);
    b.features = read_features(in, (dir / kFeaturesFile).string());
  }
  if (b.features.rows() != n) {
    throw DataError((dir / kFeaturesFile).string() + ": " + std::to_string(b.features.rows()) + " rows but " +
                    std::to_string(n) + " labels");
  }
  if (manifest.p && *manifest.p != b.features.cols()) {
    throw DataError((dir / kManifestFile).string() + ": manifest p=" + std::to_string(*manifest.p) + " but features have " +
                    std::to_string(b.features.cols()) + " columns");
  }
  {
    auto in = open_input(dir / kHyperedgesFile);
    auto parsed = parse_hyperedges(in, n, warnings, (dir / kHyperedgesFile).string());
    std::vector<double> weights;
    if (fs::exists(dir / kWeightsFile)) {
      auto win = open_input(dir / kWeightsFile);
      weights = read_weights(win, parsed, (dir / kWeightsFile).string());
    }
    b.hypergraph = Hypergraph(n, std::move(parsed.edges), std::move(weights));
  }
  auto report = validate(b.hypergraph);
  if (!report.ok()) throw DataError((dir / kHyperedgesFile).string() + ": " + report.to_string());

  if (manifest.q) {
    b.num_classes = *manifest.q;
  } else {
    Label top = -1;
    for (Label y : b.labels) top = std::max(top, y);
    b.num_classes = static_cast<std::size_t>(top + 1);
  }
  std::vector<std::size_t> per_class(b.num_classes, 0);
  for (Label y : b.labels) ++per_class[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c] == 0) throw DataError((dir / kLabelsFile).string() + ": class " + std::to_string(c) + " has no vertices");
  }
  return b;
}

void save_bundle(const DatasetBundle& bundle, const fs::path& dir) {
  if (bundle.features.rows() != bundle.labels.size() || bundle.hypergraph.num_vertices() != bundle.labels.size()) {
    throw std::invalid_argument("save_bundle: inconsistent vertex counts");
  }
  fs::create_directories(dir);
  {
    auto out = open_output(dir / kHyperedgesFile);
    write_hyperedges(out, bundle.hypergraph);
  }
  if (!unit_weights(bundle.hypergraph)) {
    auto out = open_output(dir / kWeightsFile);
    for (double w : bundle.hypergraph.weights()) out << format_real(w) << '\n';
  } else if (fs::exists(dir / kWeightsFile)) {
    fs::remove(dir / kWeightsFile);
  }
  {
    auto out = open_output(dir / kFeaturesFile);
    write_features(out, bundle.features);
  }
  {
    auto out = open_output(dir / kLabelsFile);
    write_labels(out, bundle.labels);
  }
  json manifest = {{"name", bundle.name},
                   {"n", bundle.labels.size()},
                   {"p", bundle.features.cols()},
                   {"q", bundle.num_classes}};
  auto out = open_output(dir / kManifestFile);
  out << manifest.dump(2) << '\n';
}

Hypergraph load_hypergraph(const fs::path& path, std::vector<std::string>* warnings) {
  fs::path file = path;
  std::optional<std::size_t> n;
  if (fs::is_directory(path)) {
    file = path / kHyperedgesFile;
    if (fs::exists(path / kManifestFile)) n = read_manifest(path / kManifestFile).n;
    if (!n && fs::exists(path / kLabelsFile)) {
      auto in = open_input(path / kLabelsFile);
      n = read_labels(in, std::nullopt, (path / kLabelsFile).string()).size();
    }
  }
  auto in = open_input(file);
  auto parsed = parse_hyperedges(in, n, warnings, file.string());
  const std::size_t count = n.value_or(parsed.max_id_plus_one);
  std::vector<double> weights;
  if (fs::is_directory(path) && fs::exists(path / kWeightsFile)) {
    auto win = open_input(path / kWeightsFile);
    weights = read_weights(win, parsed, (path / kWeightsFile).string());
  }
  Hypergraph h(count, std::move(parsed.edges), std::move(weights));
  auto report = validate(h);
  if (!report.ok()) throw DataError(file.string() + ": " + report.to_string());
  return h;
}

void write_weighted_graph(std::ostream& out, const WeightedGraph& g) {
  for (const auto& p : g.pairs()) out << p.u << ' ' << p.v << ' ' << format_real(p.weight) << '\n';
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (g.loops()[v] != 0.0) out << v << ' ' << v << ' ' << format_real(g.loops()[v]) << '\n';
  }
}

LabeledSplit balanced_split(std::span<const Label> labels, std::size_t num_classes, std::size_t budget, Rng& rng) {
  if (num_classes == 0) throw std::invalid_argument("balanced_split: no classes");
  if (budget % num_classes != 0) {
    throw std::invalid_argument("balanced_split: label budget " + std::to_string(budget) +
                                " is not divisible by the class count " + std::to_string(num_classes));
  }
  const std::size_t quota = budget / num_classes;
  std::vector<std::vector<VertexId>> members(num_classes);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const Label y = labels[v];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw std::invalid_argument("balanced_split: label out of range at vertex " + std::to_string(v));
    }
    members[static_cast<std::size_t>(y)].push_back(static_cast<VertexId>(v));
  }
  LabeledSplit split;
  split.labels.assign(labels.begin(), labels.end());
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (members[c].size() < quota) {
      throw std::invalid_argument("balanced_split: class " + std::to_string(c) + " has " +
                                  std::to_string(members[c].size()) + " members, needs " + std::to_string(quota));
    }
    std::sample(members[c].begin(), members[c].end(), std::back_inserter(split.labelled), quota, rng);
  }
  std::sort(split.labelled.begin(), split.labelled.end());
  std::vector<bool> chosen(labels.size(), false);
  for (VertexId v : split.labelled) chosen[v] = true;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (!chosen[v]) split.evaluation.push_back(static_cast<VertexId>(v));
  }
  return split;
}

LabeledSplit balanced_split(const DatasetBundle& bundle, std::size_t budget, Rng& rng) {
  return balanced_split(bundle.labels, bundle.num_classes, budget, rng);
}

std::pair<std::size_t, std::size_t> noisy_class_counts(std::size_t size, double eta, EtaReading reading) {
  const double s = static_cast<double>(size);
  if (reading == EtaReading::majority_share) {
    if (!(eta >= 0.5 && eta <= 1.0)) throw std::invalid_argument("noisy_class_counts: majority share must lie in [0.5, 1]");
    const auto majority = static_cast<std::size_t>(std::lround(s * eta));
    return {majority, size - majority};
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("noisy_class_counts: eta must lie in (0, 1]");
  const auto minority = static_cast<std::size_t>(std::lround(s * eta / (1.0 + eta)));
  return {size - minority, minority};
}

DatasetBundle gen_noisy_ssl(const NoisySslConfig& cfg, Rng& rng) {
  const auto [majority, minority] = noisy_class_counts(cfg.noisy_size, cfg.eta, cfg.reading);
  const std::size_t n = cfg.num_vertices;
  const std::size_t half = n / 2;
  if (cfg.pure_size < 2 || cfg.noisy_size < 2) throw std::invalid_argument("gen_noisy_ssl: hyperedge sizes must be >= 2");
  if (cfg.pure_size > half || majority > half) throw std::invalid_argument("gen_noisy_ssl: hyperedges larger than a class");

  std::vector<VertexId> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<VertexId>(v);
  std::shuffle(order.begin(), order.end(), rng);

  DatasetBundle b;
  b.num_classes = 2;
  b.labels.assign(n, 0);
  std::array<std::vector<VertexId>, 2> members;
  for (std::size_t i = 0; i < n; ++i) {
    const Label y = i < half ? 0 : 1;
    b.labels[order[i]] = y;
  }
  for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(b.labels[v])].push_back(static_cast<VertexId>(v));

  std::bernoulli_distribution coin(0.5);
  std::vector<Hyperedge> edges;
  edges.reserve(cfg.pure_edges + cfg.noisy_edges);
  for (std::size_t i = 0; i < cfg.pure_edges; ++i) {
    const auto& pool = members[coin(rng) ? 1 : 0];
    Hyperedge e;
    std::sample(pool.begin(), pool.end(), std::back_inserter(e), cfg.pure_size, rng);
    edges.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < cfg.noisy_edges; ++i) {
    const std::size_t major = coin(rng) ? 1 : 0;
    Hyperedge e;
    std::sample(members[major].begin(), members[major].end(), std::back_inserter(e), majority, rng);
    std::sample(members[1 - major].begin(), members[1 - major].end(), std::back_inserter(e), minority, rng);
    edges.push_back(std::move(e));
  }
  b.hypergraph = Hypergraph(n, std::move(edges));

  std::normal_distribution<double> gauss(0.0, 1.0);
  b.features = Matrix(n, cfg.feature_dim);
  for (Real& v : b.features.values()) v = static_cast<Real>(gauss(rng));

  std::ostringstream name;
  name << "noisy-eta-" << cfg.eta << (cfg.reading == EtaReading::majority_share ? "-share" : "");
  b.name = name.str();
  return b;
}

}  // namespace hgcn
