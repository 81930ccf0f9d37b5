#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hypergcn/expand.hpp"
#include "hypergcn/gcn.hpp"
#include "hypergcn/hypergraph.hpp"
#include "hypergcn/matrix.hpp"
#include "hypergcn/random.hpp"

namespace hgcn {

/// Malformed or inconsistent input data. The message carries the file name and,
/// where applicable, the 1-based line number.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetBundle {
  std::string name;
  Hypergraph hypergraph;
  Matrix features;
  std::vector<Label> labels;
  std::size_t num_classes = 0;

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

/// Labels of every vertex, the labelled set, and the disjoint evaluation set.
/// Both vertex lists are sorted.
struct LabeledSplit {
  std::vector<Label> labels;
  std::vector<VertexId> labelled;
  std::vector<VertexId> evaluation;
};

// Bundle directory layout.
inline constexpr const char* kHyperedgesFile = "hyperedges.txt";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kLabelsFile = "labels.txt";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kWeightsFile = "hyperedge_weights.txt";

/// Parses one hyperedge per line (space-separated 0-based ids). Blank lines are
/// skipped. Hyperedges with fewer than two distinct vertices are dropped and
/// reported through `warnings`. When `n` is absent it is max id + 1.
Hypergraph read_hyperedges(std::istream& in, std::optional<std::size_t> n, std::vector<std::string>* warnings = nullptr,
                           const std::string& source = kHyperedgesFile);
void write_hyperedges(std::ostream& out, const Hypergraph& h);

/// n lines of p comma-separated reals, no header.
Matrix read_features(std::istream& in, const std::string& source = kFeaturesFile);
void write_features(std::ostream& out, const Matrix& features);

/// One integer class id per line. Ids must lie in [0, num_classes) when
/// num_classes is given.
std::vector<Label> read_labels(std::istream& in, std::optional<std::size_t> num_classes,
                               const std::string& source = kLabelsFile);
void write_labels(std::ostream& out, std::span<const Label> labels);

/// Reads hyperedges.txt, features.csv, labels.txt and, when present,
/// manifest.json and hyperedge_weights.txt from `dir`.
DatasetBundle load_bundle(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);

/// Loads a bare hypergraph from a hyperedge-list file or from a directory
/// holding hyperedges.txt (with an optional manifest giving n).
Hypergraph load_hypergraph(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Debug edge list: "u v weight" per pair, then "v v loop" per self-loop.
void write_weighted_graph(std::ostream& out, const WeightedGraph& g);

/// Samples budget / q labelled vertices uniformly from every class. Throws
/// std::invalid_argument if the budget is not divisible by q or a class has
/// too few members.
LabeledSplit balanced_split(std::span<const Label> labels, std::size_t num_classes, std::size_t budget, Rng& rng);
LabeledSplit balanced_split(const DatasetBundle& bundle, std::size_t budget, Rng& rng);

/// How eta fixes the class counts inside a noisy hyperedge.
enum class EtaReading {
  ratio,           // eta = minority / majority, eta in (0, 1]
  majority_share,  // eta = majority / size, eta in [0.5, 1]
};

/// Two-class synthetic hypergraph with pure and noisy hyperedges.
struct NoisySslConfig {
  std::size_t num_vertices = 1000;
  std::size_t pure_edges = 100;
  std::size_t noisy_edges = 400;
  std::size_t pure_size = 5;
  std::size_t noisy_size = 20;
  double eta = 0.5;
  EtaReading reading = EtaReading::ratio;
  std::size_t feature_dim = 256;
};

/// Class counts (majority, minority) inside a noisy hyperedge of `size`
/// vertices. Under the ratio reading minority = round(size * eta / (1 + eta));
/// under the majority-share reading majority = round(size * eta).
std::pair<std::size_t, std::size_t> noisy_class_counts(std::size_t size, double eta,
                                                       EtaReading reading = EtaReading::ratio);

/// Vertices are split evenly between two classes at random. Pure hyperedges
/// draw all vertices from one random class; noisy hyperedges take the
/// noisy_class_counts split with a random majority class. Vertices are drawn
/// without replacement within a hyperedge. Features are i.i.d. standard normal.
DatasetBundle gen_noisy_ssl(const NoisySslConfig& cfg, Rng& rng);

}  // namespace hgcn
