#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>

#include "hypergcn/dataio.hpp"
#include "oracles.hpp"

namespace hgcn {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("hgcn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path_ / name) << text; }

 private:
  fs::path path_;
};

void write_toy(const TempDir& dir) {
  dir.write("hyperedges.txt", "0 1\n1 2\n");
  dir.write("features.csv", "1,0\n0,1\n0.5,0.5\n");
  dir.write("labels.txt", "0\n1\n1\n");
}

TEST(ReadHyperedges, ParsesAndCanonicalises) {
  std::istringstream in("2 0 1\n\n3 1\n");
  const auto h = read_hyperedges(in, std::nullopt);
  EXPECT_EQ(h.num_vertices(), 4u);
  ASSERT_EQ(h.num_edges(), 2u);
  EXPECT_EQ(h.edge(0), (Hyperedge{0, 1, 2}));
}

TEST(ReadHyperedges, DropsSingletonsWithWarning) {
  std::istringstream in("0 1\n2\n1 1\n");
  std::vector<std::string> warnings;
  const auto h = read_hyperedges(in, 3, &warnings);
  EXPECT_EQ(h.num_edges(), 1u);
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_NE(warnings[0].find(":2:"), std::string::npos);
}

TEST(ReadHyperedges, ReportsLineOfBadToken) {
  std::istringstream in("0 1\n1 x\n");
  try {
    (void)read_hyperedges(in, std::nullopt);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("hyperedges.txt:2"), std::string::npos) << e.what();
  }
}

TEST(ReadFeatures, RejectsRaggedRows) {
  std::istringstream ok("1,2\n3,4\n");
  EXPECT_EQ(read_features(ok), (Matrix{{1, 2}, {3, 4}}));
  std::istringstream bad("1,2\n3\n");
  EXPECT_THROW(read_features(bad), DataError);
}

TEST(ReadLabels, OutOfRangeCarriesLineNumber) {
  std::istringstream in("0\n1\n2\n");
  try {
    (void)read_labels(in, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("labels.txt:3"), std::string::npos) << e.what();
  }
}

TEST(LoadBundle, ToyDirectory) {
  TempDir dir;
  write_toy(dir);
  const auto b = load_bundle(dir.path());
  EXPECT_EQ(b.hypergraph.num_vertices(), 3u);
  EXPECT_EQ(b.features.cols(), 2u);
  EXPECT_EQ(b.num_classes, 2u);
}

TEST(LoadBundle, SingletonHyperedgeDroppedWithWarning) {
  TempDir dir;
  write_toy(dir);
  dir.write("hyperedges.txt", "0 1\n2\n1 2\n");
  std::vector<std::string> warnings;
  const auto b = load_bundle(dir.path(), &warnings);
  EXPECT_EQ(b.hypergraph.num_edges(), 2u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(LoadBundle, LabelEqualToClassCountIsAnError) {
  TempDir dir;
  write_toy(dir);
  dir.write("manifest.json", R"({"name": "toy", "n": 3, "p": 2, "q": 2})");
  dir.write("labels.txt", "0\n1\n2\n");
  try {
    (void)load_bundle(dir.path());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(LoadBundle, InconsistentSizesAreErrors) {
  TempDir dir;
  write_toy(dir);
  dir.write("features.csv", "1,0\n0,1\n");
  EXPECT_THROW(load_bundle(dir.path()), DataError);
  write_toy(dir);
  dir.write("hyperedges.txt", "0 7\n");
  EXPECT_THROW(load_bundle(dir.path()), DataError);
  write_toy(dir);
  dir.write("manifest.json", R"({"n": 4})");
  EXPECT_THROW(load_bundle(dir.path()), DataError);
}

TEST(SaveBundle, RoundTrips) {
  Rng rng(1);
  NoisySslConfig cfg;
  cfg.num_vertices = 60;
  cfg.pure_edges = 5;
  cfg.noisy_edges = 6;
  cfg.noisy_size = 8;
  cfg.feature_dim = 4;
  for (const bool weighted : {false, true}) {
    auto bundle = gen_noisy_ssl(cfg, rng);
    if (weighted) {
      std::vector<double> w(bundle.hypergraph.num_edges(), 0.25);
      bundle.hypergraph = Hypergraph(60, {bundle.hypergraph.edges().begin(), bundle.hypergraph.edges().end()}, w);
    }
    TempDir dir;
    save_bundle(bundle, dir.path());
    EXPECT_EQ(fs::exists(dir.path() / kWeightsFile), weighted);
    EXPECT_EQ(load_bundle(dir.path()), bundle);
    EXPECT_EQ(load_hypergraph(dir.path()), bundle.hypergraph);
  }
}

TEST(BalancedSplit, ExactPerClassCounts) {
  std::vector<Label> labels;
  for (int c = 0; c < 7; ++c) labels.insert(labels.end(), 30, c);
  Rng rng(2);
  const auto split = balanced_split(labels, 7, 140, rng);
  EXPECT_EQ(split.labelled.size(), 140u);
  EXPECT_EQ(split.evaluation.size(), labels.size() - 140);
  std::map<Label, int> per_class;
  for (VertexId v : split.labelled) ++per_class[labels[v]];
  for (const auto& [c, count] : per_class) EXPECT_EQ(count, 20) << c;
  std::vector<VertexId> merged;
  std::merge(split.labelled.begin(), split.labelled.end(), split.evaluation.begin(), split.evaluation.end(),
             std::back_inserter(merged));
  for (VertexId v = 0; v < merged.size(); ++v) EXPECT_EQ(merged[v], v);
}

TEST(BalancedSplit, Errors) {
  const std::vector<Label> labels{0, 0, 1, 1};
  Rng rng(3);
  EXPECT_EQ(balanced_split(labels, 2, 4, rng).labelled.size(), 4u);
  EXPECT_THROW(balanced_split(labels, 2, 5, rng), std::invalid_argument);
  EXPECT_THROW(balanced_split(labels, 2, 6, rng), std::invalid_argument);
}

TEST(NoisyCounts, RatioInterpretation) {
  EXPECT_EQ(noisy_class_counts(20, 1.0), (std::pair<std::size_t, std::size_t>{10, 10}));
  EXPECT_EQ(noisy_class_counts(20, 0.75), (std::pair<std::size_t, std::size_t>{11, 9}));
  EXPECT_EQ(noisy_class_counts(20, 0.5), (std::pair<std::size_t, std::size_t>{13, 7}));
  EXPECT_THROW(noisy_class_counts(20, 0.0), std::invalid_argument);
  EXPECT_THROW(noisy_class_counts(20, 1.2), std::invalid_argument);
}

TEST(NoisyCounts, MajorityShareReading) {
  using Counts = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(noisy_class_counts(20, 0.75, EtaReading::majority_share), (Counts{15, 5}));
  EXPECT_EQ(noisy_class_counts(20, 0.5, EtaReading::majority_share), (Counts{10, 10}));
  EXPECT_THROW(noisy_class_counts(20, 0.4, EtaReading::majority_share), std::invalid_argument);
}

TEST(GenNoisySsl, StructureOfGeneratedHypergraph) {
  Rng rng(4);
  NoisySslConfig cfg;
  cfg.eta = 0.75;
  const auto b = gen_noisy_ssl(cfg, rng);
  EXPECT_EQ(b.hypergraph.num_vertices(), 1000u);
  EXPECT_EQ(b.hypergraph.num_edges(), 500u);
  EXPECT_EQ(b.features.rows(), 1000u);
  EXPECT_EQ(b.features.cols(), 256u);
  EXPECT_EQ(std::count(b.labels.begin(), b.labels.end(), 0), 500);
  std::size_t pure = 0, noisy = 0;
  for (const auto& e : b.hypergraph.edges()) {
    std::size_t ones = 0;
    for (VertexId v : e) ones += b.labels[v] == 1;
    if (e.size() == 5) {
      EXPECT_TRUE(ones == 0 || ones == 5);
      ++pure;
    } else {
      ASSERT_EQ(e.size(), 20u);
      EXPECT_TRUE(ones == 9 || ones == 11) << ones;
      ++noisy;
    }
  }
  EXPECT_EQ(pure, 100u);
  EXPECT_EQ(noisy, 400u);
}

TEST(WriteWeightedGraph, ListsPairsThenLoops) {
  WeightedGraphBuilder b(2);
  b.add_pair(0, 1, 0.5);
  b.set_all_loops(1.0);
  std::ostringstream out;
  write_weighted_graph(out, std::move(b).build());
  EXPECT_EQ(out.str(), "0 1 0.5\n0 0 1\n1 1 1\n");
}

}  // namespace
}  // namespace hgcn
