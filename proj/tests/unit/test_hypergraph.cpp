#include <gtest/gtest.h>

#include <random>

#include "hypergcn/hypergraph.hpp"
#include "oracles.hpp"

namespace hgcn {
namespace {

TEST(Hypergraph, CanonicalisesHyperedges) {
  Hypergraph h(4, {{3, 1, 1, 0}});
  EXPECT_EQ(h.edge(0), (Hyperedge{0, 1, 3}));
  EXPECT_EQ(h.weight(0), 1.0);
  EXPECT_EQ(h.max_edge_size(), 3u);
}

TEST(Hypergraph, RejectsMismatchedWeightCount) {
  EXPECT_THROW(Hypergraph(3, {{0, 1}}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Validate, AcceptsWellFormedHypergraph) {
  EXPECT_TRUE(validate(Hypergraph(3, {{0, 1, 2}})).ok());
}

TEST(Validate, ReportsOutOfRangeVertex) {
  const auto report = validate(Hypergraph(3, {{0, 3}}));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].edge, 0u);
  EXPECT_NE(report.violations[0].message.find("vertex 3 out of range"), std::string::npos);
}

TEST(Validate, ReportsUndersizedHyperedge) {
  const auto report = validate(Hypergraph(2, {{1}}));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_NE(report.violations[0].message.find("size 1 < 2"), std::string::npos);
}

TEST(Validate, ListsEveryViolationWithItsIndex) {
  const auto report = validate(Hypergraph(3, {{0, 1}, {2}, {0, 5}, {1, 2}}, {1.0, 1.0, 1.0, -2.0}));
  ASSERT_EQ(report.violations.size(), 3u);
  EXPECT_EQ(report.violations[0].edge, 1u);
  EXPECT_EQ(report.violations[1].edge, 2u);
  EXPECT_EQ(report.violations[2].edge, 3u);
  EXPECT_THROW(require_valid(Hypergraph(3, {{2}})), InvalidHypergraph);
}

TEST(Degrees, UnitWeights) {
  EXPECT_EQ(degrees(Hypergraph(3, {{0, 1}, {0, 2}})), (std::vector<double>{2, 1, 1}));
}

TEST(Degrees, WeightedHyperedge) {
  EXPECT_EQ(degrees(Hypergraph(3, {{0, 1, 2}}, {0.5})), (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(Degrees, EmptyHypergraph) { EXPECT_EQ(degrees(Hypergraph(4)), (std::vector<double>(4, 0.0))); }

TEST(Degrees, SumMatchesWeightedSizesAndScalesLinearly) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto base = testing::random_hypergraph(12, 9, 2, 6, rng);
    std::uniform_real_distribution<double> w(0.1, 3.0);
    std::vector<double> weights;
    for (std::size_t e = 0; e < base.num_edges(); ++e) weights.push_back(w(rng));
    const Hypergraph h(12, {base.edges().begin(), base.edges().end()}, weights);
    const auto d = degrees(h);
    double total = 0, expected = 0;
    for (double x : d) total += x;
    for (std::size_t e = 0; e < h.num_edges(); ++e) expected += static_cast<double>(h.edge(e).size()) * weights[e];
    EXPECT_NEAR(total, expected, 1e-12);

    std::vector<double> scaled = weights;
    for (double& x : scaled) x *= 2.5;
    const auto ds = degrees(Hypergraph(12, {base.edges().begin(), base.edges().end()}, scaled));
    for (std::size_t v = 0; v < d.size(); ++v) EXPECT_NEAR(ds[v], 2.5 * d[v], 1e-12);
  }
}

TEST(SizeCounts, SingleHyperedges) {
  EXPECT_EQ(size_counts(Hypergraph(5, {{0, 1, 2, 3, 4}})), (SizeCounts{5, 7, 10}));
  EXPECT_EQ(size_counts(Hypergraph(3, {{0, 1, 2}})), (SizeCounts{3, 3, 3}));
  EXPECT_EQ(size_counts(Hypergraph(4, {{0, 1}, {0, 1, 2, 3}})), (SizeCounts{6, 6, 7}));
}

TEST(SizeCounts, MediatorNeverExceedsCliqueEqualOnlyForSmallEdges) {
  for (std::size_t s = 2; s <= 40; ++s) {
    Hyperedge e(s);
    for (std::size_t i = 0; i < s; ++i) e[i] = static_cast<VertexId>(i);
    const auto c = size_counts(Hypergraph(s, {e}));
    EXPECT_LE(c.mediator, c.clique);
    EXPECT_EQ(c.mediator == c.clique, s <= 3) << "size " << s;
  }
}

}  // namespace
}  // namespace hgcn
