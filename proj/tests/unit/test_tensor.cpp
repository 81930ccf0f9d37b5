#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hypergcn/gcn.hpp"
#include "hypergcn/optimizer.hpp"
#include "oracles.hpp"

namespace hgcn {
namespace {

NormalizedAdjacency random_adjacency(std::size_t n, std::mt19937_64& gen) {
  const auto h = testing::random_hypergraph(n, n, 2, std::min<std::size_t>(n, 5), gen);
  return normalize(expand_clique(h));
}

TEST(Spmm, MatchesDenseProduct) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_adjacency(9, gen);
    const auto x = testing::random_matrix(9, 4, gen);
    EXPECT_LT(max_abs_diff(spmm(a, x), testing::dense_product(a.to_dense(), x)), 1e-12);
  }
}

TEST(Spmm, IdentityLeavesInputUnchanged) {
  std::mt19937_64 gen(2);
  const auto x = testing::random_matrix(5, 3, gen);
  EXPECT_EQ(spmm(NormalizedAdjacency::identity(5), x), x);
}

TEST(MatrixOps, ProductsAgainstTriples) {
  std::mt19937_64 gen(3);
  const auto a = testing::random_matrix(4, 3, gen), b = testing::random_matrix(4, 5, gen),
             c = testing::random_matrix(6, 3, gen);
  EXPECT_LT(max_abs_diff(matmul_tn(a, b), testing::dense_product(transpose(a), b)), 1e-12);
  EXPECT_LT(max_abs_diff(matmul_nt(a, c), testing::dense_product(a, transpose(c))), 1e-12);
  EXPECT_THROW(matmul(a, a), std::invalid_argument);
}

TEST(Softmax, RowsSumToOneAndSurviveLargeLogits) {
  const Matrix logits{{1000, 1001, 999}, {-5, 0, 5}};
  const auto z = softmax_rows(logits);
  for (std::size_t r = 0; r < 2; ++r) EXPECT_NEAR(z(r, 0) + z(r, 1) + z(r, 2), 1.0, 1e-15);
  EXPECT_TRUE(all_finite(z));
  EXPECT_LT(max_abs_diff(softmax_rows(Matrix{{-5, 0, 5}}), testing::scalar_softmax(Matrix{{-5, 0, 5}})), 1e-15);
}

TEST(Loss, UniformLogitsGiveLogQ) {
  const Matrix logits(3, 4, 0.0);
  const std::vector<Label> labels{0, 1, 3};
  const std::vector<VertexId> labelled{0, 2};
  EXPECT_NEAR(loss_ce(logits, labels, labelled), std::log(4.0), 1e-12);
  EXPECT_NEAR(loss_ce(logits, labels, labelled, Reduction::sum), 2 * std::log(4.0), 1e-12);
}

TEST(Loss, RejectsEmptyLabelledSetAndBadLabels) {
  const Matrix logits(2, 2, 0.0);
  const std::vector<Label> labels{0, 2};
  EXPECT_THROW(loss_ce(logits, labels, std::vector<VertexId>{}), std::invalid_argument);
  EXPECT_THROW(loss_ce(logits, labels, std::vector<VertexId>{1}), std::invalid_argument);
}

TEST(Dropout, MaskValuesAndKeepRate) {
  Rng rng(9);
  const auto m = dropout_mask(200, 100, 0.5, rng);
  std::size_t kept = 0;
  for (Real v : m.values()) {
    ASSERT_TRUE(v == 0.0 || v == 2.0);
    kept += v != 0.0;
  }
  // Binomial(20000, 0.5): 5 standard deviations is about 354.
  EXPECT_NEAR(static_cast<double>(kept), 10000.0, 354.0);
  EXPECT_THROW(dropout_mask(1, 1, 1.0, rng), std::invalid_argument);
}

TEST(Dropout, PreservesExpectation) {
  Rng rng(4);
  const Matrix x(1, 4, 3.0);
  double total = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) total += dropout(x, 0.3, rng, true)(0, 2);
  // Per-draw stdev = 3 * sqrt(0.3/0.7); 5 standard errors.
  EXPECT_NEAR(total / draws, 3.0, 5 * 3 * std::sqrt(0.3 / 0.7) / std::sqrt(draws));
  EXPECT_EQ(dropout(x, 0.3, rng, false), x);
}

TEST(Glorot, StaysWithinBound) {
  Rng rng(5);
  const auto w = glorot_init(10, 6, rng);
  EXPECT_LE(max_abs(w), std::sqrt(6.0 / 16.0));
}

struct Instance {
  NormalizedAdjacency a1, a2;
  Matrix x;
  GcnParams params;
  std::vector<Label> labels;
  std::vector<VertexId> labelled;
  DropoutMasks masks;
};

Instance random_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> small(2, 4), nodes(3, 8);
  const std::size_t n = nodes(gen), p = small(gen), h = small(gen), q = small(gen);
  Instance in{random_adjacency(n, gen), random_adjacency(n, gen), testing::random_matrix(n, p, gen),
              {testing::random_matrix(p, h, gen), testing::random_matrix(h, q, gen)}, {}, {}, {}};
  std::uniform_int_distribution<Label> label(0, static_cast<Label>(q - 1));
  for (std::size_t v = 0; v < n; ++v) in.labels.push_back(label(gen));
  for (VertexId v = 0; v < n; v += 2) in.labelled.push_back(v);
  Rng mask_rng(gen());
  in.masks = {dropout_mask(n, p, 0.3, mask_rng), dropout_mask(n, h, 0.3, mask_rng)};
  return in;
}

TEST(Forward, MatchesScalarOracle) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(gen);
    AdjacencyProvider provider = [&](int layer, const Matrix&, const Matrix&) {
      return AdjacencyPtr(std::make_shared<NormalizedAdjacency>(layer == 0 ? in.a1 : in.a2));
    };
    const auto fwd = forward_gcn(provider, in.x, in.params, &in.masks);
    const auto ref = testing::scalar_forward_logits(in.a1.to_dense(), in.a2.to_dense(), in.x,
                                                    in.params.input_weights, in.params.output_weights,
                                                    &in.masks.input, &in.masks.hidden);
    EXPECT_LT(max_abs_diff(fwd.logits, ref), 1e-10);
    EXPECT_LT(max_abs_diff(fwd.probs, testing::scalar_softmax(ref)), 1e-10);

    const auto eval = forward_gcn(in.a1, in.x, in.params);
    const auto dense = in.a1.to_dense();
    EXPECT_LT(max_abs_diff(eval.logits, testing::scalar_forward_logits(dense, dense, in.x, in.params.input_weights,
                                                                      in.params.output_weights)),
              1e-10);
  }
}

TEST(Forward, ProviderSeesPreDropoutInputs) {
  std::mt19937_64 gen(7);
  const auto in = random_instance(gen);
  std::vector<Matrix> seen;
  AdjacencyProvider provider = [&](int, const Matrix& input, const Matrix&) {
    seen.push_back(input);
    return AdjacencyPtr(std::make_shared<NormalizedAdjacency>(in.a1));
  };
  const auto fwd = forward_gcn(provider, in.x, in.params, &in.masks);
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], in.x);
  EXPECT_EQ(seen[1], fwd.cache.hidden);
}

TEST(Forward, RejectsShapeMismatch) {
  std::mt19937_64 gen(8);
  const auto in = random_instance(gen);
  GcnParams bad{testing::random_matrix(in.x.cols() + 1, 2, gen), testing::random_matrix(2, 2, gen)};
  EXPECT_THROW(forward_gcn(in.a1, in.x, bad), std::invalid_argument);
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 50; ++t) {
    auto in = random_instance(gen);
    for (Reduction red : {Reduction::mean, Reduction::sum}) {
      AdjacencyProvider provider = [&](int layer, const Matrix&, const Matrix&) {
        return AdjacencyPtr(std::make_shared<NormalizedAdjacency>(layer == 0 ? in.a1 : in.a2));
      };
      const auto fwd = forward_gcn(provider, in.x, in.params, &in.masks);
      const auto grads = backward_gcn(fwd, in.params, in.labels, in.labelled, red);
      const auto loss = [&] {
        return static_cast<double>(
            loss_ce(forward_gcn(provider, in.x, in.params, &in.masks).logits, in.labels, in.labelled, red));
      };
      EXPECT_LT(testing::relative_error(grads.input_weights,
                                        testing::finite_difference(loss, in.params.input_weights)),
                1e-6);
      EXPECT_LT(testing::relative_error(grads.output_weights,
                                        testing::finite_difference(loss, in.params.output_weights)),
                1e-6);
    }
  }
}

TEST(Backward, SoftmaxBackwardMatchesFiniteDifferences) {
  std::mt19937_64 gen(12);
  auto logits = testing::random_matrix(4, 3, gen);
  const auto weights = testing::random_matrix(4, 3, gen);
  const auto f = [&] {
    const auto z = softmax_rows(logits);
    double s = 0;
    for (std::size_t i = 0; i < z.size(); ++i) s += z.values()[i] * weights.values()[i];
    return s;
  };
  const auto analytic = softmax_backward(softmax_rows(logits), weights);
  EXPECT_LT(testing::relative_error(analytic, testing::finite_difference(f, logits)), 1e-7);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps) per entry.
  Matrix w{{1.0, -2.0}};
  const Matrix g{{0.5, -3.0}};
  OptimizerState state(AdamConfig{0.1, 0.0});
  Matrix* params[] = {&w};
  const Matrix* grads[] = {&g};
  const bool decayed[] = {false};
  adam_step(params, grads, decayed, state);
  EXPECT_NEAR(w(0, 0), 1.0 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-12);
  EXPECT_NEAR(w(0, 1), -2.0 + 0.1 * 3.0 / (3.0 + 1e-8), 1e-12);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, SecondStepFollowsMomentRecurrence) {
  Matrix w{{0.0}};
  OptimizerState state(AdamConfig{0.01, 0.0});
  Matrix* params[] = {&w};
  const bool decayed[] = {false};
  const Matrix g1{{1.0}}, g2{{-2.0}};
  const Matrix* first[] = {&g1};
  const Matrix* second[] = {&g2};
  adam_step(params, first, decayed, state);
  const double before = w(0, 0);
  adam_step(params, second, decayed, state);
  const double m = 0.9 * 0.1 * 1.0 + 0.1 * -2.0;
  const double v = 0.999 * 0.001 * 1.0 + 0.001 * 4.0;
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  EXPECT_NEAR(w(0, 0), before - 0.01 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
}

TEST(Adam, WeightDecayOnlyOnInputWeights) {
  GcnParams params{Matrix{{2.0}}, Matrix{{2.0}}};
  const GcnParams zero{Matrix{{0.0}}, Matrix{{0.0}}};
  OptimizerState state(AdamConfig{0.1, 0.5});
  adam_step(params, zero, state);
  EXPECT_NEAR(params.input_weights(0, 0), 2.0 - 0.1 * 0.5 * 2.0, 1e-12);
  EXPECT_EQ(params.output_weights(0, 0), 2.0);
}

TEST(Adam, L2DecayEntersTheMoments) {
  // g' = g + wd * theta; the first step then moves by lr * sign(g').
  Matrix w{{2.0}};
  const Matrix g{{-0.5}};
  OptimizerState state(AdamConfig{.learning_rate = 0.1, .weight_decay = 0.5, .decay_mode = WeightDecay::l2});
  Matrix* params[] = {&w};
  const Matrix* grads[] = {&g};
  const bool decayed[] = {true};
  adam_step(params, grads, decayed, state);
  EXPECT_NEAR(w(0, 0), 2.0 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-12);
}

}  // namespace
}  // namespace hgcn
