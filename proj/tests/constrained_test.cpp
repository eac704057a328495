#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "hetero/constrained.hpp"
#include "hetero/generators.hpp"
#include "test_support.hpp"

namespace hetero {
namespace {

double column_norm(const DenseMatrix& m, std::size_t c) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, c) * m(i, c);
  return std::sqrt(s);
}

TEST(PruneColumns, KeepsLargestAcrossSides) {
  NonnegFactors f{DenseMatrix{{3, 0.1}, {0, 0}}, DenseMatrix{{0}, {2}}};
  NonnegFactors p = prune_columns(f, 2);
  EXPECT_EQ(p.b, (DenseMatrix{{3}, {0}}));
  EXPECT_EQ(p.c, (DenseMatrix{{0}, {2}}));
}

TEST(PruneColumns, TiesPreferBThenLowerIndex) {
  NonnegFactors f{DenseMatrix{{1, 1}}, DenseMatrix{{1}}};
  NonnegFactors p = prune_columns(f, 1);
  EXPECT_EQ(p.b.cols(), 1u);
  EXPECT_EQ(p.c.cols(), 0u);
  NonnegFactors q = prune_columns(NonnegFactors{DenseMatrix(1, 0), DenseMatrix{{2, 1, 2}}}, 2);
  EXPECT_EQ(q.c, (DenseMatrix{{2, 2}}));
}

TEST(PruneColumns, RejectsBadK) {
  NonnegFactors f{DenseMatrix{{1}}, DenseMatrix{{1}}};
  EXPECT_THROW(prune_columns(f, 0), std::invalid_argument);
  EXPECT_THROW(prune_columns(f, 3), std::invalid_argument);
  EXPECT_EQ(prune_columns(f, 2).width(), 2u);
}

TEST(PruneColumns, MatchesSortOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t kb = 1 + trial % 5, kc = trial % 4;
    NonnegFactors f{testing::random_nonneg(7, kb, rng), testing::random_nonneg(7, kc, rng)};
    const std::size_t k = 1 + trial % (kb + kc);
    std::vector<double> norms;
    for (std::size_t c = 0; c < kb; ++c) norms.push_back(column_norm(f.b, c));
    for (std::size_t c = 0; c < kc; ++c) norms.push_back(column_norm(f.c, c));
    std::sort(norms.rbegin(), norms.rend());
    NonnegFactors p = prune_columns(f, k);
    ASSERT_EQ(p.width(), k);
    std::vector<double> kept;
    for (std::size_t c = 0; c < p.b.cols(); ++c) kept.push_back(column_norm(p.b, c));
    for (std::size_t c = 0; c < p.c.cols(); ++c) kept.push_back(column_norm(p.c, c));
    std::sort(kept.rbegin(), kept.rend());
    for (std::size_t i = 0; i < k; ++i) EXPECT_DOUBLE_EQ(kept[i], norms[i]);
  }
}

TEST(ConstrainedObjective, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 6;
    DenseMatrix a = testing::random_adjacency(n, rng);
    DenseMatrix b = testing::random_nonneg(n, 2, rng);
    DenseMatrix c = testing::random_nonneg(n, 1, rng);
    const double reg = seed % 2 == 0 ? 0.0 : 0.2;
    FactorObjective obj = constrained_objective(b, c, a, reg);
    auto f = [&](const std::vector<double>& v) {
      DenseMatrix tb(n, 2), tc(n, 1);
      testing::unflatten(v, tb, tc);
      return constrained_objective(tb, tc, a, reg).loss;
    };
    auto numeric = testing::finite_difference(f, testing::flatten(b, c));
    EXPECT_LT(testing::relative_error(testing::flatten(obj.grad_first, obj.grad_second), numeric), 1e-5);
  }
}

TEST(ConstrainedObjective, EmptyCSide) {
  std::mt19937_64 rng(2);
  DenseMatrix a = testing::random_adjacency(5, rng);
  DenseMatrix b = testing::random_nonneg(5, 2, rng);
  FactorObjective obj = constrained_objective(b, DenseMatrix(5, 0), a, 0.0);
  DenseMatrix logits = testing::naive_outer(b, b);
  double expected = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) expected += testing::naive_bce(a.values()[i], logits.values()[i]);
  EXPECT_NEAR(obj.loss, expected, 1e-10);
  EXPECT_EQ(obj.grad_second.cols(), 0u);
}

TEST(FitConstrained, MonotoneAndFeasible) {
  RecruiterParams p;
  p.n = 120;
  p.n_locations = 3;
  DenseMatrix a = adjacency_dense(generate_recruiter_graph(p).graph);
  std::mt19937_64 rng(9);
  NonnegFactors f0{testing::random_nonneg(120, 4, rng), testing::random_nonneg(120, 2, rng)};
  ConstrainedFit fit = fit_constrained(a, f0, FitConfig{});
  const auto& h = fit.trace.loss_history;
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
  for (double v : fit.factors.b.values()) EXPECT_GE(v, 0.0);
  for (double v : fit.factors.c.values()) EXPECT_GE(v, 0.0);
  EXPECT_LT(h.back(), h.front());
}

TEST(FitConstrained, ZeroInitIsStationary) {
  DenseMatrix a{{0, 1}, {1, 0}};
  NonnegFactors f0{DenseMatrix(2, 1), DenseMatrix(2, 1)};
  FitConfig cfg;
  cfg.reg_weight = RegWeight::fixed(0.0);
  ConstrainedFit fit = fit_constrained(a, f0, cfg);
  EXPECT_EQ(max_abs(fit.factors.b), 0.0);
  EXPECT_EQ(max_abs(fit.factors.c), 0.0);
}

TEST(ToVw, WorkedExample) {
  CommunityModel m = to_vw(NonnegFactors{DenseMatrix{{2}, {1}}, DenseMatrix{{3}, {0}}});
  EXPECT_LT(max_abs_diff(m.v, DenseMatrix{{1, 1}, {0.5, 0}}), 1e-15);
  ASSERT_EQ(m.w.size(), 2u);
  EXPECT_DOUBLE_EQ(m.w[0], 4.0);
  EXPECT_DOUBLE_EQ(m.w[1], -9.0);
}

TEST(ToVw, PreservesLogitsAndDropsZeroColumns) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix b = testing::random_nonneg(9, 3, rng);
    DenseMatrix c = testing::random_nonneg(9, 2, rng);
    for (std::size_t i = 0; i < 9; ++i) b(i, 1) = 0.0;
    NonnegFactors f{b, c};
    CommunityModel m = to_vw(f);
    EXPECT_EQ(m.k(), 4u);
    for (double v : m.v.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LT(max_abs_diff(m.logits(), f.logits()), 1e-10);
  }
}

TEST(PredictProb, Examples) {
  CommunityModel empty{DenseMatrix(3, 0), {}};
  EXPECT_DOUBLE_EQ(predict_prob(empty, 0, 2), 0.5);
  CommunityModel m{DenseMatrix{{1}, {1}}, {2.0}};
  EXPECT_NEAR(predict_prob(m, 0, 1), 0.8807970779778823, 1e-15);
  EXPECT_THROW(m.logit(0, 2), std::out_of_range);
}

TEST(LogitContributions, SumToLogit) {
  std::mt19937_64 rng(3);
  CommunityModel m = to_vw(NonnegFactors{testing::random_nonneg(6, 3, rng), testing::random_nonneg(6, 2, rng)});
  for (NodeId i = 0; i < 6; ++i) {
    for (NodeId j = 0; j < 6; ++j) {
      auto parts = logit_contributions(m, i, j);
      EXPECT_EQ(parts.size(), m.k());
      EXPECT_NEAR(std::accumulate(parts.begin(), parts.end(), 0.0), m.logit(i, j), 1e-12);
    }
  }
}

TEST(ThresholdWitness, ReproducesGraphSigns) {
  DenseMatrix b{{1, 0}, {1, 1}, {0, 1}, {0, 0}};
  DenseMatrix c{{0}, {1}, {1}, {1}};
  for (int t : {-1, 0, 1, 2}) {
    Graph g = generate_threshold_graph(b, c, t);
    CommunityModel m = build_threshold_witness(b, c, t);
    for (NodeId i = 0; i < 4; ++i) {
      for (NodeId j = i + 1; j < 4; ++j) {
        EXPECT_EQ(m.logit(i, j) > 0.0, g.has_edge(i, j)) << t << " " << i << " " << j;
        EXPECT_GE(std::abs(m.logit(i, j)), 0.5);
      }
    }
  }
}

TEST(ThresholdWitness, RandomThresholdGraphs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix b = testing::random_binary(10, 3, rng);
    DenseMatrix c = testing::random_binary(10, 2, rng);
    const int t = trial % 3 - 1;
    Graph g = generate_threshold_graph(b, c, t);
    CommunityModel m = build_threshold_witness(b, c, t);
    for (NodeId i = 0; i < 10; ++i)
      for (NodeId j = i + 1; j < 10; ++j) EXPECT_EQ(m.logit(i, j) > 0.0, g.has_edge(i, j));
  }
}

TEST(ScaleWeights, SharpensWithoutFlippingSigns) {
  DenseMatrix b{{1, 0}, {1, 1}, {0, 1}};
  DenseMatrix c{{1}, {0}, {1}};
  Graph g = generate_threshold_graph(b, c, 0);
  CommunityModel m = scale_weights(build_threshold_witness(b, c, 0), 20.0);
  for (NodeId i = 0; i < 3; ++i) {
    for (NodeId j = i + 1; j < 3; ++j) {
      EXPECT_NEAR(predict_prob(m, i, j), g.has_edge(i, j) ? 1.0 : 0.0, 1e-4);
    }
  }
  EXPECT_THROW(scale_weights(m, 0.0), std::invalid_argument);
  EXPECT_THROW(scale_weights(m, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace hetero
