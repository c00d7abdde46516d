#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graspwise/error.hpp"
#include "graspwise/losses.hpp"
#include "oracles/loss_reference.hpp"

using namespace graspwise;

namespace {

void expect_rel(double got, long double want, double tol = 1e-10) {
  const long double scale = std::max(std::fabs(want), 1e-300L);
  EXPECT_LE(std::fabs(got - want) / scale, tol) << got << " vs " << static_cast<double>(want);
}

}  // namespace

TEST(SmoothL1, Branches) {
  const std::vector<double> x{0.5, -2.0, 1.0, 0.0};
  const std::vector<double> t{0.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(smooth_l1(x, t), 0.125 + 1.5 + 0.5 + 0.0);
  std::vector<double> g(4);
  smooth_l1_grad(x, t, g);
  EXPECT_EQ(g, (std::vector<double>{0.5, -1.0, 1.0, 0.0}));
  try {
    smooth_l1(x, std::vector<double>{0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(CrossEntropy, ValuesAndDomain) {
  const std::vector<double> p{0.25, 0.75};
  EXPECT_DOUBLE_EQ(cross_entropy(p, 1), -std::log(0.75));
  EXPECT_EQ(cross_entropy(std::vector<double>{0.0, 1.0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(cross_entropy(std::vector<double>{0.0, 1.0}, 0), -std::log(kProbabilityFloor));
  for (auto bad : {std::vector<double>{0.5, 0.6}, std::vector<double>{-0.1, 1.1},
                   std::vector<double>{NAN, 1.0}}) {
    try {
      cross_entropy(bad, 0);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDomain);
    }
  }
  EXPECT_THROW(cross_entropy(p, 2), Error);
  EXPECT_THROW(cross_entropy(p, -1), Error);
}

TEST(Losses, MatchLongDoubleReference) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = oracle::random_batch(rng, 1 + trial);
    const double l1 = 0.5 + trial * 0.1;
    const double l2 = 2.0 - trial * 0.05;
    for (bool mean : {false, true}) {
      const auto red = mean ? Reduction::kMean : Reduction::kSum;
      expect_rel(loss_p(b.p, l1, red), oracle::loss_p(b.p, l1, mean));
      expect_rel(loss_g(b.g, l2, red), oracle::loss_g(b.g, l2, mean));
      expect_rel(loss_s(b.s, red), oracle::loss_s(b.s, mean));
      expect_rel(loss_total(b.p, b.g, b.s, {l1, l2, red}),
                 oracle::loss_p(b.p, l1, mean) + oracle::loss_g(b.g, l2, mean) +
                     oracle::loss_s(b.s, mean));
    }
  }
}

TEST(Losses, ZeroAtPerfectPredictions) {
  std::mt19937_64 rng(1);
  auto b = oracle::random_batch(rng, 16);
  for (auto& x : b.p) {
    x.p = {0.0, 0.0};
    x.p[x.p_star] = 1.0;
    x.t = x.t_star;
  }
  for (auto& x : b.g) {
    x.rho.fill(0.0);
    x.rho[x.rho_star] = 1.0;
    x.beta = x.beta_star;
  }
  for (auto& x : b.s) {
    x.s = {0.0, 0.0};
    x.s[x.s_star] = 1.0;
  }
  EXPECT_EQ(loss_p(b.p), 0.0);
  EXPECT_EQ(loss_g(b.g), 0.0);
  EXPECT_EQ(loss_s(b.s), 0.0);
  EXPECT_EQ(loss_total(b.p, b.g, b.s), 0.0);
}

TEST(Losses, BoxTermsOnlyForGraspLabels) {
  ProposalPrediction p;
  p.p = {1.0, 0.0};
  p.p_star = 0;
  p.t = {5, 5, 5, 5};
  EXPECT_EQ(loss_p(std::vector{p}), 0.0);
  OrientationPrediction g;
  g.rho.fill(0.0);
  g.rho[0] = 1.0;
  g.beta = {9, 9, 9, 9};
  EXPECT_EQ(loss_g(std::vector{g}), 0.0);
  ProposalPrediction bad = p;
  bad.p_star = 2;
  EXPECT_THROW(loss_p(std::vector{bad}), Error);
}

TEST(Softmax, StableForLargeLogits) {
  std::vector<double> probs(3);
  softmax(std::vector<double>{1000.0, 1000.0, 0.0}, probs);
  EXPECT_DOUBLE_EQ(probs[0], 0.5);
  EXPECT_DOUBLE_EQ(probs[1], 0.5);
  EXPECT_THROW(softmax(std::vector<double>{}, std::span<double>{}), Error);
}

TEST(GradCheck, TotalLossGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = oracle::random_batch(rng, 2);
    const TotalLossFunction f(b.p, b.g, b.s, {1.3, 0.7, trial % 2 ? Reduction::kMean
                                                                   : Reduction::kSum});
    std::vector<double> x(f.dimension());
    std::normal_distribution<double> n(0.0, 1.5);
    for (double& v : x) v = n(rng);
    const auto r = grad_check(
        [&](std::span<const double> p, std::span<double> g) { return f.evaluate(p, g); }, x,
        1e-5, [&](std::span<const double> p) { return f.kink_distance(p); });
    EXPECT_LT(r.max_relative_error, 1e-4) << trial;
    EXPECT_GE(f.kink_distance(r.point), 1e-3);
  }
}

TEST(GradCheck, NudgesPointsOffKinks) {
  ProposalPrediction p;
  p.p_star = 1;
  p.t_star = {0, 0, 0, 0};
  const TotalLossFunction f({p}, {}, {});
  // Box residual of exactly 1 sits on the smooth-L1 kink.
  std::vector<double> x{0.0, 0.0, 1.0, 0.2, 0.3, 0.4};
  EXPECT_LT(f.kink_distance(x), 1e-12);
  const auto r = grad_check(
      [&](std::span<const double> q, std::span<double> g) { return f.evaluate(q, g); }, x,
      1e-5, [&](std::span<const double> q) { return f.kink_distance(q); });
  EXPECT_TRUE(r.perturbed);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(TotalLossFunction, ShapeChecks) {
  const TotalLossFunction f({ProposalPrediction{}}, {}, {});
  EXPECT_EQ(f.dimension(), 6u);
  try {
    f.evaluate(std::vector<double>(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}
