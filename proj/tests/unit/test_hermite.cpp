#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hfield/hermite.hpp"

using namespace hfield;

namespace {

GridSpec unit_grid(std::size_t d, std::size_t cells) {
  return GridSpec::from_origin_zero(MultiIndex::filled(d, 1.0), std::vector<std::size_t>(d, cells));
}

MeanSe second_moment(const std::vector<std::vector<double>>& rows, std::size_t k) {
  auto c = column(rows, k);
  for (auto& x : c) x *= x;
  return mean_se(c);
}

}  // namespace

TEST(BetaFunction, TrivialValues) {
  EXPECT_NEAR(beta_function(1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(beta_function(0.5, 0.5), std::numbers::pi, 1e-14);
  EXPECT_THROW(beta_function(0.0, 1.0), DomainError);
}

TEST(BetaFunction, HighPrecisionGoldens) {
  // 20-digit reference values from an mpmath evaluation.
  EXPECT_NEAR(beta_function(0.25, 0.5), 5.2441151085842396209, 1e-13);
  EXPECT_NEAR(beta_function(0.375, 0.25), 5.9910519324776641768, 1e-13);
  EXPECT_NEAR(beta_function(2.5, 3.7) / 0.032727368606257841379, 1.0, 1e-13);
  EXPECT_NEAR(beta_function(0.01, 0.02) / 149.95171626299173192, 1.0, 1e-13);
  EXPECT_NEAR(beta_function(150.0, 200.0) / 4.2535801867970907524e-105, 1.0, 1e-12);
}

TEST(NormalizingConstant, GoldensAndProductOverAxes) {
  EXPECT_NEAR(normalizing_constant_squared(HurstIndex({0.75}, 1)), 0.071508727828294986381, 1e-15);
  EXPECT_NEAR(normalizing_constant_squared(HurstIndex({0.75}, 2)), 0.010447805987422618225, 1e-15);
  EXPECT_NEAR(normalizing_constant_squared(HurstIndex({0.6}, 2)), 0.0045918115104809158366, 1e-15);
  const double c1 = normalizing_constant(HurstIndex({0.6}, 2)), c2 = normalizing_constant(HurstIndex({0.8}, 2));
  EXPECT_NEAR(normalizing_constant(HurstIndex({0.6, 0.8}, 2)), c1 * c2, 1e-15);
}

TEST(Covariance, ClosedFormValues) {
  const HurstIndex h({0.75}, 2);
  EXPECT_DOUBLE_EQ(covariance(h, MultiIndex{1.0}, MultiIndex{1.0}), 1.0);
  EXPECT_NEAR(covariance(h, MultiIndex{1.0}, MultiIndex{2.0}), std::sqrt(2.0), 1e-15);
  const HurstIndex h2({0.6, 0.8}, 1);
  const MultiIndex t{0.3, 0.7};
  EXPECT_NEAR(covariance(h2, t, t), std::pow(0.3, 1.2) * std::pow(0.7, 1.6), 1e-15);
  EXPECT_EQ(covariance(h2, MultiIndex{0.0, 0.5}, t), 0.0);
  EXPECT_THROW(covariance(h2, MultiIndex{-0.1, 0.5}, t), DomainError);
}

TEST(Covariance, IncrementCovarianceFromCorners) {
  const HurstIndex h({0.75}, 1);
  EXPECT_NEAR(increment_covariance(h, MultiIndex{0.0}, MultiIndex{1.0}, MultiIndex{1.0}, MultiIndex{2.0}),
              std::sqrt(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(increment_covariance(h, MultiIndex{0.25}, MultiIndex{0.75}, MultiIndex{0.25}, MultiIndex{0.75}),
              std::pow(0.5, 1.5), 1e-15);
}

TEST(VariationGenerator, StandardizationIsExactVarianceOfTheSum) {
  for (int q : {1, 2, 3}) {
    const HurstIndex h({0.8}, q);
    const HermiteVariationGenerator gen(unit_grid(1, 8), h, 64);
    double s = 0.0;
    for (long j = 0; j < 64; ++j)
      for (long k = 0; k < 64; ++k) s += std::pow(fgn_covariance(h.transformed(0), j - k), q);
    EXPECT_NEAR(gen.standardization() * gen.standardization(), factorial(q) * s, 1e-9 * factorial(q) * s);
  }
}

TEST(VariationGenerator, GaussianCaseMatchesCovariance) {
  const HurstIndex h({0.75}, 1);
  const HermiteVariationGenerator gen(unit_grid(1, 4), h, 256);
  const std::vector<MultiIndex> pts{MultiIndex{0.25}, MultiIndex{0.5}, MultiIndex{1.0}};
  const auto rows = sample_point_values(make_sampler(gen, 21), pts, 2000);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i; j < pts.size(); ++j) {
      const auto c = covariance_se(column(rows, i), column(rows, j));
      EXPECT_LT(std::abs(c.mean - covariance(h, pts[i], pts[j])), 3.0 * c.se) << i << "," << j;
    }
}

TEST(VariationGenerator, RosenblattVarianceAtHalf) {
  const HurstIndex h({0.75}, 2);
  const HermiteVariationGenerator gen(unit_grid(1, 4), h, 256);
  const auto rows = sample_point_values(make_sampler(gen, 22), {MultiIndex{0.5}}, 2000);
  const auto m = second_moment(rows, 0);
  EXPECT_LT(std::abs(m.mean - std::pow(0.5, 1.5)), 3.0 * m.se);
}

TEST(VariationGenerator, ZeroOnAxesAndDeterministic) {
  const HermiteVariationGenerator gen(unit_grid(2, 4), HurstIndex({0.7, 0.9}, 2), 16);
  const auto a = gen.generate(5, 3), b = gen.generate(5, 3);
  EXPECT_EQ(a, b);
  for (std::size_t k = 0; k <= 4; ++k) {
    const std::vector<std::size_t> i{0, k}, j{k, 0};
    EXPECT_EQ(a.at(std::span<const std::size_t>(i)), 0.0);
    EXPECT_EQ(a.at(std::span<const std::size_t>(j)), 0.0);
  }
  EXPECT_EQ(a.tag(), GeneratorTag::hermite_variation);
}

TEST(VariationGenerator, RejectsOffLatticeGrids) {
  const HurstIndex h({0.75}, 1);
  EXPECT_THROW(HermiteVariationGenerator(unit_grid(1, 3), h, 16), SnapError);
  EXPECT_THROW(HermiteVariationGenerator(GridSpec::from_origin_zero(MultiIndex{0.3}, {1}), h, 16), SnapError);
  EXPECT_THROW(HermiteVariationGenerator(unit_grid(1, 4), h, 4), ParameterError);
  EXPECT_THROW(HermiteVariationGenerator(GridSpec(MultiIndex{0.5}, MultiIndex{1.0}, {4}), h, 16), ParameterError);
}

TEST(KernelGenerator, GaussianCaseNearCovariance) {
  const HurstIndex h({0.75}, 1);
  KernelConfig cfg;
  const KernelGenerator gen(unit_grid(1, 4), h, cfg);
  EXPECT_TRUE(gen.warnings().empty());
  const std::vector<MultiIndex> pts{MultiIndex{0.5}, MultiIndex{1.0}};
  const auto rows = sample_point_values(make_sampler(gen, 31), pts, 2000);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = covariance_se(column(rows, i), column(rows, 1));
    const double th = covariance(h, pts[i], pts[1]);
    EXPECT_LT(std::abs(c.mean - th), 0.1 * th + 3.0 * c.se);
  }
}

TEST(KernelGenerator, SecondOrderFactorIsSymmetric) {
  const KernelGenerator gen(unit_grid(1, 4), HurstIndex({0.75}, 2), KernelConfig{.y_cells = 32});
  const auto m = gen.kernel_factor(0, 3);
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15 * m.cwiseAbs().maxCoeff());
}

TEST(KernelGenerator, RosenblattVarianceOnSmallMesh) {
  KernelConfig cfg;
  cfg.y_cells = 64;
  const KernelGenerator gen(unit_grid(1, 8), HurstIndex({0.75}, 2), cfg);
  const double v = gen.discrete_variance({8});
  EXPECT_NEAR(v, 1.0, 0.15);
  EXPECT_NEAR(gen.variance_bias(), v - 1.0, 1e-12);
  const auto rows = sample_point_values(make_sampler(gen, 32), {MultiIndex{1.0}}, 4000);
  const auto m = second_moment(rows, 0);
  EXPECT_LT(std::abs(m.mean - v), 3.0 * m.se);
}

TEST(KernelGenerator, WarnsWhenBiasExceedsBound) {
  KernelConfig cfg;
  cfg.y_cells = 16;
  cfg.tail_cells = 0;
  const KernelGenerator gen(unit_grid(1, 4), HurstIndex({0.75}, 2), cfg);
  ASSERT_FALSE(gen.warnings().empty());
  EXPECT_NE(gen.warnings()[0].find("bias"), std::string::npos);
}

TEST(KernelGenerator, RejectsUnsupportedOrders) {
  EXPECT_THROW(KernelGenerator(unit_grid(1, 4), HurstIndex({0.75}, 3)), UnsupportedError);
  EXPECT_THROW(KernelGenerator(unit_grid(3, 2), HurstIndex({0.75, 0.75, 0.75}, 2)), UnsupportedError);
  KernelConfig bad;
  bad.truncation_depth = -1.0;
  EXPECT_THROW(KernelGenerator(unit_grid(1, 4), HurstIndex({0.75}, 1), bad), ParameterError);
}

TEST(SelfSimilarity, ExactSlopeIsTwiceHurstSum) {
  const std::vector<double> scales{0.125, 0.25, 0.5, 1.0};
  const auto a = verify_self_similarity_exact(HurstIndex({0.7}, 2), scales);
  EXPECT_NEAR(a.slope, 1.4, 1e-13);
  const auto b = verify_self_similarity_exact(HurstIndex({0.6, 0.8}, 1), scales);
  EXPECT_NEAR(b.slope, 2.8, 1e-13);
  EXPECT_DOUBLE_EQ(b.theory, 2.8);
  EXPECT_THROW(verify_self_similarity_exact(HurstIndex({0.7}, 1), {0.5, 1.0}), ParameterError);
  EXPECT_THROW(verify_self_similarity_exact(HurstIndex({0.7}, 1), {0.5, 0.5, 0.5}), ParameterError);
}

TEST(SelfSimilarity, RosenblattMonteCarloSlope) {
  const HurstIndex h({0.7}, 2);
  const HermiteVariationGenerator gen(unit_grid(1, 8), h, 512);
  const auto r = verify_self_similarity(make_sampler(gen, 41), h, {0.125, 0.25, 0.5, 1.0}, 2000);
  EXPECT_NEAR(r.slope, 1.4, 0.1);
}

TEST(StationaryIncrements, ZeroShiftGivesZeroScores) {
  const HurstIndex h({0.75}, 2);
  const HermiteVariationGenerator gen(unit_grid(1, 8), h, 64);
  const auto r = verify_stationary_increments(make_sampler(gen, 5), MultiIndex{0.5}, MultiIndex{0.0}, 200);
  EXPECT_EQ(r.z2, 0.0);
  EXPECT_EQ(r.z4, 0.0);
  EXPECT_TRUE(r.passes());
}

TEST(StationaryIncrements, GaussianMomentsAndKurtosis) {
  const HurstIndex h({0.75}, 1);
  const HermiteVariationGenerator gen(unit_grid(1, 8), h, 256);
  const auto r = verify_stationary_increments(make_sampler(gen, 6), MultiIndex{0.5}, MultiIndex{0.25}, 4000);
  EXPECT_TRUE(r.passes());
  EXPECT_NEAR(r.m4_base / (3.0 * r.m2_base * r.m2_base), 1.0, 0.1);
}

TEST(HolderScaling, FractionalBrownianSlope) {
  const HurstIndex h({0.75}, 1);
  const HermiteVariationGenerator gen(unit_grid(1, 8), h, 256);
  const auto reps = verify_holder_scaling(make_sampler(gen, 7), h, MultiIndex{1.0}, {0.125, 0.25, 0.5, 1.0}, 2000);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_NEAR(reps[0].slope, 1.5, 0.1);
  EXPECT_DOUBLE_EQ(reps[0].theory, 1.5);
}
