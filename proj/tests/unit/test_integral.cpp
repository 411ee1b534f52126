#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hfield/hermite.hpp"
#include "hfield/integral.hpp"

using namespace hfield;

TEST(InnerProductH, IndicatorsGiveCovariances) {
  const HurstIndex h1({0.75}, 1), h2({0.6, 0.8}, 2);
  EXPECT_NEAR(inner_product_H(StepFunction::indicator(MultiIndex{0.0}, MultiIndex{1.0}),
                              StepFunction::indicator(MultiIndex{0.0}, MultiIndex{1.0}), h1),
              1.0, 1e-15);
  const auto box = StepFunction::indicator(MultiIndex{0.0, 0.0}, MultiIndex{0.3, 0.7});
  EXPECT_NEAR(inner_product_H(box, box, h2), std::pow(0.3, 1.2) * std::pow(0.7, 1.6), 1e-15);
  EXPECT_NEAR(inner_product_H(StepFunction::indicator(MultiIndex{0.0}, MultiIndex{1.0}),
                              StepFunction::indicator(MultiIndex{1.0}, MultiIndex{2.0}), h1),
              std::sqrt(2.0) - 1.0, 1e-15);
}

TEST(InnerProductH, QuadratureAgreesWithClosedForm) {
  const HurstIndex h({0.7}, 1);
  StepFunction f(1);
  f.add(1.5, MultiIndex{0.0}, MultiIndex{0.5}).add(-0.75, MultiIndex{0.25}, MultiIndex{1.0});
  const IntegrandFunction fi(f);
  EXPECT_NEAR(inner_product_H(fi, fi, h), inner_product_H(f, f, h), 2e-3 * inner_product_H(f, f, h));
}

TEST(NormH, ZeroScalingAndUnitBox) {
  const StepFunction zero(2);
  const HurstIndex h({0.6, 0.9}, 1);
  EXPECT_EQ(norm_H(zero, h), 0.0);
  const auto box = StepFunction::indicator(MultiIndex{0.0, 0.0}, MultiIndex{1.0, 1.0});
  EXPECT_NEAR(norm_H(box, h), 1.0, 1e-15);
  EXPECT_NEAR(norm_H(box.scaled(-2.5), h), 2.5, 1e-14);
}

TEST(Membership, NonnegativeAndSignedFunctions) {
  const HurstIndex h({0.75}, 1);
  const auto one = check_membership_absH(IntegrandFunction(StepFunction::indicator(MultiIndex{0.0}, MultiIndex{1.0})), h);
  EXPECT_NEAR(one.value, 1.0, 1e-3);
  EXPECT_FALSE(one.inconclusive);
  StepFunction f(1);
  f.add(1.0, MultiIndex{0.0}, MultiIndex{0.5}).add(-1.0, MultiIndex{0.5}, MultiIndex{1.0});
  const auto m = check_membership_absH(IntegrandFunction(f), h);
  EXPECT_GT(m.value, inner_product_H(f, f, h));
}

TEST(Membership, OscillatingIntegrandStableUnderHalving) {
  const HurstIndex h({0.75}, 1);
  const IntegrandFunction f([](const MultiIndex& u) { return std::sin(20.0 * u[0]); }, MultiIndex{0.0},
                            MultiIndex{1.0});
  const auto m = check_membership_absH(f, h);
  EXPECT_TRUE(std::isfinite(m.value));
  EXPECT_LT(m.relative_change, 0.01);
}

TEST(WienerIntegral, IndicatorRecoversFieldValue) {
  const auto grid = GridSpec::from_origin_zero(MultiIndex{1.0, 1.0}, {4, 4});
  const HermiteVariationGenerator gen(grid, HurstIndex({0.7, 0.8}, 1), 16);
  const auto f = gen.generate(3, 0);
  const MultiIndex t{0.75, 0.5};
  EXPECT_NEAR(wiener_integral(StepFunction::indicator(MultiIndex{0.0, 0.0}, t), f), f.at(t), 1e-14);
  EXPECT_EQ(wiener_integral(StepFunction(2), f), 0.0);
  EXPECT_THROW(wiener_integral(StepFunction::indicator(MultiIndex{0.0, 0.0}, MultiIndex{0.3, 0.5}), f), SnapError);
}

TEST(WienerIntegral, IsometryWithKernelRosenblattFields) {
  const auto grid = GridSpec::from_origin_zero(MultiIndex{1.0}, {8});
  const HurstIndex h({0.75}, 2);
  KernelConfig cfg;
  cfg.truncation_depth = 2.0;
  cfg.y_cells = 512;
  const KernelGenerator gen(grid, h, cfg);
  RngStream frng(9, 1u << 30);
  const auto f = random_step_function(grid, 3, frng);
  const auto vals = run_replicates(2000, 0, [&](std::size_t r) {
    const double x = wiener_integral(f, gen.generate(10, r));
    return x * x;
  });
  const auto ms = mean_se(vals);
  const double th = inner_product_H(f, f, h);
  auto idx = [&](const MultiIndex& p) { return grid.snap_point(p); };
  const double disc = step_quadratic_form(f, [&](const auto& a, const auto& b, const auto& c, const auto& d) {
    return gen.discrete_rectangle_covariance(idx(a), idx(b), idx(c), idx(d));
  });
  EXPECT_LT(std::abs(disc - th), 0.05 * th);
  EXPECT_LT(std::abs(ms.mean - th), 3.0 * ms.se + std::abs(disc - th));
}

TEST(StepFunction, ValidationAndHalfOpenEvaluation) {
  StepFunction f(1);
  EXPECT_THROW(f.add(1.0, MultiIndex{0.5}, MultiIndex{0.5}), DomainError);
  EXPECT_THROW(f.add(1.0, MultiIndex{0.0, 0.0}, MultiIndex{1.0, 1.0}), DimensionError);
  f.add(2.0, MultiIndex{0.0}, MultiIndex{0.5});
  EXPECT_EQ(f(MultiIndex{0.0}), 2.0);
  EXPECT_EQ(f(MultiIndex{0.5}), 0.0);
}

TEST(Projection, FixedPointsAndConstants) {
  const auto grid = GridSpec::from_origin_zero(MultiIndex{1.0}, {4});
  const HurstIndex h({0.7}, 1);
  StepFunction s(1);
  s.add(3.0, MultiIndex{0.25}, MultiIndex{0.75});
  const auto p = project_to_steps(IntegrandFunction(s), grid);
  EXPECT_NEAR(inner_product_H(p, p, h), inner_product_H(s, s, h), 1e-14);
  const IntegrandFunction c([](const MultiIndex&) { return 2.0; }, MultiIndex{0.0}, MultiIndex{1.0});
  EXPECT_NEAR(projection_error_H(c, grid, h), 0.0, 1e-12);
  const IntegrandFunction wide([](const MultiIndex&) { return 1.0; }, MultiIndex{0.0}, MultiIndex{2.0});
  EXPECT_THROW(project_to_steps(wide, grid), DomainError);
}

TEST(Projection, LinearIntegrandErrorShrinksPerDoubling) {
  const HurstIndex h({0.75}, 1);
  const IntegrandFunction f([](const MultiIndex& u) { return u[0]; }, MultiIndex{0.0}, MultiIndex{1.0});
  double prev = projection_error_H(f, GridSpec::from_origin_zero(MultiIndex{1.0}, {4}), h);
  for (std::size_t n : {8, 16, 32}) {
    const double e = projection_error_H(f, GridSpec::from_origin_zero(MultiIndex{1.0}, {n}), h);
    const double ratio = prev / e;
    EXPECT_GT(ratio, std::pow(2.0, 1.0));
    EXPECT_LT(ratio, std::pow(2.0, 2.0 - 0.75 + 0.25));
    prev = e;
  }
}

TEST(StepCsv, RoundTrip) {
  StepFunction f(2);
  f.add(0.1, MultiIndex{0.0, 0.25}, MultiIndex{0.5, 1.0}).add(-3.0, MultiIndex{0.5, 0.0}, MultiIndex{1.0, 0.75});
  std::stringstream ss;
  write_step_csv(f, ss);
  const auto g = read_step_csv(ss);
  ASSERT_EQ(g.terms().size(), 2u);
  EXPECT_EQ(g.terms()[1].coefficient, -3.0);
  EXPECT_EQ(g.terms()[0].hi, (MultiIndex{0.5, 1.0}));
  std::stringstream bad("coefficient,lo1\n1,2\n");
  EXPECT_THROW(read_step_csv(bad), FormatError);
}
