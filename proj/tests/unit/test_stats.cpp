#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hfield/hermite.hpp"
#include "hfield/stats.hpp"

using namespace hfield;

namespace {

// X_t = t on [0, 1]: occupation density 1 on [0, 1).
FieldRealization linear_path(std::size_t n) {
  const auto g = GridSpec::from_origin_zero(MultiIndex{1.0}, {n});
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = g.node_coord(0, k);
  return FieldRealization(g, v, HurstIndex({0.75}, 1), 0, GeneratorTag::gaussian_exact);
}

FieldRealization sheet_path() {
  const auto g = GridSpec::from_origin_zero(MultiIndex{1.0, 1.0}, {16, 16});
  return HermiteVariationGenerator(g, HurstIndex({0.7, 0.8}, 1), 16).generate(11, 0);
}

}  // namespace

TEST(Occupation, WholeLineGivesBoxVolume) {
  const auto f = sheet_path();
  const ParameterBox box{MultiIndex{0.25, 0.0}, MultiIndex{0.75, 0.5}};
  const auto r = occupation_measure(f, box, -INFINITY, INFINITY);
  EXPECT_NEAR(r.value, 0.25, 1e-15);
  EXPECT_FALSE(r.empty_box);
}

TEST(Occupation, AdditiveOverDisjointSets) {
  const auto f = sheet_path();
  const ParameterBox box{MultiIndex{0.0, 0.0}, MultiIndex{1.0, 1.0}};
  const double whole = occupation_measure(f, box, -1.0, 1.0).value;
  const double parts = occupation_measure(f, box, -1.0, 0.1).value + occupation_measure(f, box, 0.1, 1.0).value;
  EXPECT_NEAR(whole, parts, 1e-15);
}

TEST(Occupation, EmptyBoxAndConstantPath) {
  const auto f = sheet_path();
  const auto e = occupation_measure(f, {MultiIndex{0.5, 0.0}, MultiIndex{0.5, 1.0}}, -10.0, 10.0);
  EXPECT_TRUE(e.empty_box);
  EXPECT_EQ(e.value, 0.0);
  const auto g = GridSpec::from_origin_zero(MultiIndex{1.0}, {8});
  const FieldRealization c(g, std::vector<double>(9, 0.3), HurstIndex({0.75}, 1), 0, GeneratorTag::kernel);
  EXPECT_NEAR(occupation_measure(c, {MultiIndex{0.0}, MultiIndex{1.0}}, 0.3, 0.4).value, 1.0, 1e-15);
  EXPECT_EQ(occupation_measure(c, {MultiIndex{0.0}, MultiIndex{1.0}}, 0.0, 0.3).value, 0.0);
  EXPECT_THROW(occupation_measure(f, {MultiIndex{0.3, 0.0}, MultiIndex{0.5, 1.0}}, 0.0, 1.0), SnapError);
}

TEST(Occupation, IntegralOfIndicatorEqualsMeasure) {
  const auto f = sheet_path();
  const ParameterBox box{MultiIndex{0.0, 0.25}, MultiIndex{1.0, 1.0}};
  const double m = occupation_measure(f, box, -0.2, 0.4).value;
  EXPECT_NEAR(occupation_integral(f, box, [](double v) { return v >= -0.2 && v < 0.4 ? 1.0 : 0.0; }), m, 1e-15);
}

TEST(LocalTime, HistogramIdentities) {
  const auto e = local_time_histogram(linear_path(256), {MultiIndex{0.0}, MultiIndex{1.0}}, -1.0 / 512, 1.0 - 1.0 / 512, 8);
  for (double d : e.density) EXPECT_NEAR(d, 1.0, 1e-14);
  EXPECT_NEAR(e.total_mass(), 1.0, 1e-15);
  EXPECT_NEAR(e.box_volume, 1.0, 1e-15);
  const auto c = bin_centers(e);
  ASSERT_EQ(c.size(), 8u);
  EXPECT_NEAR(c[0], 0.0625 - 1.0 / 512, 1e-15);
}

TEST(LocalTime, HistogramMassMatchesOccupation) {
  const auto f = sheet_path();
  const ParameterBox box{MultiIndex{0.0, 0.0}, MultiIndex{1.0, 1.0}};
  double lo = 1e300, hi = -1e300;
  for (double v : f.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto e = local_time_histogram(f, box, lo - 0.01, hi + 0.01, 10);
  for (std::size_t k = 0; k < 10; ++k)
    EXPECT_NEAR(e.mass[k], occupation_measure(f, box, e.edges[k], e.edges[k + 1]).value, 1e-15);
  EXPECT_NEAR(e.total_mass(), box.volume(), 1e-14);
}

TEST(LocalTime, RefusesValuesOutsideBins) {
  EXPECT_THROW(local_time_histogram(linear_path(16), {MultiIndex{0.0}, MultiIndex{1.0}}, 0.0, 0.5, 4), DomainError);
  EXPECT_THROW(local_time_histogram(linear_path(16), {MultiIndex{0.0}, MultiIndex{1.0}}, 0.0, 1.0, 0), ParameterError);
}

TEST(LocalTime, FourierEstimateOfLinearPath) {
  const auto f = local_time_fourier(linear_path(1024), {MultiIndex{0.0}, MultiIndex{1.0}}, {0.3, 0.5, 0.7}, 64.0);
  for (double d : f.density) EXPECT_NEAR(d, 1.0, 0.05);
  EXPECT_LT(f.refinement_delta, 0.05);
}

TEST(LocalTime, FourierLinearInDisjointBoxes) {
  const auto p = sheet_path();
  const std::vector<double> x{-0.2, 0.0, 0.3};
  const auto a = local_time_fourier(p, {MultiIndex{0.0, 0.0}, MultiIndex{0.5, 1.0}}, x, 8.0, 257);
  const auto b = local_time_fourier(p, {MultiIndex{0.5, 0.0}, MultiIndex{1.0, 1.0}}, x, 8.0, 257);
  const auto w = local_time_fourier(p, {MultiIndex{0.0, 0.0}, MultiIndex{1.0, 1.0}}, x, 8.0, 257);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(a.density[k] + b.density[k], w.density[k], 1e-12);
}

TEST(LocalTime, CsvHasHeaderAndOneRowPerBin) {
  const auto e = local_time_histogram(linear_path(16), {MultiIndex{0.0}, MultiIndex{1.0}}, 0.0, 1.5, 3);
  std::stringstream ss;
  write_local_time_csv(e, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "bin_center,density");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Regression, ExactPowerLaw) {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  const auto r = scaling_regression(x, y);
  EXPECT_NEAR(r.slope, 1.7, 1e-13);
  EXPECT_NEAR(std::exp(r.intercept), 3.0, 1e-12);
  EXPECT_NEAR(r.slope_se, 0.0, 1e-12);
  EXPECT_THROW(scaling_regression(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), ParameterError);
}

TEST(SufficiencyIntegral, MatchesReferenceAndConverges) {
  // Reference from adaptive double quadrature: 4 int int (1-t)(1-x) / sqrt(t^2 + x^2).
  const auto r = metric_sufficiency_integral(1.0, 1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.973209598247377, 1e-9);
  const auto s = metric_sufficiency_integral(0.5, 0.5, 1.6);
  EXPECT_TRUE(s.converged);
  EXPECT_TRUE(std::isfinite(s.value));
  EXPECT_THROW(metric_sufficiency_integral(0.0, 1.0, 2.0), DomainError);
}
