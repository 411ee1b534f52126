#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hfield/parallel.hpp"
#include "hfield/randgen.hpp"
#include "hfield/rng.hpp"

using namespace hfield;

TEST(Philox, KnownAnswerVectors) {
  using A = std::array<std::uint32_t, 4>;
  EXPECT_EQ(detail::philox4x32_10(A{0, 0, 0, 0}, {0, 0}), (A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(detail::philox4x32_10(A{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(RngStream, SameSeedAndStreamRepeat) {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs = differs || x != c.normal();
  }
  EXPECT_TRUE(differs);
}

TEST(RngStream, UniformStaysInsideOpenInterval) {
  RngStream r(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(WhiteNoise, UnitCellVarianceAndDisjointCorrelation) {
  const auto g = GridSpec::from_origin_zero(MultiIndex{2.0}, {2});
  std::vector<double> sq, prod;
  for (std::size_t r = 0; r < 10000; ++r) {
    RngStream rng(8, r);
    const auto inc = sample_white_noise(g, rng);
    sq.push_back(inc[0] * inc[0]);
    prod.push_back(inc[0] * inc[1]);
  }
  const auto v = mean_se(sq), c = mean_se(prod);
  EXPECT_LT(std::abs(v.mean - 1.0), 3.0 * v.se);
  EXPECT_LT(std::abs(c.mean), 3.0 * c.se);
}

TEST(WhiteNoise, SameSeedSameArray) {
  const auto g = GridSpec::from_origin_zero(MultiIndex{1.0, 1.0}, {3, 3});
  RngStream a(5, 0), b(5, 0);
  EXPECT_EQ(sample_white_noise(g, a), sample_white_noise(g, b));
}

TEST(FgnCovariance, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(fgn_covariance(0.75, 0), 1.0);
  EXPECT_NEAR(fgn_covariance(0.5, 3), 0.0, 1e-15);
  EXPECT_NEAR(fgn_covariance(0.75, 1), 0.5 * (std::pow(2.0, 1.5) - 2.0), 1e-15);
  EXPECT_NEAR(fgn_covariance(0.75, 1), 0.41421356237309515, 1e-15);
  EXPECT_DOUBLE_EQ(fgn_covariance(0.8, -4), fgn_covariance(0.8, 4));
  EXPECT_THROW(fgn_covariance(1.0, 1), DomainError);
}

TEST(FgnSheet, IndependentWhenHalf) {
  FgnSheetSampler s({64}, {0.5});
  std::vector<double> lag;
  for (std::size_t r = 0; r < 2000; ++r) {
    RngStream rng(3, r);
    const auto v = s.sample_values(rng);
    lag.push_back(v[10] * v[11]);
  }
  const auto m = mean_se(lag);
  EXPECT_LT(std::abs(m.mean), 3.0 * m.se);
}

TEST(FgnSheet, SeparableLagCovarianceAndUnitVariance) {
  const double h1 = 0.7, h2 = 0.85;
  FgnSheetSampler s({6, 5}, {h1, h2});
  std::vector<double> lag, var, var_corner;
  for (std::size_t r = 0; r < 10000; ++r) {
    RngStream rng(4, r);
    const auto v = s.sample_values(rng);
    lag.push_back(v[2 * 5 + 1] * v[3 * 5 + 2]);
    var.push_back(v[2 * 5 + 1] * v[2 * 5 + 1]);
    var_corner.push_back(v[29] * v[29]);
  }
  const double th = fgn_covariance(h1, 1) * fgn_covariance(h2, 1);
  const auto m = mean_se(lag), a = mean_se(var), b = mean_se(var_corner);
  EXPECT_LT(std::abs(m.mean - th), 3.0 * m.se);
  EXPECT_LT(std::abs(a.mean - 1.0), 3.0 * a.se);
  EXPECT_LT(std::abs(b.mean - 1.0), 3.0 * b.se);
}

TEST(FgnSheet, RejectsBadAxes) {
  EXPECT_THROW(FgnSheetSampler({4, 4}, {0.7}), DimensionError);
  EXPECT_THROW(FgnSheetSampler({4}, {1.2}), DomainError);
}

TEST(HermitePoly, LowOrders) {
  EXPECT_EQ(hermite_poly(0, 3.0), 1.0);
  EXPECT_EQ(hermite_poly(1, 1.75), 1.75);
  EXPECT_EQ(hermite_poly(2, 3.0), 8.0);
  EXPECT_EQ(hermite_poly(3, 2.0), 2.0);
  EXPECT_EQ(hermite_poly(4, 1.0), 1.0 - 6.0 + 3.0);
  EXPECT_THROW(hermite_poly(-1, 0.0), ParameterError);
}
