#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hfield/errors.hpp"

namespace hfield {

struct RegressionReport {
  std::vector<double> x;  // separations or scales
  std::vector<double> y;  // moments
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double theory = std::numeric_limits<double>::quiet_NaN();

  double z() const {
    if (slope_se > 0.0) return (slope - theory) / slope_se;
    return slope == theory ? 0.0 : std::numeric_limits<double>::infinity();
  }
  bool within(double tol) const { return std::abs(slope - theory) <= tol; }
};

/// OLS fit of log(moment) = intercept + slope * log(separation). Optional
/// weights multiply the squared residuals.
inline RegressionReport scaling_regression(std::span<const double> separations, std::span<const double> moments,
                                           std::span<const double> weights = {}) {
  const std::size_t n = separations.size();
  if (moments.size() != n) throw DimensionError("separations and moments differ in length");
  if (!weights.empty() && weights.size() != n) throw DimensionError("weights differ in length");
  if (n < 3) throw ParameterError("scaling regression needs at least 3 points");
  RegressionReport r;
  r.x.assign(separations.begin(), separations.end());
  r.y.assign(moments.begin(), moments.end());
  std::vector<double> lx(n), ly(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(separations[i] > 0.0) || !(moments[i] > 0.0))
      throw DomainError("scaling regression needs positive separations and moments");
    if (!weights.empty()) {
      if (!(weights[i] > 0.0)) throw DomainError("regression weights must be positive");
      w[i] = weights[i];
    }
    lx[i] = std::log(separations[i]);
    ly[i] = std::log(moments[i]);
  }
  double sw = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    mx += w[i] * lx[i];
    my += w[i] * ly[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("scaling regression needs at least two distinct separations");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - r.intercept - r.slope * lx[i];
    rss += w[i] * e * e;
  }
  r.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return r;
}

}  // namespace hfield
