#pragma once

// Gaussian building blocks: Brownian-sheet cell increments, fractional
// Gaussian noise sheets with separable covariance, Hermite polynomials.

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"
#include "hfield/rng.hpp"
#include "hfield/tensor.hpp"

namespace hfield {

/// Independent N(0, cell volume) increments of the standard Brownian sheet,
/// one per cell in row-major cell order.
inline std::vector<double> sample_white_noise(const GridSpec& grid, RngStream& rng) {
  const double vol = grid.cell_volume();
  if (!(vol > 0.0) || grid.cell_count() == 0) throw ParameterError("white noise needs cells of positive volume");
  const double sd = std::sqrt(vol);
  std::vector<double> inc(grid.cell_count());
  for (auto& x : inc) x = sd * rng.normal();
  return inc;
}

/// Node field W of the Brownian sheet from its cell increments (W = 0 on the
/// origin hyperplanes).
inline std::vector<double> white_noise_nodes(const GridSpec& grid, std::span<const double> increments) {
  const auto& c = grid.cells();
  return cumulative_nodes(increments, c);
}

/// Lag-k autocovariance of unit-variance fractional Gaussian noise.
inline double fgn_covariance(double hprime, long long k) {
  if (!(hprime > 0.0 && hprime < 1.0)) throw DomainError("fractional noise Hurst must lie in (0,1)");
  const double a = std::abs(static_cast<double>(k));
  const double e = 2.0 * hprime;
  return 0.5 * (std::pow(a + 1.0, e) - 2.0 * std::pow(a, e) + std::pow(std::abs(a - 1.0), e));
}

/// Lower-triangular square root of the n x n fGn Toeplitz covariance.
class ToeplitzRoot {
 public:
  ToeplitzRoot(std::size_t n, double hprime) : n_(n), hprime_(hprime) {
    if (n == 0) throw ParameterError("fGn axis length must be positive");
    Eigen::MatrixXd cov(n, n);
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = fgn_covariance(hprime, static_cast<long long>(k));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cov(i, j) = r[i > j ? i - j : j - i];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw FactorizationError("Toeplitz covariance not positive definite");
    lower_ = llt.matrixL();
    for (std::size_t i = 0; i < n; ++i)
      if (!(lower_(i, i) > 1e-12)) throw FactorizationError("Toeplitz covariance numerically singular");
  }
  std::size_t size() const noexcept { return n_; }
  double hprime() const noexcept { return hprime_; }
  const Eigen::MatrixXd& matrix() const noexcept { return lower_; }

 private:
  std::size_t n_;
  double hprime_;
  Eigen::MatrixXd lower_;
};

struct FgnSheet {
  std::vector<std::size_t> shape;
  std::vector<double> hprime;
  std::vector<double> values;  // row-major, unit marginal variance
};

/// Reusable sampler: per-axis roots are built once and shared by replicates.
class FgnSheetSampler {
 public:
  FgnSheetSampler(std::vector<std::size_t> cells, std::vector<double> hprime)
      : shape_(std::move(cells)), hprime_(std::move(hprime)) {
    if (shape_.size() != hprime_.size()) throw DimensionError("one fGn Hurst value per axis required");
    if (shape_.empty()) throw DimensionError("fGn sheet needs at least one axis");
    for (std::size_t a = 0; a < shape_.size(); ++a) {
      std::shared_ptr<const ToeplitzRoot> root;
      for (std::size_t b = 0; b < a; ++b)
        if (shape_[b] == shape_[a] && hprime_[b] == hprime_[a]) root = roots_[b];
      if (!root) {
        try {
          root = std::make_shared<const ToeplitzRoot>(shape_[a], hprime_[a]);
        } catch (const FactorizationError& e) {
          throw FactorizationError("axis " + std::to_string(a) + ": " + e.what());
        } catch (const DomainError& e) {
          throw DomainError("axis " + std::to_string(a) + ": " + e.what());
        }
      }
      roots_.push_back(std::move(root));
    }
    mats_.reserve(roots_.size());
    for (const auto& r : roots_) mats_.push_back(r->matrix());
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  const std::vector<double>& hprime() const noexcept { return hprime_; }

  std::vector<double> sample_values(RngStream& rng) const {
    std::vector<double> x(shape_size(shape_));
    rng.fill_normal(x);
    return multi_mode_product(std::move(x), shape_, mats_);
  }
  FgnSheet sample(RngStream& rng) const { return {shape_, hprime_, sample_values(rng)}; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> hprime_;
  std::vector<std::shared_ptr<const ToeplitzRoot>> roots_;
  std::vector<Eigen::MatrixXd> mats_;
};

inline FgnSheet sample_fgn_sheet(const std::vector<std::size_t>& cells, const std::vector<double>& hprime,
                                 RngStream& rng) {
  return FgnSheetSampler(cells, hprime).sample(rng);
}

inline constexpr int kMaxHermiteOrder = 8;

/// Probabilists' Hermite polynomial He_q (leading coefficient 1).
inline double hermite_poly(int q, double x) {
  if (q < 0 || q > kMaxHermiteOrder)
    throw ParameterError("Hermite order must lie in [0, " + std::to_string(kMaxHermiteOrder) + "]");
  if (q == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace hfield
