#pragma once

// The Hermite sheet: normalizing constant, closed-form covariance, the two
// generators (kernel discretization of the multiple Wiener-Ito integral and
// normalized Hermite variations of a fractional Gaussian noise sheet), and
// the self-similarity / stationarity verifiers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"
#include "hfield/parallel.hpp"
#include "hfield/quadrature.hpp"
#include "hfield/randgen.hpp"
#include "hfield/regression.hpp"
#include "hfield/rng.hpp"
#include "hfield/tensor.hpp"

namespace hfield {

inline double beta_function(double p, double r) {
  if (!(p > 0.0) || !(r > 0.0) || !std::isfinite(p) || !std::isfinite(r))
    throw DomainError("Beta function needs positive finite arguments");
  if (p + r < 170.0) {
    const double v = std::tgamma(p) * std::tgamma(r) / std::tgamma(p + r);
    if (std::isfinite(v) && v > 0.0) return v;
  }
  return std::exp(std::lgamma(p) + std::lgamma(r) - std::lgamma(p + r));
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// c(H,q) = sqrt( prod_i H_i(2H_i-1) / B(1/2 - (1-H_i)/q, 2(1-H_i)/q)^q ).
inline double normalizing_constant_squared(const HurstIndex& hurst) {
  const double q = hurst.q();
  double c2 = 1.0;
  for (std::size_t i = 0; i < hurst.dims(); ++i) {
    const double h = hurst[i];
    const double b = beta_function(0.5 - (1.0 - h) / q, 2.0 * (1.0 - h) / q);
    c2 *= h * (2.0 * h - 1.0) / std::pow(b, q);
  }
  return c2;
}

inline double normalizing_constant(const HurstIndex& hurst) { return std::sqrt(normalizing_constant_squared(hurst)); }

struct CovarianceQuery {
  MultiIndex s;
  MultiIndex t;
  HurstIndex hurst;
};

/// R(s,t) = prod_i (s_i^{2H_i} + t_i^{2H_i} - |t_i - s_i|^{2H_i}) / 2.
inline double covariance(const HurstIndex& hurst, const MultiIndex& s, const MultiIndex& t) {
  MultiIndex::require_same(s, t);
  if (s.size() != hurst.dims()) throw DimensionError("covariance query dimension differs from Hurst index");
  double r = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0 || t[i] < 0.0) throw DomainError("covariance is defined for nonnegative parameters only");
    const double e = 2.0 * hurst[i];
    r *= 0.5 * (std::pow(s[i], e) + std::pow(t[i], e) - std::pow(std::abs(t[i] - s[i]), e));
  }
  return r;
}

inline double covariance(const CovarianceQuery& q) { return covariance(q.hurst, q.s, q.t); }

/// Cov(dZ over [lo1,hi1], dZ over [lo2,hi2]) by expanding both generalized
/// increments against the covariance function corner by corner.
inline double increment_covariance(const HurstIndex& hurst, const MultiIndex& lo1, const MultiIndex& hi1,
                                   const MultiIndex& lo2, const MultiIndex& hi2) {
  const std::size_t d = hurst.dims();
  const std::size_t n = std::size_t{1} << d;
  auto corner = [d](const MultiIndex& lo, const MultiIndex& hi, std::size_t r) {
    MultiIndex c = lo;
    for (std::size_t i = 0; i < d; ++i)
      if ((r >> (d - 1 - i)) & 1u) c[i] = hi[i];
    return c;
  };
  std::vector<double> inner(n);
  std::vector<double> outer(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto a = corner(lo1, hi1, r);
    for (std::size_t r2 = 0; r2 < n; ++r2) inner[r2] = covariance(hurst, a, corner(lo2, hi2, r2));
    outer[r] = generalized_increment(inner, d);
  }
  return generalized_increment(outer, d);
}

namespace detail {

inline void require_origin_zero(const GridSpec& grid, const char* who) {
  for (std::size_t i = 0; i < grid.dims(); ++i) {
    if (grid.origin()[i] != 0.0) throw ParameterError(std::string(who) + " needs a grid with origin 0");
    if (grid.cells(i) == 0) throw ParameterError(std::string(who) + " needs at least one cell per axis");
  }
}

}  // namespace detail

/// Normalized Hermite variations of an fGn sheet:
///   Z_N(t) = d_N^{-1} sum_{i <= N t} H_q(G_i),
/// with per-axis fGn Hurst h'_i = 1 + (H_i - 1)/q and d_N chosen so that
/// Var Z_N(1,...,1) = 1 exactly. Grid nodes must sit on multiples of 1/N.
class HermiteVariationGenerator {
 public:
  static constexpr std::size_t kMinResolution = 8;

  HermiteVariationGenerator(GridSpec grid, HurstIndex hurst, std::size_t resolution)
      : grid_(std::move(grid)), hurst_(std::move(hurst)), n_(resolution) {
    if (grid_.dims() != hurst_.dims()) throw DimensionError("grid and Hurst index dimensions differ");
    detail::require_origin_zero(grid_, "Hermite variation generator");
    if (n_ < kMinResolution)
      throw ParameterError("resolution N = " + std::to_string(n_) + " is below the minimum " +
                           std::to_string(kMinResolution));
    const std::size_t d = grid_.dims();
    std::vector<std::size_t> sheet(d);
    std::vector<double> hp(d);
    step_.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double len = grid_.extent()[i] * static_cast<double>(n_);
      const double lr = std::round(len);
      if (lr < 1.0 || std::abs(len - lr) > 1e-9 * std::max(1.0, len))
        throw SnapError("axis " + std::to_string(i) + ": extent * N is not an integer");
      sheet[i] = static_cast<std::size_t>(lr);
      if (sheet[i] % grid_.cells(i) != 0)
        throw SnapError("axis " + std::to_string(i) + ": grid nodes are not multiples of 1/N");
      step_[i] = sheet[i] / grid_.cells(i);
      hp[i] = hurst_.transformed(i);
    }
    sampler_ = std::make_shared<const FgnSheetSampler>(sheet, hp);
    double dn2 = factorial(hurst_.q());
    const double q = hurst_.q();
    for (std::size_t i = 0; i < d; ++i) {
      double s = static_cast<double>(n_);
      for (std::size_t k = 1; k < n_; ++k)
        s += 2.0 * static_cast<double>(n_ - k) * std::pow(fgn_covariance(hp[i], static_cast<long long>(k)), q);
      dn2 *= s;
    }
    dn_ = std::sqrt(dn2);
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const HurstIndex& hurst() const noexcept { return hurst_; }
  std::size_t resolution() const noexcept { return n_; }
  double standardization() const noexcept { return dn_; }

  FieldRealization sample(RngStream& rng) const {
    auto g = sampler_->sample_values(rng);
    const int q = hurst_.q();
    for (auto& x : g) x = hermite_poly(q, x);
    const auto& sheet = sampler_->shape();
    const auto full = cumulative_nodes(g, sheet);
    const std::size_t d = grid_.dims();
    std::vector<std::size_t> fstride(d, 1);
    for (std::size_t i = d - 1; i > 0; --i) fstride[i - 1] = fstride[i] * (sheet[i] + 1);
    std::vector<double> values(grid_.node_count());
    const double inv = 1.0 / dn_;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto idx = grid_.unflatten_node(k);
      std::size_t f = 0;
      for (std::size_t i = 0; i < d; ++i) f += idx[i] * step_[i] * fstride[i];
      values[k] = full[f] * inv;
    }
    return FieldRealization(grid_, std::move(values), hurst_, rng.seed(), GeneratorTag::hermite_variation);
  }

  FieldRealization generate(std::uint64_t seed, std::uint64_t replicate) const {
    RngStream rng(seed, replicate);
    return sample(rng);
  }

 private:
  GridSpec grid_;
  HurstIndex hurst_;
  std::size_t n_;
  std::vector<std::size_t> step_;
  std::shared_ptr<const FgnSheetSampler> sampler_;
  double dn_ = 1.0;
};

inline FieldRealization generate_hermite_variation(const GridSpec& grid, const HurstIndex& hurst,
                                                   std::size_t resolution, RngStream& rng) {
  return HermiteVariationGenerator(grid, hurst, resolution).sample(rng);
}

struct KernelConfig {
  double truncation_depth = 8.0;        // L: uniform y-mesh covers [-L, t_max]
  std::size_t y_cells = 256;            // cells of the uniform y-mesh per axis
  std::size_t tail_cells = 96;          // geometric cells below -L
  double tail_ratio = 1.25;             // width ratio of successive tail cells
  std::size_t s_quadrature_points = 8;  // Gauss-Legendre points per s-panel
  double variance_bias_bound = 0.10;    // relative variance deficit that triggers a warning

  void validate() const {
    if (!(truncation_depth > 0.0) || !std::isfinite(truncation_depth))
      throw ParameterError("kernel truncation depth L must be positive");
    if (y_cells < 2) throw ParameterError("kernel y_cells must be at least 2");
    if (s_quadrature_points < 2) throw ParameterError("kernel s_quadrature_points must be at least 2");
    if (tail_cells > 0 && !(tail_ratio > 1.0)) throw ParameterError("kernel tail_ratio must exceed 1");
    if (!(variance_bias_bound > 0.0)) throw ParameterError("variance_bias_bound must be positive");
  }
};

/// Discretized multiple Wiener-Ito integral
///   Z(t) = c/sqrt(q!) int_{R^{dq}} int_{[0,t]} prod_{i,j} (s_i - y_{ij})_+^{-alpha_i} ds W(dy_1)...W(dy_q)
/// with alpha_i = 1/2 + (1-H_i)/q. The y-space is cut into cells (uniform on
/// [-L, t_max], geometrically graded below -L); the kernel is projected onto
/// cells, integrated analytically in y and by Gauss-Legendre panels in s.
/// For q = 2 the double integral of the projected kernel is realized exactly
/// as the Wick square :M(s)^2: of the discretized first-chaos field M.
class KernelGenerator {
 public:
  KernelGenerator(GridSpec grid, HurstIndex hurst, KernelConfig cfg = {})
      : grid_(std::move(grid)), hurst_(std::move(hurst)), cfg_(cfg) {
    cfg_.validate();
    if (grid_.dims() != hurst_.dims()) throw DimensionError("grid and Hurst index dimensions differ");
    if (hurst_.q() > 2) throw UnsupportedError("kernel generator supports q in {1,2} only");
    if (grid_.dims() * static_cast<std::size_t>(hurst_.q()) > 4)
      throw UnsupportedError("kernel generator needs d*q <= 4");
    detail::require_origin_zero(grid_, "kernel generator");
    c_ = normalizing_constant(hurst_) / std::sqrt(factorial(hurst_.q()));
    for (std::size_t i = 0; i < grid_.dims(); ++i) axes_.push_back(build_axis(i));
    const double target = grid_.upper().pow(2.0 * hurst_.as_multi_index());
    std::vector<std::size_t> top(grid_.cells());
    bias_ = discrete_rectangle_covariance(std::vector<std::size_t>(grid_.dims(), 0), top,
                                          std::vector<std::size_t>(grid_.dims(), 0), top) /
                target -
            1.0;
    if (std::abs(bias_) > cfg_.variance_bias_bound)
      warnings_.push_back("kernel discretization variance bias " + std::to_string(100.0 * bias_) +
                          "% at the top corner exceeds the bound " +
                          std::to_string(100.0 * cfg_.variance_bias_bound) +
                          "%; refine y_cells, tail_cells or s_quadrature_points");
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const HurstIndex& hurst() const noexcept { return hurst_; }
  const KernelConfig& config() const noexcept { return cfg_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// Relative deviation of the exact discrete variance at the top grid corner
  /// from prod t_i^{2H_i}.
  double variance_bias() const noexcept { return bias_; }
  std::size_t y_cell_count(std::size_t axis) const { return axes_[axis].y_edges.size() - 1; }
  std::size_t s_point_count(std::size_t axis) const { return axes_[axis].s_nodes.size(); }
  const std::vector<double>& y_edges(std::size_t axis) const { return axes_[axis].y_edges; }

  /// One-axis factor of the cell kernel accumulated over s in [0, node k]:
  /// for q = 1 a column over y-cells, for q = 2 the y-cell x y-cell matrix
  /// sum_s w_s Kbar(s,c1) Kbar(s,c2) (symmetric in the two factor blocks).
  Eigen::MatrixXd kernel_factor(std::size_t axis, std::size_t node) const {
    const auto& ax = axes_.at(axis);
    const auto ny = static_cast<Eigen::Index>(ax.y_edges.size() - 1);
    if (hurst_.q() == 1) {
      Eigen::MatrixXd col = Eigen::MatrixXd::Zero(ny, 1);
      for (std::size_t k = 0; k < node; ++k) col.col(0) += ax.cell_kernel.row(static_cast<Eigen::Index>(k)).transpose();
      return col;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ny, ny);
    for (std::size_t p = 0; p < ax.s_nodes.size(); ++p) {
      if (ax.s_cell[p] >= node) continue;
      const auto row = ax.kbar.row(static_cast<Eigen::Index>(p));
      m.noalias() += ax.s_weights[p] * row.transpose() * row;
    }
    return m;
  }

  /// Exact covariance of the discrete field's generalized increments over two
  /// node-aligned rectangles given by node indices [lo, hi).
  double discrete_rectangle_covariance(const std::vector<std::size_t>& lo1, const std::vector<std::size_t>& hi1,
                                       const std::vector<std::size_t>& lo2,
                                       const std::vector<std::size_t>& hi2) const {
    const std::size_t d = grid_.dims();
    if (lo1.size() != d || hi1.size() != d || lo2.size() != d || hi2.size() != d)
      throw DimensionError("rectangle index length differs from grid dimension");
    // Cov(:M(s)^2:, :M(s')^2:) = 2 Cov(M(s),M(s'))^2 supplies the q! for q = 2.
    double v = c_ * c_ * factorial(hurst_.q());
    for (std::size_t i = 0; i < d; ++i) {
      if (lo1[i] > hi1[i] || lo2[i] > hi2[i] || hi1[i] > grid_.cells(i) || hi2[i] > grid_.cells(i))
        throw DomainError("rectangle node indices out of range");
      const auto& s = axes_[i].cell_cov;
      double acc = 0.0;
      for (std::size_t a = lo1[i]; a < hi1[i]; ++a)
        for (std::size_t b = lo2[i]; b < hi2[i]; ++b)
          acc += s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      v *= acc;
    }
    return v;
  }

  /// Exact variance of the discrete field at a node.
  double discrete_variance(const std::vector<std::size_t>& node) const {
    const std::vector<std::size_t> zero(grid_.dims(), 0);
    return discrete_rectangle_covariance(zero, node, zero, node);
  }

  FieldRealization sample(RngStream& rng) const {
    const std::size_t d = grid_.dims();
    std::vector<std::size_t> yshape(d);
    for (std::size_t i = 0; i < d; ++i) yshape[i] = axes_[i].y_edges.size() - 1;
    std::vector<double> xi(shape_size(yshape));
    rng.fill_normal(xi);
    std::vector<double> cells;
    double scale = c_;
    if (hurst_.q() == 1) {
      std::vector<Eigen::MatrixXd> mats;
      for (const auto& ax : axes_) mats.push_back(ax.cell_kernel);
      cells = multi_mode_product(std::move(xi), yshape, mats);
    } else {
      std::vector<Eigen::MatrixXd> kmats, pmats;
      std::vector<std::size_t> sshape(d);
      for (std::size_t i = 0; i < d; ++i) {
        kmats.push_back(axes_[i].kbar);
        pmats.push_back(axes_[i].agg);
        sshape[i] = axes_[i].s_nodes.size();
      }
      auto m = multi_mode_product(std::move(xi), yshape, kmats);
      std::vector<std::size_t> idx(d, 0);
      for (std::size_t k = 0; k < m.size(); ++k) {
        double dk = 1.0;
        for (std::size_t i = 0; i < d; ++i) dk *= axes_[i].diag[idx[i]];
        m[k] = m[k] * m[k] - dk;
        for (std::size_t i = d; i-- > 0;) {
          if (++idx[i] < sshape[i]) break;
          idx[i] = 0;
        }
      }
      cells = multi_mode_product(std::move(m), sshape, pmats);
    }
    auto nodes = cumulative_nodes(cells, grid_.cells());
    for (auto& v : nodes) v *= scale;
    return FieldRealization(grid_, std::move(nodes), hurst_, rng.seed(), GeneratorTag::kernel);
  }

  FieldRealization generate(std::uint64_t seed, std::uint64_t replicate) const {
    RngStream rng(seed, replicate);
    return sample(rng);
  }

 private:
  struct Axis {
    std::vector<double> y_edges;
    std::vector<double> s_nodes, s_weights;
    std::vector<std::size_t> s_cell;
    Eigen::MatrixXd kbar;         // s-points x y-cells
    Eigen::MatrixXd agg;          // grid cells x s-points (quadrature weights)
    Eigen::MatrixXd cell_kernel;  // q = 1: grid cells x y-cells
    Eigen::MatrixXd cell_cov;     // grid cells x grid cells
    std::vector<double> diag;     // q = 2: Var M factor per s-point
  };

  Axis build_axis(std::size_t i) const {
    Axis ax;
    const double tmax = grid_.upper()[i];
    const double depth = cfg_.truncation_depth;
    for (std::size_t k = cfg_.tail_cells; k >= 1; --k)
      ax.y_edges.push_back(-depth * std::pow(cfg_.tail_ratio, static_cast<double>(k)));
    for (std::size_t k = 0; k <= cfg_.y_cells; ++k)
      ax.y_edges.push_back(k == cfg_.y_cells ? tmax
                                             : -depth + (tmax + depth) * static_cast<double>(k) /
                                                            static_cast<double>(cfg_.y_cells));
    const std::size_t ny = ax.y_edges.size() - 1;

    std::vector<double> breaks;
    for (std::size_t k = 0; k <= grid_.cells(i); ++k) breaks.push_back(grid_.node_coord(i, k));
    const double h = grid_.spacing(i);
    for (double e : ax.y_edges)
      if (e > 0.0 && e < tmax) breaks.push_back(e);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> uniq;
    for (double b : breaks)
      if (uniq.empty() || b - uniq.back() > 1e-12 * std::max(1.0, tmax)) uniq.push_back(b);

    const auto& rule = gauss_legendre(cfg_.s_quadrature_points);
    for (std::size_t p = 0; p + 1 < uniq.size(); ++p) {
      const double a = uniq[p], b = uniq[p + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      const auto cell = std::min<std::size_t>(static_cast<std::size_t>(mid / h), grid_.cells(i) - 1);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        ax.s_nodes.push_back(mid + half * rule.nodes[k]);
        ax.s_weights.push_back(half * rule.weights[k]);
        ax.s_cell.push_back(cell);
      }
    }
    const std::size_t ns = ax.s_nodes.size();
    const double alpha = 0.5 + (1.0 - hurst_[i]) / hurst_.q();
    const double e = 1.0 - alpha;
    ax.kbar.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ny));
    for (std::size_t p = 0; p < ns; ++p) {
      const double s = ax.s_nodes[p];
      for (std::size_t c = 0; c < ny; ++c) {
        const double lo = ax.y_edges[c], hi = ax.y_edges[c + 1];
        const double v = (std::pow(std::max(s - lo, 0.0), e) - std::pow(std::max(s - hi, 0.0), e)) / e;
        ax.kbar(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = v / std::sqrt(hi - lo);
      }
    }
    const auto nc = static_cast<Eigen::Index>(grid_.cells(i));
    ax.agg = Eigen::MatrixXd::Zero(nc, static_cast<Eigen::Index>(ns));
    for (std::size_t p = 0; p < ns; ++p)
      ax.agg(static_cast<Eigen::Index>(ax.s_cell[p]), static_cast<Eigen::Index>(p)) = ax.s_weights[p];
    if (hurst_.q() == 1) {
      ax.cell_kernel = ax.agg * ax.kbar;
      ax.cell_cov = ax.cell_kernel * ax.cell_kernel.transpose();
    } else {
      const Eigen::MatrixXd g = ax.kbar * ax.kbar.transpose();
      ax.diag.resize(ns);
      for (std::size_t p = 0; p < ns; ++p) ax.diag[p] = g(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
      const Eigen::MatrixXd g2 = g.cwiseProduct(g);
      ax.cell_cov = ax.agg * g2 * ax.agg.transpose();
    }
    return ax;
  }

  GridSpec grid_;
  HurstIndex hurst_;
  KernelConfig cfg_;
  double c_ = 1.0;
  std::vector<Axis> axes_;
  double bias_ = 0.0;
  std::vector<std::string> warnings_;
};

struct KernelResult {
  FieldRealization field;
  std::vector<std::string> warnings;
};

inline KernelResult generate_kernel_discretized(const GridSpec& grid, const HurstIndex& hurst, const KernelConfig& cfg,
                                                RngStream& rng) {
  KernelGenerator gen(grid, hurst, cfg);
  return {gen.sample(rng), gen.warnings()};
}

/// Replicate index -> realization. Must be safe to call concurrently.
using FieldSampler = std::function<FieldRealization(std::size_t)>;

template <class Gen>
FieldSampler make_sampler(const Gen& gen, std::uint64_t seed) {
  return [&gen, seed](std::size_t r) { return gen.generate(seed, r); };
}

/// Field values at the given points, one row per replicate.
inline std::vector<std::vector<double>> sample_point_values(const FieldSampler& sampler,
                                                            const std::vector<MultiIndex>& points,
                                                            std::size_t replicates, std::size_t threads = 0) {
  return run_replicates(replicates, threads, [&](std::size_t r) {
    const auto f = sampler(r);
    std::vector<double> v(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) v[k] = f.at(points[k]);
    return v;
  });
}

inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> c(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][k];
  return c;
}

inline void check_scales(const std::vector<double>& scales) {
  if (scales.size() < 3) throw ParameterError("self-similarity check needs at least 3 scales");
  if (std::all_of(scales.begin(), scales.end(), [&](double c) { return c == scales.front(); }))
    throw ParameterError("self-similarity scales are all equal");
  for (double c : scales)
    if (!(c > 0.0)) throw DomainError("self-similarity scales must be positive");
}

/// log E[Z(c 1)^2] against log c from the closed-form covariance.
inline RegressionReport verify_self_similarity_exact(const HurstIndex& hurst, const std::vector<double>& scales) {
  check_scales(scales);
  std::vector<double> m;
  for (double c : scales) {
    const auto p = MultiIndex::filled(hurst.dims(), c);
    m.push_back(covariance(hurst, p, p));
  }
  auto rep = scaling_regression(scales, m);
  rep.theory = 2.0 * hurst.sum();
  return rep;
}

/// Monte Carlo version: second moments of Z(c 1) over replicates.
inline RegressionReport verify_self_similarity(const FieldSampler& sampler, const HurstIndex& hurst,
                                               const std::vector<double>& scales, std::size_t replicates,
                                               std::size_t threads = 0) {
  check_scales(scales);
  std::vector<MultiIndex> pts;
  for (double c : scales) pts.push_back(MultiIndex::filled(hurst.dims(), c));
  const auto rows = sample_point_values(sampler, pts, replicates, threads);
  std::vector<double> m;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    auto col = column(rows, k);
    for (auto& x : col) x *= x;
    m.push_back(mean_se(col).mean);
  }
  auto rep = scaling_regression(scales, m);
  rep.theory = 2.0 * hurst.sum();
  return rep;
}

struct StationarityReport {
  double m2_base = 0, m2_shift = 0, se2 = 0, z2 = 0;
  double m4_base = 0, m4_shift = 0, se4 = 0, z4 = 0;
  std::size_t replicates = 0;
  bool passes(double zmax = 3.0) const { return std::abs(z2) <= zmax && std::abs(z4) <= zmax; }
};

namespace detail {

inline double paired_z(const std::vector<double>& diff) {
  const auto ms = mean_se(diff);
  if (ms.se > 0.0) return ms.mean / ms.se;
  return ms.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Compares second and fourth moments of dZ over [0,t] and [h,h+t]. The
/// z-scores come from paired per-replicate differences.
inline StationarityReport verify_stationary_increments(const FieldSampler& sampler, const MultiIndex& t,
                                                       const MultiIndex& h, std::size_t replicates,
                                                       std::size_t threads = 0) {
  MultiIndex::require_same(t, h);
  const auto zero = MultiIndex::filled(t.size(), 0.0);
  if (!zero.all_less_equal(h)) throw DomainError("stationarity shift must be nonnegative");
  if (!zero.all_less(t)) throw DomainError("stationarity rectangle must have positive sides");
  const auto rows = run_replicates(replicates, threads, [&](std::size_t r) {
    const auto f = sampler(r);
    return std::vector<double>{increment_over_rectangle(f, zero, t), increment_over_rectangle(f, h, h + t)};
  });
  std::vector<double> a2, b2, a4, b4, d2, d4;
  for (const auto& row : rows) {
    const double x2 = row[0] * row[0], y2 = row[1] * row[1];
    a2.push_back(x2);
    b2.push_back(y2);
    a4.push_back(x2 * x2);
    b4.push_back(y2 * y2);
    d2.push_back(x2 - y2);
    d4.push_back(x2 * x2 - y2 * y2);
  }
  StationarityReport rep;
  rep.replicates = replicates;
  rep.m2_base = mean_se(a2).mean;
  rep.m2_shift = mean_se(b2).mean;
  rep.m4_base = mean_se(a4).mean;
  rep.m4_shift = mean_se(b4).mean;
  rep.se2 = mean_se(d2).se;
  rep.se4 = mean_se(d4).se;
  rep.z2 = detail::paired_z(d2);
  rep.z4 = detail::paired_z(d4);
  return rep;
}

/// Per-axis log-log regression of E|dZ over [0, base with axis i set to delta]|^2
/// against delta; theory 2H_i.
inline std::vector<RegressionReport> verify_holder_scaling(const FieldSampler& sampler, const HurstIndex& hurst,
                                                           const MultiIndex& base, const std::vector<double>& deltas,
                                                           std::size_t replicates, std::size_t threads = 0) {
  const std::size_t d = hurst.dims();
  if (base.size() != d) throw DimensionError("base point dimension differs from Hurst index");
  std::vector<MultiIndex> pts;
  for (std::size_t i = 0; i < d; ++i)
    for (double dl : deltas) {
      auto p = base;
      p[i] = dl;
      pts.push_back(p);
    }
  const auto rows = sample_point_values(sampler, pts, replicates, threads);
  std::vector<RegressionReport> out;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> m;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      auto col = column(rows, i * deltas.size() + k);
      for (auto& x : col) x *= x;
      m.push_back(mean_se(col).mean);
    }
    auto rep = scaling_regression(deltas, m);
    rep.theory = 2.0 * hurst[i];
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace hfield
