#pragma once

// Linear stochastic wave equation driven by a (d+1)-parameter Hermite sheet:
// Green's functions, the existence exponent beta, the mild-solution sampler,
// deterministic covariance oracles, increment scaling and the covariance
// determinant check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"
#include "hfield/hermite.hpp"
#include "hfield/integral.hpp"
#include "hfield/parallel.hpp"
#include "hfield/quadrature.hpp"
#include "hfield/regression.hpp"
#include "hfield/rng.hpp"
#include "hfield/tensor.hpp"

namespace hfield {

inline double greens_function(std::size_t d, double t, const MultiIndex& x) {
  if (!(t > 0.0)) throw DomainError("Green's function needs t > 0");
  if (x.size() != d) throw DimensionError("Green's function point dimension differs from d");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double r = std::sqrt(r2);
  if (d == 1) return r < t ? 0.5 : 0.0;
  if (d == 2) return r < t ? 1.0 / (2.0 * std::numbers::pi * std::sqrt(t * t - r2)) : 0.0;
  throw UnsupportedError("Green's function is implemented for d in {1,2} (d = 3 is measure-valued)");
}

/// Spatial Fourier transform sin(t|xi|)/|xi|, with value t at xi = 0.
inline double greens_fourier(std::size_t d, double t, const MultiIndex& xi) {
  if (!(t > 0.0)) throw DomainError("Green's function needs t > 0");
  if (xi.size() != d) throw DimensionError("frequency dimension differs from d");
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r * t < 1e-8) return t * (1.0 - (r * t) * (r * t) / 6.0);
  return std::sin(t * r) / r;
}

enum class NoiseKind { variation, kernel };

struct WaveConfig {
  std::size_t d = 1;
  double H = 0.75;                // time Hurst
  std::vector<double> H0{0.75};   // space Hurst, one per axis
  int q = 1;
  double T = 1.0;                 // time horizon
  double M = 2.0;                 // space box [-M, M]^d
  std::size_t resolution = 32;    // cells per unit length, time and space
  NoiseKind noise = NoiseKind::variation;
  KernelConfig kernel{};

  HurstIndex hurst() const {
    std::vector<double> h{H};
    h.insert(h.end(), H0.begin(), H0.end());
    return HurstIndex(std::move(h), q);
  }
  void validate() const {
    if (d == 0) throw ParameterError("space dimension d must be at least 1");
    if (H0.size() != d) throw DimensionError("need one space Hurst value per space axis");
    (void)hurst();
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("time horizon T must be positive");
    if (!(M > 0.0) || !std::isfinite(M)) throw ParameterError("space box half-width M must be positive");
  }
};

struct BetaExponent {
  double beta = 0.0;
  double bound = 0.0;    // 2H + 1
  bool exists = false;   // beta < 2H + 1
  bool regular = false;  // 2H - 1 < beta < min(d, 2H + 1)
};

inline BetaExponent beta_exponent(std::size_t d, double h_time, const std::vector<double>& h_space) {
  if (h_space.size() != d) throw DimensionError("need one space Hurst value per space axis");
  BetaExponent b;
  b.beta = static_cast<double>(d);
  for (double h : h_space) b.beta -= 2.0 * h - 1.0;
  b.bound = 2.0 * h_time + 1.0;
  b.exists = b.beta < b.bound;
  b.regular = b.beta > 2.0 * h_time - 1.0 && b.beta < std::min(static_cast<double>(d), b.bound);
  return b;
}

inline BetaExponent beta_exponent(const WaveConfig& c) { return beta_exponent(c.d, c.H, c.H0); }

/// Exponent 2H + 1 - beta of the anisotropic metric.
inline double metric_exponent(const WaveConfig& c) {
  const auto b = beta_exponent(c);
  return b.bound - b.beta;
}

struct SpaceTimePoint {
  double t = 0.0;
  MultiIndex x;
};

inline double anisotropic_metric(const SpaceTimePoint& p1, const SpaceTimePoint& p2, const WaveConfig& c) {
  MultiIndex::require_same(p1.x, p2.x);
  const double e = metric_exponent(c);
  double r2 = 0.0;
  for (std::size_t i = 0; i < p1.x.size(); ++i) r2 += (p1.x[i] - p2.x[i]) * (p1.x[i] - p2.x[i]);
  return std::pow(std::abs(p1.t - p2.t), e) + std::pow(std::sqrt(r2), e);
}

namespace detail {

/// d = 1, unit mesh: (1/2) int_{m-1}^{m} |[n, n+1] cap (-tau, tau)| dtau.
inline double cone_cell_1d(long m, long n) {
  const double t0 = static_cast<double>(m - 1), t1 = static_cast<double>(m);
  const double y0 = static_cast<double>(n), y1 = static_cast<double>(n + 1);
  auto len = [&](double tau) { return std::max(0.0, std::min(y1, tau) - std::max(y0, -tau)); };
  std::vector<double> bp{t0, t1};
  for (double b : {std::abs(y0), std::abs(y1)})
    if (b > t0 && b < t1) bp.push_back(b);
  std::sort(bp.begin(), bp.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double a = bp[k], b = bp[k + 1];
    acc += 0.5 * (b - a) * (len(a) + len(b));  // len is linear on each piece
  }
  return 0.5 * acc;
}

/// int_{tau0}^{tau1} (tau^2 - r^2)_+^{-1/2} dtau.
inline double radial_time_integral(double tau0, double tau1, double r) {
  if (r >= tau1) return 0.0;
  const double up = std::log(tau1 + std::sqrt(tau1 * tau1 - r * r));
  if (r >= tau0) return up - std::log(r);
  return up - std::log(tau0 + std::sqrt(tau0 * tau0 - r * r));
}

/// d = 2, unit mesh: int_{m-1}^{m} int_{[n1,n1+1]x[n2,n2+1]} G(tau, y) dy dtau.
inline double cone_cell_2d(long m, long n1, long n2, std::size_t sub = 8, std::size_t pts = 6) {
  const double tau0 = static_cast<double>(m - 1), tau1 = static_cast<double>(m);
  auto dist = [](double a, double b) {  // distance of [a,b] to 0
    return a > 0.0 ? a : (b < 0.0 ? -b : 0.0);
  };
  const double a1 = static_cast<double>(n1), a2 = static_cast<double>(n2);
  const double dmin = std::hypot(dist(a1, a1 + 1.0), dist(a2, a2 + 1.0));
  if (dmin >= tau1) return 0.0;
  const auto& rule = gauss_legendre(pts);
  const double h = 1.0 / static_cast<double>(sub);
  double acc = 0.0;
  for (std::size_t i = 0; i < sub; ++i)
    for (std::size_t j = 0; j < sub; ++j) {
      const double lo1 = a1 + h * static_cast<double>(i), lo2 = a2 + h * static_cast<double>(j);
      if (std::hypot(dist(lo1, lo1 + h), dist(lo2, lo2 + h)) >= tau1) continue;
      for (std::size_t p = 0; p < pts; ++p)
        for (std::size_t k = 0; k < pts; ++k) {
          const double y1 = lo1 + 0.5 * h * (rule.nodes[p] + 1.0);
          const double y2 = lo2 + 0.5 * h * (rule.nodes[k] + 1.0);
          acc += 0.25 * h * h * rule.weights[p] * rule.weights[k] * radial_time_integral(tau0, tau1, std::hypot(y1, y2));
        }
    }
  return acc / (2.0 * std::numbers::pi);
}

}  // namespace detail

/// Sampled mild solution on [0,T] x [-(M-T), M-T]^d.
struct WaveSolution {
  FieldRealization field;  // leading axis is time (field_flags::time_axis)
  WaveConfig config;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  double at(double t, const MultiIndex& x) const {
    std::vector<double> p{t};
    p.insert(p.end(), x.begin(), x.end());
    return field.at(MultiIndex(p));
  }
};

/// u(t,x) = sum over space-time cells of the cell-averaged Green's function
/// times the generalized increment of the driving sheet over the cell. The
/// sheet lives on [0,T] x [0,2M]^d and is shifted to x in [-M, M]^d.
class WaveSolver {
 public:
  explicit WaveSolver(WaveConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const auto b = beta_exponent(cfg_);
    if (!b.exists)
      throw ExistenceError("no mild solution: beta = " + std::to_string(b.beta) + " violates beta < 2H+1 = " +
                           std::to_string(b.bound));
    if (cfg_.d > 2) throw UnsupportedError("wave solver supports d in {1,2}");
    if (cfg_.q < 1 || cfg_.q > 2) throw UnsupportedError("wave solver supports q in {1,2}");
    if (cfg_.resolution < HermiteVariationGenerator::kMinResolution)
      throw ParameterError("wave resolution must be at least " +
                           std::to_string(HermiteVariationGenerator::kMinResolution));
    const double n = static_cast<double>(cfg_.resolution);
    nt_ = checked_count(cfg_.T * n, "T * resolution");
    nx_ = checked_count(2.0 * cfg_.M * n, "2M * resolution");
    h_ = 1.0 / n;
    if (nt_ > nx_ / 2) throw DomainError("space box too small: need M >= T");
    std::vector<double> ext{cfg_.T};
    std::vector<std::size_t> cells{nt_};
    for (std::size_t i = 0; i < cfg_.d; ++i) {
      ext.push_back(2.0 * cfg_.M);
      cells.push_back(nx_);
    }
    noise_grid_.emplace(GridSpec::from_origin_zero(MultiIndex(ext), cells));
    if (cfg_.noise == NoiseKind::variation)
      variation_ = std::make_shared<const HermiteVariationGenerator>(*noise_grid_, cfg_.hurst(), cfg_.resolution);
    else
      kernel_ = std::make_shared<const KernelGenerator>(*noise_grid_, cfg_.hurst(), cfg_.kernel);
    build_stencil();
  }

  const WaveConfig& config() const noexcept { return cfg_; }
  const GridSpec& noise_grid() const { return *noise_grid_; }
  double spacing() const noexcept { return h_; }
  std::vector<std::string> warnings() const { return kernel_ ? kernel_->warnings() : std::vector<std::string>{}; }

  /// Whole-solution grid: every node's backward light cone fits the box.
  GridSpec solution_grid() const {
    const std::size_t half = nx_ / 2 - nt_;
    if (half == 0) throw DomainError("space box too small for a full solve: need M > T");
    std::vector<double> org{0.0}, ext{cfg_.T};
    std::vector<std::size_t> cells{nt_};
    const double w = static_cast<double>(half) * h_;
    for (std::size_t i = 0; i < cfg_.d; ++i) {
      org.push_back(-w);
      ext.push_back(2.0 * w);
      cells.push_back(2 * half);
    }
    return GridSpec(MultiIndex(org), MultiIndex(ext), cells);
  }

  FieldRealization sample_noise(RngStream& rng) const {
    return variation_ ? variation_->sample(rng) : kernel_->sample(rng);
  }
  std::vector<double> sample_noise_increments(RngStream& rng) const { return cell_increments(sample_noise(rng)); }

  /// Mild solution at one node from given cell increments of the sheet.
  double solve_point(std::span<const double> inc, double t, const MultiIndex& x) const {
    const auto [k, j] = locate(t, x);
    return point_value(inc, k, j);
  }

  std::vector<double> solve_points(std::span<const double> inc, const std::vector<SpaceTimePoint>& pts) const {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(solve_point(inc, p.t, p.x));
    return out;
  }

  WaveSolution solve(std::span<const double> inc, std::uint64_t seed = 0, std::uint64_t replicate = 0) const {
    const auto grid = solution_grid();
    const std::size_t half = nx_ / 2 - nt_;
    std::vector<double> values(grid.node_count());
    for (std::size_t f = 0; f < values.size(); ++f) {
      const auto idx = grid.unflatten_node(f);
      std::vector<long> j(cfg_.d);
      for (std::size_t i = 0; i < cfg_.d; ++i) j[i] = static_cast<long>(idx[i + 1] + nx_ / 2 - half);
      values[f] = point_value(inc, idx[0], j);
    }
    FieldRealization field(grid, std::move(values), cfg_.hurst(), seed,
                           cfg_.noise == NoiseKind::variation ? GeneratorTag::hermite_variation : GeneratorTag::kernel,
                           field_flags::time_axis);
    return WaveSolution{std::move(field), cfg_, seed, replicate};
  }

  WaveSolution solve(std::uint64_t seed, std::uint64_t replicate) const {
    RngStream rng(seed, replicate);
    const auto inc = sample_noise_increments(rng);
    return solve(inc, seed, replicate);
  }

  std::vector<double> sample_points(std::uint64_t seed, std::uint64_t replicate,
                                    const std::vector<SpaceTimePoint>& pts) const {
    RngStream rng(seed, replicate);
    const auto inc = sample_noise_increments(rng);
    return solve_points(inc, pts);
  }

  /// Cell-averaged Green's function for time-cell lag m >= 1 and space-cell
  /// offsets n (cell [n h, (n+1) h] relative to the point).
  double cell_green(long m, std::span<const long> n) const {
    if (m < 1 || m > static_cast<long>(nt_)) return 0.0;
    if (cfg_.d == 1) {
      const long off = n[0] + m + 1;
      if (off < 0 || off >= 2 * m + 2) return 0.0;
      return stencil1_[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(off)];
    }
    auto fold = [](long v) { return v >= 0 ? v : -v - 1; };
    long a = fold(n[0]), b = fold(n[1]);
    if (a < b) std::swap(a, b);
    if (a > m) return 0.0;
    return stencil2_[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(a * (a + 1) / 2 + b)] / h_;
  }

 private:
  static std::size_t checked_count(double v, const char* what) {
    const double r = std::round(v);
    if (r < 1.0 || std::abs(v - r) > 1e-9 * std::max(1.0, v))
      throw ParameterError(std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(r);
  }

  std::pair<std::size_t, std::vector<long>> locate(double t, const MultiIndex& x) const {
    if (x.size() != cfg_.d) throw DimensionError("space point dimension differs from d");
    const double kt = t / h_;
    const double kr = std::round(kt);
    if (kr < 0.0 || kr > static_cast<double>(nt_) || std::abs(kt - kr) > 1e-9 * std::max(1.0, kt))
      throw SnapError("time " + std::to_string(t) + " is not a time node");
    const auto k = static_cast<std::size_t>(kr);
    std::vector<long> j(cfg_.d);
    for (std::size_t i = 0; i < cfg_.d; ++i) {
      const double kx = (x[i] + cfg_.M) / h_;
      const double jr = std::round(kx);
      if (std::abs(kx - jr) > 1e-9 * std::max(1.0, std::abs(kx)))
        throw SnapError("space coordinate " + std::to_string(x[i]) + " is not a space node");
      const auto jj = static_cast<long>(jr);
      if (jj - static_cast<long>(k) < 0 || jj + static_cast<long>(k) > static_cast<long>(nx_))
        throw DomainError("space box too small: the light cone of the point leaves [-M, M]^d");
      j[i] = jj;
    }
    return {k, j};
  }

  double point_value(std::span<const double> inc, std::size_t k, const std::vector<long>& j) const {
    const std::size_t nspace = cfg_.d == 1 ? nx_ : nx_ * nx_;
    if (inc.size() != nt_ * nspace) throw DimensionError("noise increment count differs from the noise grid");
    double acc = 0.0;
    const long nx = static_cast<long>(nx_);
    for (std::size_t a = 0; a < k; ++a) {
      const long m = static_cast<long>(k - a);
      const double* row = inc.data() + a * nspace;
      if (cfg_.d == 1) {
        const auto& st = stencil1_[static_cast<std::size_t>(m - 1)];
        for (long off = 0; off < 2 * m + 2; ++off) {
          const long b = j[0] + off - m - 1;
          if (b < 0 || b >= nx) continue;
          acc += st[static_cast<std::size_t>(off)] * row[b];
        }
      } else {
        long n[2];
        for (long b1 = std::max(0L, j[0] - m - 1); b1 <= std::min(nx - 1, j[0] + m); ++b1)
          for (long b2 = std::max(0L, j[1] - m - 1); b2 <= std::min(nx - 1, j[1] + m); ++b2) {
            n[0] = b1 - j[0];
            n[1] = b2 - j[1];
            acc += cell_green(m, n) * row[b1 * nx + b2];
          }
      }
    }
    return acc;
  }

  void build_stencil() {
    if (cfg_.d == 1) {
      for (long m = 1; m <= static_cast<long>(nt_); ++m) {
        std::vector<double> st(static_cast<std::size_t>(2 * m + 2));
        for (long off = 0; off < 2 * m + 2; ++off) st[static_cast<std::size_t>(off)] = detail::cone_cell_1d(m, off - m - 1);
        stencil1_.push_back(std::move(st));
      }
      return;
    }
    for (long m = 1; m <= static_cast<long>(nt_); ++m) {
      std::vector<double> st(static_cast<std::size_t>((m + 1) * (m + 2) / 2));
      for (long a = 0; a <= m; ++a)
        for (long b = 0; b <= a; ++b) st[static_cast<std::size_t>(a * (a + 1) / 2 + b)] = detail::cone_cell_2d(m, a, b);
      stencil2_.push_back(std::move(st));
    }
  }

  WaveConfig cfg_;
  std::size_t nt_ = 0, nx_ = 0;
  double h_ = 0.0;
  std::optional<GridSpec> noise_grid_;
  std::shared_ptr<const HermiteVariationGenerator> variation_;
  std::shared_ptr<const KernelGenerator> kernel_;
  std::vector<std::vector<double>> stencil1_;
  std::vector<std::vector<double>> stencil2_;  // folded: (a,b) with a >= b >= 0
};

inline WaveSolution solve_wave_mild(const WaveConfig& cfg, RngStream& rng) {
  WaveSolver solver(cfg);
  const auto inc = solver.sample_noise_increments(rng);
  return solver.solve(inc, rng.seed(), rng.stream_id());
}

struct OracleOptions {
  std::size_t panels = 16;  // outer u-panels; the check also uses twice this
  std::size_t points = 24;  // Gauss-Legendre points per panel
  double rel_tol = 1e-6;    // allowed relative change under panel doubling
};

namespace detail {

/// v = offset + sign * u marks a kink of the inner integrand.
struct Kink {
  double sign;
  double offset;
};

/// int_0^t int_0^s |u-v|^{2H-2} F(u,v) dv du. The inner integral uses
/// w = |u-v|^{2H-1} on each side of the diagonal; kinks become breakpoints.
template <class F>
double time_double_integral(double h, double t, double s, F&& f, const std::vector<Kink>& kinks,
                            std::size_t panels, std::size_t points) {
  if (!(t > 0.0) || !(s > 0.0)) return 0.0;
  const double p = 2.0 * h - 1.0;
  const auto& rule = gauss_legendre(points);
  std::vector<double> ub{0.0, t};
  auto add_u = [&](double u) {
    if (u > 0.0 && u < t) ub.push_back(u);
  };
  add_u(s);
  for (const auto& k : kinks) {
    if (k.sign < 0) {
      add_u(k.offset);
      add_u(k.offset - s);
      add_u(0.5 * k.offset);
    } else {
      add_u(-k.offset);
      add_u(s - k.offset);
    }
  }
  // The inner integral behaves like |u - u*|^{2H-1} where the diagonal v = u
  // meets v = 0 or v = s; grade geometrically towards those points.
  for (double anchor : {0.0, s}) {
    double gap = std::max(t, s);
    for (int k = 0; k < 24; ++k) {
      gap *= 0.35;
      add_u(anchor + gap);
      add_u(anchor - gap);
    }
  }
  std::sort(ub.begin(), ub.end());
  std::vector<double> breaks;
  for (std::size_t i = 0; i + 1 < ub.size(); ++i) {
    const double a = ub[i], b = ub[i + 1];
    if (b - a < 1e-14) continue;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(panels * (b - a) / t)));
    for (std::size_t k = 0; k < n; ++k) breaks.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n));
  }
  breaks.push_back(t);

  auto inner = [&](double u) {
    std::vector<double> vb{0.0, s};
    auto add_v = [&](double v) {
      if (v > 0.0 && v < s) vb.push_back(v);
    };
    add_v(u);
    for (const auto& k : kinks) add_v(k.offset + k.sign * u);
    std::sort(vb.begin(), vb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < vb.size(); ++i) {
      const double v0 = vb[i], v1 = vb[i + 1];
      if (v1 - v0 < 1e-15) continue;
      const bool below = v1 <= u;
      const double r0 = below ? u - v1 : v0 - u;
      const double r1 = below ? u - v0 : v1 - u;
      const double w0 = std::pow(std::max(r0, 0.0), p), w1 = std::pow(r1, p);
      const double half = 0.5 * (w1 - w0), mid = 0.5 * (w1 + w0);
      for (std::size_t k = 0; k < points; ++k) {
        const double w = mid + half * rule.nodes[k];
        const double r = std::pow(w, 1.0 / p);
        const double v = below ? u - r : u + r;
        acc += half * rule.weights[k] * f(u, v) / p;
      }
    }
    return acc;
  };
  return integrate_panels(inner, breaks, points);
}

template <class Eval>
double converged(Eval&& eval, const OracleOptions& opt, const char* what) {
  const double a = eval(opt.panels);
  const double b = eval(2 * opt.panels);
  const double change = std::abs(b - a) / std::max(std::abs(b), 1e-300);
  if (change > opt.rel_tol) throw AccuracyError(std::string(what) + ": quadrature not converged under panel doubling", b, change);
  return b;
}

}  // namespace detail

/// E u(t,x) u(s,y) for d = 1 by the time-domain route: the spatial inner
/// product of the two cone indicators is the closed interval-pair form.
inline double oracle_covariance_time_domain(const WaveConfig& c, const SpaceTimePoint& p1, const SpaceTimePoint& p2,
                                            const OracleOptions& opt = {}) {
  if (c.d != 1) throw UnsupportedError("time-domain oracle covers d = 1");
  const double t = p1.t, s = p2.t, x = p1.x[0], y = p2.x[0];
  if (t < 0.0 || s < 0.0) throw DomainError("oracle times must be nonnegative");
  if (t == 0.0 || s == 0.0) return 0.0;
  const double h = c.H, h1 = c.H0[0];
  auto f = [&](double u, double v) {
    const double a = t - u, b = s - v;
    return 0.25 * interval_pair_kernel(h1, x - a, x + a, y - b, y + b);
  };
  const std::vector<detail::Kink> kinks{{-1.0, x - y + t + s}, {-1.0, y - x + t + s}, {1.0, y - x + s - t},
                                        {1.0, x - y + s - t}};
  const double alpha = h * (2.0 * h - 1.0);
  return detail::converged(
      [&](std::size_t panels) { return alpha * detail::time_double_integral(h, t, s, f, kinks, panels, opt.points); },
      opt, "wave covariance oracle");
}

/// Spectral constant of fBm on one axis: Gamma(2H+1) sin(pi H) / (2 pi).
inline double fbm_spectral_constant(double h) {
  return std::tgamma(2.0 * h + 1.0) * std::sin(std::numbers::pi * h) / (2.0 * std::numbers::pi);
}

/// E u(t,x) u(s,x) (same spatial point, d in {1,2}) from the spectral
/// representation integrated in closed form over |xi|.
inline double oracle_covariance_same_point(const WaveConfig& c, double t, double s, const OracleOptions& opt = {}) {
  if (c.d < 1 || c.d > 2) throw UnsupportedError("same-point oracle covers d in {1,2}");
  if (t < 0.0 || s < 0.0) throw DomainError("oracle times must be nonnegative");
  if (t == 0.0 || s == 0.0) return 0.0;
  const auto b = beta_exponent(c);
  const double gamma = 2.0 - b.beta;
  double ch = 1.0;
  for (double h : c.H0) ch *= fbm_spectral_constant(h);
  const double theta = c.d == 1 ? 2.0 : 2.0 * beta_function(1.0 - c.H0[0], 1.0 - c.H0[1]);
  const double cg = std::numbers::pi / (2.0 * std::tgamma(1.0 + gamma) * std::sin(std::numbers::pi * gamma / 2.0));
  const double k = ch * theta * 0.5 * cg;
  auto f = [&](double u, double v) {
    const double a = t - u, bb = s - v;
    return k * (std::pow(a + bb, gamma) - std::pow(std::abs(a - bb), gamma));
  };
  const std::vector<detail::Kink> kinks{{1.0, s - t}};
  const double alpha = c.H * (2.0 * c.H - 1.0);
  return detail::converged(
      [&](std::size_t panels) { return alpha * detail::time_double_integral(c.H, t, s, f, kinks, panels, opt.points); },
      opt, "wave covariance oracle");
}

inline double oracle_covariance(const WaveConfig& c, const SpaceTimePoint& p1, const SpaceTimePoint& p2,
                                const OracleOptions& opt = {}) {
  c.validate();
  if (!beta_exponent(c).exists) throw ExistenceError("no mild solution: beta >= 2H+1");
  if (p1.x.size() != c.d || p2.x.size() != c.d) throw DimensionError("point dimension differs from d");
  if (c.d == 1) return oracle_covariance_time_domain(c, p1, p2, opt);
  if (!(p1.x == p2.x)) throw UnsupportedError("d = 2 oracle covers pairs at the same spatial point");
  return oracle_covariance_same_point(c, p1.t, p2.t, opt);
}

inline double solution_variance_oracle(const WaveConfig& c, double t, const MultiIndex& x, const OracleOptions& opt = {}) {
  const SpaceTimePoint p{t, x};
  return oracle_covariance(c, p, p, opt);
}

struct CovarianceMatrixResult {
  Eigen::Matrix2d cov;
  double determinant = 0.0;
  double threshold = 0.0;  // 1e-10 * c11 * c22
  bool positive = false;   // determinant > threshold
  bool psd = false;        // determinant >= -threshold
};

inline CovarianceMatrixResult solution_covariance_matrix(const WaveConfig& c, const SpaceTimePoint& p1,
                                                         const SpaceTimePoint& p2, const OracleOptions& opt = {}) {
  CovarianceMatrixResult r;
  const double c11 = oracle_covariance(c, p1, p1, opt);
  const double c22 = oracle_covariance(c, p2, p2, opt);
  const double c12 = oracle_covariance(c, p1, p2, opt);
  r.cov << c11, c12, c12, c22;
  r.determinant = c11 * c22 - c12 * c12;
  r.threshold = 1e-10 * c11 * c22;
  r.positive = r.determinant > r.threshold;
  r.psd = r.determinant >= -r.threshold;
  return r;
}

enum class ScalingAxis { time, space };

struct IncrementScalingReport {
  RegressionReport regression;  // theory = 2H + 1 - beta
  double c1 = 0.0;              // min of E|du|^2 / delta^{exponent}
  double c2 = 0.0;              // max of the same ratio
  std::vector<double> moments;
  std::vector<double> moment_se;
};

/// Monte Carlo E|u(p) - u(p')|^2 over separations delta along one axis,
/// p = base and p' = base shifted back in time or forward in x_1.
inline IncrementScalingReport verify_increment_scaling(const WaveSolver& solver, ScalingAxis axis,
                                                       const SpaceTimePoint& base, const std::vector<double>& deltas,
                                                       std::size_t replicates, std::uint64_t seed,
                                                       std::size_t threads = 0) {
  const auto& c = solver.config();
  const auto b = beta_exponent(c);
  if (!b.regular)
    throw ExistenceError("increment scaling needs 2H-1 < beta < min(d, 2H+1); beta = " + std::to_string(b.beta));
  std::vector<SpaceTimePoint> pts{base};
  for (double dl : deltas) {
    auto p = base;
    if (axis == ScalingAxis::time)
      p.t -= dl;
    else
      p.x[0] += dl;
    pts.push_back(p);
  }
  const auto rows = run_replicates(replicates, threads, [&](std::size_t r) { return solver.sample_points(seed, r, pts); });
  IncrementScalingReport rep;
  const double e = b.bound - b.beta;
  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = 0.0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    std::vector<double> sq(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double du = rows[r][0] - rows[r][k + 1];
      sq[r] = du * du;
    }
    const auto ms = mean_se(sq);
    rep.moments.push_back(ms.mean);
    rep.moment_se.push_back(ms.se);
    const double ratio = ms.mean / std::pow(deltas[k], e);
    rep.c1 = std::min(rep.c1, ratio);
    rep.c2 = std::max(rep.c2, ratio);
  }
  rep.regression = scaling_regression(deltas, rep.moments);
  rep.regression.theory = e;
  return rep;
}

/// Oracle E|u(p) - u(p')|^2 for the same separations (d = 1).
inline std::vector<double> oracle_increment_moments(const WaveConfig& c, ScalingAxis axis, const SpaceTimePoint& base,
                                                    const std::vector<double>& deltas, const OracleOptions& opt = {}) {
  std::vector<double> out;
  const double v0 = oracle_covariance(c, base, base, opt);
  for (double dl : deltas) {
    auto p = base;
    if (axis == ScalingAxis::time)
      p.t -= dl;
    else
      p.x[0] += dl;
    out.push_back(v0 + oracle_covariance(c, p, p, opt) - 2.0 * oracle_covariance(c, base, p, opt));
  }
  return out;
}

}  // namespace hfield
