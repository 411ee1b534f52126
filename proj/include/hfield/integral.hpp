#pragma once

// Integrands of the Hermite sheet: step functions, the inner product of the
// space H, |H| membership, Wiener integrals against sampled fields.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"
#include "hfield/randgen.hpp"
#include "hfield/tensor.hpp"

namespace hfield {

struct StepTerm {
  double coefficient = 0.0;
  MultiIndex lo;
  MultiIndex hi;
};

/// Finite linear combination of rectangle indicators sum_l a_l 1_{[lo_l, hi_l]}.
class StepFunction {
 public:
  explicit StepFunction(std::size_t dims) : d_(dims) {
    if (d_ == 0) throw DimensionError("step function needs at least one axis");
  }
  StepFunction(std::size_t dims, std::vector<StepTerm> terms) : StepFunction(dims) {
    for (auto& t : terms) add(t.coefficient, std::move(t.lo), std::move(t.hi));
  }

  StepFunction& add(double a, MultiIndex lo, MultiIndex hi) {
    if (lo.size() != d_ || hi.size() != d_) throw DimensionError("step term dimension mismatch");
    if (!lo.all_less(hi)) throw DomainError("step term rectangle needs lo < hi on every axis");
    if (!std::isfinite(a)) throw DomainError("step coefficient must be finite");
    terms_.push_back({a, std::move(lo), std::move(hi)});
    return *this;
  }

  std::size_t dims() const noexcept { return d_; }
  const std::vector<StepTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// Half-open evaluation on [lo, hi).
  double operator()(const MultiIndex& u) const {
    double v = 0.0;
    for (const auto& t : terms_) {
      bool in = true;
      for (std::size_t i = 0; i < d_ && in; ++i) in = u[i] >= t.lo[i] && u[i] < t.hi[i];
      if (in) v += t.coefficient;
    }
    return v;
  }

  StepFunction scaled(double a) const {
    StepFunction r(d_);
    for (const auto& t : terms_) r.add(a * t.coefficient, t.lo, t.hi);
    return r;
  }

  static StepFunction indicator(const MultiIndex& lo, const MultiIndex& hi) {
    StepFunction f(lo.size());
    f.add(1.0, lo, hi);
    return f;
  }

 private:
  std::size_t d_;
  std::vector<StepTerm> terms_;
};

/// Real function on R^d with a declared bounded support box.
struct IntegrandFunction {
  std::function<double(const MultiIndex&)> fn;
  MultiIndex support_lo;
  MultiIndex support_hi;

  IntegrandFunction(std::function<double(const MultiIndex&)> f, MultiIndex lo, MultiIndex hi)
      : fn(std::move(f)), support_lo(std::move(lo)), support_hi(std::move(hi)) {
    MultiIndex::require_same(support_lo, support_hi);
    if (!support_lo.all_less(support_hi)) throw DomainError("integrand support box must have lo < hi");
    for (std::size_t i = 0; i < support_lo.size(); ++i)
      if (!std::isfinite(support_lo[i]) || !std::isfinite(support_hi[i]))
        throw DomainError("integrand support box must be finite");
  }
  explicit IntegrandFunction(const StepFunction& f)
      : IntegrandFunction([f](const MultiIndex& u) { return f(u); }, bounding_lo(f), bounding_hi(f)) {}

  std::size_t dims() const noexcept { return support_lo.size(); }
  double operator()(const MultiIndex& u) const { return fn(u); }

 private:
  static MultiIndex bounding_lo(const StepFunction& f) {
    if (f.empty()) return MultiIndex::filled(f.dims(), 0.0);
    MultiIndex lo = f.terms().front().lo;
    for (const auto& t : f.terms())
      for (std::size_t i = 0; i < f.dims(); ++i) lo[i] = std::min(lo[i], t.lo[i]);
    return lo;
  }
  static MultiIndex bounding_hi(const StepFunction& f) {
    if (f.empty()) return MultiIndex::filled(f.dims(), 1.0);
    MultiIndex hi = f.terms().front().hi;
    for (const auto& t : f.terms())
      for (std::size_t i = 0; i < f.dims(); ++i) hi[i] = std::max(hi[i], t.hi[i]);
    return hi;
  }
};

/// H(2H-1) * int_a^b int_c^e |u-v|^{2H-2} dv du
///   = ( |b-c|^{2H} + |a-e|^{2H} - |b-e|^{2H} - |a-c|^{2H} ) / 2.
inline double interval_pair_kernel(double h, double a, double b, double c, double e) {
  const double x = 2.0 * h;
  return 0.5 * (std::pow(std::abs(b - c), x) + std::pow(std::abs(a - e), x) - std::pow(std::abs(b - e), x) -
                std::pow(std::abs(a - c), x));
}

inline double inner_product_H(const StepFunction& f, const StepFunction& g, const HurstIndex& hurst) {
  if (f.dims() != hurst.dims() || g.dims() != hurst.dims())
    throw DimensionError("step function dimension differs from Hurst index");
  double acc = 0.0;
  for (const auto& s : f.terms())
    for (const auto& t : g.terms()) {
      double k = s.coefficient * t.coefficient;
      for (std::size_t i = 0; i < hurst.dims() && k != 0.0; ++i)
        k *= interval_pair_kernel(hurst[i], s.lo[i], s.hi[i], t.lo[i], t.hi[i]);
      acc += k;
    }
  return acc;
}

struct QuadratureOptions {
  std::size_t cells_per_axis = 256;  // base mesh; the check also uses twice this
  double rel_tol = 1e-3;             // allowed relative change under mesh halving
};

namespace detail {

struct CellMesh {
  MultiIndex lo;
  std::vector<double> h;
  std::vector<std::size_t> n;
};

inline CellMesh union_mesh(const MultiIndex& alo, const MultiIndex& ahi, const MultiIndex& blo, const MultiIndex& bhi,
                           std::size_t cells) {
  CellMesh m;
  m.lo = alo;
  for (std::size_t i = 0; i < alo.size(); ++i) {
    m.lo[i] = std::min(alo[i], blo[i]);
    const double hi = std::max(ahi[i], bhi[i]);
    m.n.push_back(cells);
    m.h.push_back((hi - m.lo[i]) / static_cast<double>(cells));
  }
  return m;
}

inline std::vector<double> midpoint_values(const std::function<double(const MultiIndex&)>& f, const CellMesh& m) {
  const std::size_t d = m.n.size();
  std::vector<double> v(shape_size(m.n));
  std::vector<std::size_t> idx(d, 0);
  MultiIndex u = m.lo;
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) u[i] = m.lo[i] + (static_cast<double>(idx[i]) + 0.5) * m.h[i];
    v[k] = f(u);
    if (!std::isfinite(v[k])) throw DomainError("integrand is not finite on its support");
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < m.n[i]) break;
      idx[i] = 0;
    }
  }
  return v;
}

/// sum_{c,c'} F_c G_c' prod_i K_i(c_i, c'_i) with the cell-pair kernel of a
/// uniform mesh, K_i(k) = h^{2H} r_H(k) (Toeplitz).
inline double cell_quadratic_form(const std::vector<double>& fv, const std::vector<double>& gv, const CellMesh& m,
                                  const HurstIndex& hurst) {
  std::vector<Eigen::MatrixXd> mats;
  for (std::size_t i = 0; i < m.n.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(m.n[i]);
    Eigen::MatrixXd k(n, n);
    const double scale = std::pow(m.h[i], 2.0 * hurst[i]);
    std::vector<double> r(m.n[i]);
    for (std::size_t j = 0; j < m.n[i]; ++j) r[j] = scale * fgn_covariance(hurst[i], static_cast<long long>(j));
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) k(a, b) = r[static_cast<std::size_t>(a > b ? a - b : b - a)];
    mats.push_back(std::move(k));
  }
  const auto kg = multi_mode_product(gv, m.n, mats);
  double acc = 0.0;
  for (std::size_t k = 0; k < fv.size(); ++k) acc += fv[k] * kg[k];
  return acc;
}

inline double quadrature_inner(const IntegrandFunction& f, const IntegrandFunction& g, const HurstIndex& hurst,
                               std::size_t cells, bool absolute) {
  const auto mesh = union_mesh(f.support_lo, f.support_hi, g.support_lo, g.support_hi, cells);
  auto fv = midpoint_values(f.fn, mesh);
  auto gv = midpoint_values(g.fn, mesh);
  if (absolute) {
    for (auto& x : fv) x = std::abs(x);
    for (auto& x : gv) x = std::abs(x);
  }
  return cell_quadratic_form(fv, gv, mesh, hurst);
}

}  // namespace detail

/// General integrands: midpoint projection onto a uniform cell mesh over the
/// union of the supports, exact cell-pair kernel, accepted when the value is
/// stable under halving the mesh width.
inline double inner_product_H(const IntegrandFunction& f, const IntegrandFunction& g, const HurstIndex& hurst,
                              const QuadratureOptions& opt = {}) {
  if (f.dims() != hurst.dims() || g.dims() != hurst.dims())
    throw DimensionError("integrand dimension differs from Hurst index");
  const double coarse = detail::quadrature_inner(f, g, hurst, opt.cells_per_axis, false);
  const double fine = detail::quadrature_inner(f, g, hurst, 2 * opt.cells_per_axis, false);
  const double scale = std::max({std::abs(fine), std::abs(coarse), 1e-300});
  const double change = std::abs(fine - coarse) / scale;
  if (change > opt.rel_tol)
    throw AccuracyError("inner product quadrature not converged under mesh halving", fine, change);
  return fine;
}

inline double inner_product_H(const StepFunction& f, const IntegrandFunction& g, const HurstIndex& hurst,
                              const QuadratureOptions& opt = {}) {
  return inner_product_H(IntegrandFunction(f), g, hurst, opt);
}
inline double inner_product_H(const IntegrandFunction& f, const StepFunction& g, const HurstIndex& hurst,
                              const QuadratureOptions& opt = {}) {
  return inner_product_H(f, IntegrandFunction(g), hurst, opt);
}

inline double norm_H(const StepFunction& f, const HurstIndex& hurst) {
  return std::sqrt(std::max(0.0, inner_product_H(f, f, hurst)));
}
inline double norm_H(const IntegrandFunction& f, const HurstIndex& hurst, const QuadratureOptions& opt = {}) {
  return std::sqrt(std::max(0.0, inner_product_H(f, f, hurst, opt)));
}

struct MembershipResult {
  double value = 0.0;          // prod H(2H-1) * int int |f(u)||f(v)| prod |u_i - v_i|^{2H_i - 2}
  double coarse_value = 0.0;   // same on the mesh of double width
  double relative_change = 0.0;
  bool inconclusive = false;   // not stable under mesh halving at the stated tolerance
};

inline MembershipResult check_membership_absH(const IntegrandFunction& f, const HurstIndex& hurst,
                                              std::size_t cells_per_axis = 256, double rel_tol = 0.01) {
  if (f.dims() != hurst.dims()) throw DimensionError("integrand dimension differs from Hurst index");
  MembershipResult r;
  r.coarse_value = detail::quadrature_inner(f, f, hurst, cells_per_axis, true);
  r.value = detail::quadrature_inner(f, f, hurst, 2 * cells_per_axis, true);
  r.relative_change = std::abs(r.value - r.coarse_value) / std::max(std::abs(r.value), 1e-300);
  r.inconclusive = !std::isfinite(r.value) || r.relative_change > rel_tol;
  return r;
}

/// sum_l a_l * dZ over [lo_l, hi_l]; every corner must be a grid node.
inline double wiener_integral(const StepFunction& f, const FieldRealization& field) {
  if (f.dims() != field.grid().dims()) throw DimensionError("step function and field dimensions differ");
  double acc = 0.0;
  for (const auto& t : f.terms()) acc += t.coefficient * increment_over_rectangle(field, t.lo, t.hi);
  return acc;
}

/// Random node-aligned step function with `terms` rectangles and standard
/// normal coefficients.
inline StepFunction random_step_function(const GridSpec& grid, std::size_t terms, RngStream& rng) {
  const std::size_t d = grid.dims();
  StepFunction f(d);
  for (std::size_t l = 0; l < terms; ++l) {
    std::vector<double> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t n = grid.cells(i);
      if (n == 0) throw DomainError("random step function needs at least one cell per axis");
      auto a = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n + 1));
      auto b = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n + 1));
      a = std::min(a, n);
      b = std::min(b, n);
      if (a == b) {
        if (b < n)
          ++b;
        else
          --a;
      }
      if (a > b) std::swap(a, b);
      lo[i] = grid.node_coord(i, a);
      hi[i] = grid.node_coord(i, b);
    }
    f.add(rng.normal(), MultiIndex(lo), MultiIndex(hi));
  }
  return f;
}

/// sum_{l,m} a_l a_m C(rect_l, rect_m) for a rectangle covariance C.
template <class RectCov>
double step_quadratic_form(const StepFunction& f, RectCov&& cov) {
  double acc = 0.0;
  for (const auto& s : f.terms())
    for (const auto& t : f.terms()) acc += s.coefficient * t.coefficient * cov(s.lo, s.hi, t.lo, t.hi);
  return acc;
}

/// Cell-midpoint step approximation of f on the cells of grid.
inline StepFunction project_to_steps(const IntegrandFunction& f, const GridSpec& grid) {
  if (f.dims() != grid.dims()) throw DimensionError("integrand and grid dimensions differ");
  const auto up = grid.upper();
  for (std::size_t i = 0; i < grid.dims(); ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(up[i]));
    if (f.support_lo[i] < grid.origin()[i] - tol || f.support_hi[i] > up[i] + tol)
      throw DomainError("integrand support exceeds the grid on axis " + std::to_string(i));
    if (grid.cells(i) == 0) throw DomainError("projection grid needs at least one cell per axis");
  }
  const std::size_t d = grid.dims();
  StepFunction s(d);
  const auto& cells = grid.cells();
  std::vector<std::size_t> idx(d, 0);
  const std::size_t n = grid.cell_count();
  MultiIndex lo = grid.origin(), hi = grid.origin(), mid = grid.origin();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = grid.node_coord(i, idx[i]);
      hi[i] = grid.node_coord(i, idx[i] + 1);
      mid[i] = 0.5 * (lo[i] + hi[i]);
    }
    const double v = f(mid);
    if (!std::isfinite(v)) throw DomainError("integrand is not finite on its support");
    if (v != 0.0) s.add(v, lo, hi);
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < cells[i]) break;
      idx[i] = 0;
    }
  }
  return s;
}

/// ||f - project_to_steps(f, grid)||_H, evaluated on a mesh `oversample`
/// times finer than grid.
inline double projection_error_H(const IntegrandFunction& f, const GridSpec& grid, const HurstIndex& hurst,
                                 std::size_t oversample = 16) {
  const auto steps = project_to_steps(f, grid);
  detail::CellMesh m;
  m.lo = grid.origin();
  for (std::size_t i = 0; i < grid.dims(); ++i) {
    m.n.push_back(grid.cells(i) * oversample);
    m.h.push_back(grid.extent()[i] / static_cast<double>(m.n.back()));
  }
  auto diff = [&](const MultiIndex& u) { return f(u) - steps(u); };
  const auto v = detail::midpoint_values(diff, m);
  return std::sqrt(std::max(0.0, detail::cell_quadratic_form(v, v, m, hurst)));
}

/// One term per line: coefficient, then d low corner and d high corner coordinates.
inline void write_step_csv(const StepFunction& f, std::ostream& os) {
  os << "coefficient";
  for (std::size_t i = 0; i < f.dims(); ++i) os << ",lo" << i + 1;
  for (std::size_t i = 0; i < f.dims(); ++i) os << ",hi" << i + 1;
  os << '\n' << std::setprecision(17);
  for (const auto& t : f.terms()) {
    os << t.coefficient;
    for (double x : t.lo) os << ',' << x;
    for (double x : t.hi) os << ',' << x;
    os << '\n';
  }
}

inline StepFunction read_step_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty step-function CSV");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 3 || (cols - 1) % 2 != 0) throw FormatError("step-function CSV header has the wrong column count");
  const std::size_t d = (cols - 1) / 2;
  StepFunction f(d);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != cols) throw FormatError("step-function CSV row has the wrong column count");
    std::vector<double> lo(v.begin() + 1, v.begin() + 1 + static_cast<std::ptrdiff_t>(d));
    std::vector<double> hi(v.begin() + 1 + static_cast<std::ptrdiff_t>(d), v.end());
    f.add(v[0], MultiIndex(lo), MultiIndex(hi));
  }
  return f;
}

}  // namespace hfield
