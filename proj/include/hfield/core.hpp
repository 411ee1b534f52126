#pragma once

// Multi-index arithmetic, grid geometry, generalized rectangle increments and
// the sampled-field container shared by every other module.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hfield/errors.hpp"

namespace hfield {

/// Fixed-length vector of reals with componentwise operations.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<double> entries) : v_(std::move(entries)) {}
  MultiIndex(std::initializer_list<double> entries) : v_(entries) {}
  static MultiIndex filled(std::size_t d, double value) {
    return MultiIndex(std::vector<double>(d, value));
  }

  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }
  const std::vector<double>& entries() const noexcept { return v_; }

  double product() const {
    return std::accumulate(v_.begin(), v_.end(), 1.0, std::multiplies<>());
  }
  double sum() const { return std::accumulate(v_.begin(), v_.end(), 0.0); }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
  }
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
  }
  friend MultiIndex operator*(const MultiIndex& a, const MultiIndex& b) {
    return zip(a, b, [](double x, double y) { return x * y; });
  }
  friend MultiIndex operator/(const MultiIndex& a, const MultiIndex& b) {
    return zip(a, b, [](double x, double y) { return x / y; });
  }
  friend MultiIndex operator*(double s, const MultiIndex& a) {
    MultiIndex r = a;
    for (auto& x : r.v_) x *= s;
    return r;
  }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  /// a^b = prod a_i^{b_i}.
  double pow(const MultiIndex& b) const {
    require_same(*this, b);
    double r = 1.0;
    for (std::size_t i = 0; i < v_.size(); ++i) r *= std::pow(v_[i], b.v_[i]);
    return r;
  }

  /// Componentwise a < b (all axes).
  bool all_less(const MultiIndex& b) const {
    require_same(*this, b);
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (!(v_[i] < b.v_[i])) return false;
    return true;
  }
  bool all_less_equal(const MultiIndex& b) const {
    require_same(*this, b);
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (!(v_[i] <= b.v_[i])) return false;
    return true;
  }

  static void require_same(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size())
      throw DimensionError("multi-index length mismatch: " + std::to_string(a.size()) +
                           " vs " + std::to_string(b.size()));
  }

 private:
  template <class Op>
  static MultiIndex zip(const MultiIndex& a, const MultiIndex& b, Op op) {
    require_same(a, b);
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = op(a.v_[i], b.v_[i]);
    return MultiIndex(std::move(r));
  }
  std::vector<double> v_;
};

/// Hurst multi-index H in (1/2,1)^d together with the Hermite order q >= 1.
class HurstIndex {
 public:
  HurstIndex(std::vector<double> h, int q) : h_(std::move(h)), q_(q) {
    if (h_.empty()) throw ParameterError("Hurst index must have at least one axis");
    if (q_ < 1) throw ParameterError("order q must satisfy q >= 1 (got " + std::to_string(q_) + ")");
    for (std::size_t i = 0; i < h_.size(); ++i) {
      if (!(h_[i] > 0.5 && h_[i] < 1.0))
        throw ParameterError("Hurst component H_" + std::to_string(i + 1) + " = " +
                             std::to_string(h_[i]) + " violates 1/2 < H < 1");
    }
  }

  std::size_t dims() const noexcept { return h_.size(); }
  int q() const noexcept { return q_; }
  double operator[](std::size_t i) const { return h_[i]; }
  const std::vector<double>& values() const noexcept { return h_; }
  MultiIndex as_multi_index() const { return MultiIndex(h_); }
  double sum() const { return std::accumulate(h_.begin(), h_.end(), 0.0); }

  /// Hurst parameter of the fractional Gaussian noise whose q-th Hermite
  /// variations approximate this sheet: 1 + (H_i - 1)/q.
  double transformed(std::size_t i) const { return 1.0 + (h_[i] - 1.0) / q_; }

  friend bool operator==(const HurstIndex&, const HurstIndex&) = default;

 private:
  std::vector<double> h_;
  int q_;
};

/// Rectangular node grid: origin, extent and number of cells per axis.
class GridSpec {
 public:
  GridSpec(MultiIndex origin, MultiIndex extent, std::vector<std::size_t> cells)
      : origin_(std::move(origin)), extent_(std::move(extent)), cells_(std::move(cells)) {
    MultiIndex::require_same(origin_, extent_);
    if (cells_.size() != origin_.size())
      throw DimensionError("cells_per_axis length differs from grid dimension");
    if (origin_.size() == 0) throw DimensionError("grid needs at least one axis");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (!(extent_[i] > 0.0) || !std::isfinite(extent_[i]))
        throw ParameterError("grid extent must be positive and finite on every axis");
      if (!std::isfinite(origin_[i])) throw ParameterError("grid origin must be finite");
      if (!(spacing(i) > 0.0)) throw ParameterError("grid cell width underflows to zero");
    }
    strides_.assign(cells_.size(), 1);
    for (std::size_t i = cells_.size() - 1; i > 0; --i) strides_[i - 1] = strides_[i] * (cells_[i] + 1);
  }

  /// Unit-spaced grid helper: [0, extent] with `cells` cells per axis.
  static GridSpec from_origin_zero(const MultiIndex& extent, std::vector<std::size_t> cells) {
    return GridSpec(MultiIndex::filled(extent.size(), 0.0), extent, std::move(cells));
  }

  std::size_t dims() const noexcept { return cells_.size(); }
  const MultiIndex& origin() const noexcept { return origin_; }
  const MultiIndex& extent() const noexcept { return extent_; }
  const std::vector<std::size_t>& cells() const noexcept { return cells_; }
  std::size_t cells(std::size_t axis) const { return cells_[axis]; }
  std::size_t nodes(std::size_t axis) const { return cells_[axis] + 1; }
  // A zero-cell axis holds a single node at the origin.
  double spacing(std::size_t axis) const {
    return extent_[axis] / static_cast<double>(std::max<std::size_t>(cells_[axis], 1));
  }
  double node_coord(std::size_t axis, std::size_t k) const {
    // Exact at both ends of the axis.
    if (k == cells_[axis]) return origin_[axis] + extent_[axis];
    return origin_[axis] + static_cast<double>(k) * spacing(axis);
  }
  MultiIndex upper() const { return origin_ + extent_; }

  std::size_t node_count() const {
    std::size_t n = 1;
    for (auto c : cells_) n *= c + 1;
    return n;
  }
  std::size_t cell_count() const {
    std::size_t n = 1;
    for (auto c : cells_) n *= c;
    return n;
  }
  double cell_volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dims(); ++i) v *= spacing(i);
    return v;
  }
  std::vector<std::size_t> node_shape() const {
    std::vector<std::size_t> s(cells_);
    for (auto& x : s) ++x;
    return s;
  }

  /// Row-major flat index of a node (last axis fastest).
  std::size_t flat_node(std::span<const std::size_t> idx) const {
    if (idx.size() != dims()) throw DimensionError("node index length mismatch");
    std::size_t f = 0;
    for (std::size_t i = 0; i < dims(); ++i) f += idx[i] * strides_[i];
    return f;
  }
  std::vector<std::size_t> unflatten_node(std::size_t flat) const {
    std::vector<std::size_t> idx(dims());
    for (std::size_t i = 0; i < dims(); ++i) {
      idx[i] = flat / strides_[i];
      flat %= strides_[i];
    }
    return idx;
  }
  MultiIndex node_point(std::span<const std::size_t> idx) const {
    std::vector<double> p(dims());
    for (std::size_t i = 0; i < dims(); ++i) p[i] = node_coord(i, idx[i]);
    return MultiIndex(std::move(p));
  }

  /// Node index of a coordinate on one axis, if it lies on a node.
  std::optional<std::size_t> snap(std::size_t axis, double coord) const {
    const double h = spacing(axis);
    const double k = (coord - origin_[axis]) / h;
    const double kr = std::round(k);
    if (kr < 0.0 || kr > static_cast<double>(cells_[axis])) return std::nullopt;
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k))) return std::nullopt;
    return static_cast<std::size_t>(kr);
  }
  std::vector<std::size_t> snap_point(const MultiIndex& p) const {
    if (p.size() != dims()) throw DimensionError("point dimension differs from grid dimension");
    std::vector<std::size_t> idx(dims());
    for (std::size_t i = 0; i < dims(); ++i) {
      auto k = snap(i, p[i]);
      if (!k)
        throw SnapError("coordinate " + std::to_string(p[i]) + " on axis " + std::to_string(i) +
                        " is not a grid node");
      idx[i] = *k;
    }
    return idx;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.origin_ == b.origin_ && a.extent_ == b.extent_ && a.cells_ == b.cells_;
  }

 private:
  MultiIndex origin_;
  MultiIndex extent_;
  std::vector<std::size_t> cells_;
  std::vector<std::size_t> strides_;
};

enum class GeneratorTag : std::uint8_t { kernel = 0, hermite_variation = 1, gaussian_exact = 2 };

inline const char* to_string(GeneratorTag t) {
  switch (t) {
    case GeneratorTag::kernel: return "kernel";
    case GeneratorTag::hermite_variation: return "hermite_variation";
    case GeneratorTag::gaussian_exact: return "gaussian_exact";
  }
  return "unknown";
}

namespace field_flags {
inline constexpr std::uint8_t none = 0;
// Leading axis is time (wave solutions); remaining axes are space.
inline constexpr std::uint8_t time_axis = 1;
}  // namespace field_flags

/// A sampled scalar field on the nodes of a grid with its provenance.
class FieldRealization {
 public:
  FieldRealization(GridSpec grid, std::vector<double> values, HurstIndex hurst, std::uint64_t seed,
                   GeneratorTag tag, std::uint8_t flags = field_flags::none)
      : grid_(std::move(grid)),
        values_(std::move(values)),
        hurst_(std::move(hurst)),
        seed_(seed),
        tag_(tag),
        flags_(flags) {
    if (values_.size() != grid_.node_count())
      throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid has " +
                           std::to_string(grid_.node_count()) + " nodes");
    if (hurst_.dims() != grid_.dims()) throw DimensionError("Hurst index and grid dimension differ");
    for (double v : values_)
      if (std::isnan(v)) throw DomainError("NaN in field payload");
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  const HurstIndex& hurst() const noexcept { return hurst_; }
  std::uint64_t seed() const noexcept { return seed_; }
  GeneratorTag tag() const noexcept { return tag_; }
  std::uint8_t flags() const noexcept { return flags_; }

  double at(std::span<const std::size_t> idx) const { return values_[grid_.flat_node(idx)]; }
  double at(const MultiIndex& point) const {
    const auto idx = grid_.snap_point(point);
    return at(std::span<const std::size_t>(idx));
  }

  friend bool operator==(const FieldRealization&, const FieldRealization&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  HurstIndex hurst_;
  std::uint64_t seed_;
  GeneratorTag tag_;
  std::uint8_t flags_;
};

/// Alternating corner sum over a d-dimensional rectangle. Corners are indexed
/// by r in {0,1}^d in lexicographic order with r_1 most significant and r = 0
/// the low corner; the corner with all r_i = 1 carries sign +1.
inline double generalized_increment(std::span<const double> corners, std::size_t d) {
  if (d == 0 || d >= 8 * sizeof(std::size_t) || corners.size() != (std::size_t{1} << d))
    throw DimensionError("generalized_increment needs exactly 2^d corner values (d = " +
                         std::to_string(d) + ", got " + std::to_string(corners.size()) + ")");
  double acc = 0.0;
  for (std::size_t r = 0; r < corners.size(); ++r) {
    const int ones = std::popcount(r);
    acc += ((static_cast<int>(d) - ones) % 2 == 0) ? corners[r] : -corners[r];
  }
  return acc;
}

/// Generalized increment of a field over the grid-aligned rectangle [lo, hi].
inline double increment_over_rectangle(const FieldRealization& field, const MultiIndex& lo,
                                       const MultiIndex& hi) {
  const auto& g = field.grid();
  if (!lo.all_less_equal(hi)) throw DomainError("increment_over_rectangle requires lo <= hi");
  const auto ilo = g.snap_point(lo);
  const auto ihi = g.snap_point(hi);
  const std::size_t d = g.dims();
  std::vector<double> corners(std::size_t{1} << d);
  std::vector<std::size_t> idx(d);
  for (std::size_t r = 0; r < corners.size(); ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const bool high = (r >> (d - 1 - i)) & 1u;
      idx[i] = high ? ihi[i] : ilo[i];
    }
    corners[r] = field.at(std::span<const std::size_t>(idx));
  }
  return generalized_increment(corners, d);
}

}  // namespace hfield
