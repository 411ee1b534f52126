#pragma once

// Dense row-major tensors and the mode products used by the separable
// samplers (apply one matrix along one axis of a d-way array).

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"

namespace hfield {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::size_t shape_size(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

/// y = x x_axis K : contracts axis `axis` of x (length K.cols()) with K,
/// producing an axis of length K.rows().
inline std::vector<double> mode_product(std::span<const double> x, std::vector<std::size_t>& shape,
                                        std::size_t axis, const Eigen::MatrixXd& k) {
  if (axis >= shape.size()) throw DimensionError("mode_product axis out of range");
  if (static_cast<std::size_t>(k.cols()) != shape[axis])
    throw DimensionError("mode_product matrix columns differ from axis length");
  if (x.size() != shape_size(shape)) throw DimensionError("mode_product tensor size mismatch");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const auto n = static_cast<Eigen::Index>(shape[axis]);
  const auto m = k.rows();
  std::vector<double> y(outer * static_cast<std::size_t>(m) * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix> xb(x.data() + o * shape[axis] * inner, n, static_cast<Eigen::Index>(inner));
    Eigen::Map<RowMatrix> yb(y.data() + o * static_cast<std::size_t>(m) * inner, m,
                             static_cast<Eigen::Index>(inner));
    yb.noalias() = k * xb;
  }
  shape[axis] = static_cast<std::size_t>(m);
  return y;
}

/// Applies one matrix per axis in order.
inline std::vector<double> multi_mode_product(std::vector<double> x, std::vector<std::size_t> shape,
                                              std::span<const Eigen::MatrixXd> mats) {
  if (mats.size() != shape.size()) throw DimensionError("one matrix per axis required");
  for (std::size_t a = 0; a < shape.size(); ++a) x = mode_product(x, shape, a, mats[a]);
  return x;
}

/// In-place prefix sums along every axis; with a leading zero hyperplane this
/// turns cell increments into node values.
inline std::vector<double> cumulative_nodes(std::span<const double> cells,
                                            std::span<const std::size_t> cell_shape) {
  if (cells.size() != shape_size(cell_shape)) throw DimensionError("cumulative_nodes size mismatch");
  const std::size_t d = cell_shape.size();
  std::vector<std::size_t> nshape(cell_shape.begin(), cell_shape.end());
  for (auto& s : nshape) ++s;
  std::vector<double> out(shape_size(nshape), 0.0);
  // Scatter cells to node positions shifted by one on every axis.
  std::vector<std::size_t> nstride(d, 1), cstride(d, 1);
  for (std::size_t i = d - 1; i > 0; --i) {
    nstride[i - 1] = nstride[i] * nshape[i];
    cstride[i - 1] = cstride[i] * cell_shape[i];
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t rem = c, f = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t k = rem / cstride[i];
      rem %= cstride[i];
      f += (k + 1) * nstride[i];
    }
    out[f] = cells[c];
  }
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t len = nshape[a], st = nstride[a];
    const std::size_t block = len * st;
    for (std::size_t base = 0; base < out.size(); base += block)
      for (std::size_t off = 0; off < st; ++off)
        for (std::size_t k = 1; k < len; ++k) out[base + off + k * st] += out[base + off + (k - 1) * st];
  }
  return out;
}

/// Generalized increments of a node array over every grid cell (successive
/// first differences along each axis).
inline std::vector<double> cell_increments(std::span<const double> nodes,
                                           std::span<const std::size_t> node_shape) {
  if (nodes.size() != shape_size(node_shape)) throw DimensionError("cell_increments size mismatch");
  std::vector<double> cur(nodes.begin(), nodes.end());
  std::vector<std::size_t> shape(node_shape.begin(), node_shape.end());
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (shape[a] < 2) throw DimensionError("cell_increments needs at least two nodes per axis");
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < a; ++i) outer *= shape[i];
    for (std::size_t i = a + 1; i < shape.size(); ++i) inner *= shape[i];
    const std::size_t n = shape[a];
    std::vector<double> next(outer * (n - 1) * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t in = 0; in < inner; ++in)
          next[(o * (n - 1) + k) * inner + in] = cur[(o * n + k + 1) * inner + in] - cur[(o * n + k) * inner + in];
    cur = std::move(next);
    shape[a] = n - 1;
  }
  return cur;
}

inline std::vector<double> cell_increments(const FieldRealization& field) {
  const auto shape = field.grid().node_shape();
  return cell_increments(field.values(), shape);
}

}  // namespace hfield
