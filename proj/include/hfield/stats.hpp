#pragma once

// Occupation measures and local times of sampled paths, and the sufficiency
// integral of the anisotropic metric.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <iomanip>
#include <string>
#include <vector>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"
#include "hfield/quadrature.hpp"
#include "hfield/regression.hpp"

namespace hfield {

/// Node-aligned parameter box I = [lo, hi] inside a field's grid.
struct ParameterBox {
  MultiIndex lo;
  MultiIndex hi;
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

namespace detail {

struct BoxCells {
  std::vector<std::size_t> lo, hi;  // node indices; cells are [lo, hi)
  double cell_volume = 0.0;
  bool empty = false;
};

inline BoxCells box_cells(const FieldRealization& path, const ParameterBox& box) {
  const auto& g = path.grid();
  if (box.lo.size() != g.dims() || box.hi.size() != g.dims()) throw DimensionError("box dimension differs from path");
  if (!box.lo.all_less_equal(box.hi)) throw DomainError("parameter box needs lo <= hi");
  BoxCells b;
  b.lo = g.snap_point(box.lo);
  b.hi = g.snap_point(box.hi);
  b.cell_volume = g.cell_volume();
  for (std::size_t i = 0; i < g.dims(); ++i) b.empty = b.empty || b.lo[i] == b.hi[i];
  return b;
}

/// Calls f(low-corner value) once per cell of the box.
template <class F>
void for_each_cell_value(const FieldRealization& path, const BoxCells& b, F&& f) {
  if (b.empty) return;
  const std::size_t d = b.lo.size();
  std::vector<std::size_t> idx = b.lo;
  while (true) {
    f(path.at(std::span<const std::size_t>(idx)));
    std::size_t i = d;
    while (i-- > 0) {
      if (++idx[i] < b.hi[i]) break;
      idx[i] = b.lo[i];
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
}

}  // namespace detail

struct OccupationResult {
  double value = 0.0;
  bool empty_box = false;
};

/// lambda{ t in I : X_t in [a, b) } with the left-point (low-corner) cell rule.
inline OccupationResult occupation_measure(const FieldRealization& path, const ParameterBox& box, double a,
                                           double b) {
  const auto bc = detail::box_cells(path, box);
  OccupationResult r;
  r.empty_box = bc.empty;
  std::size_t hits = 0;
  detail::for_each_cell_value(path, bc, [&](double v) {
    if (v >= a && v < b) ++hits;
  });
  r.value = static_cast<double>(hits) * bc.cell_volume;
  return r;
}

/// int_I f(X_t) dt by the same cell rule.
template <class F>
double occupation_integral(const FieldRealization& path, const ParameterBox& box, F&& f) {
  const auto bc = detail::box_cells(path, box);
  double acc = 0.0;
  detail::for_each_cell_value(path, bc, [&](double v) { acc += f(v); });
  return acc * bc.cell_volume;
}

struct LocalTimeEstimate {
  ParameterBox box;
  std::vector<double> edges;    // nbins + 1
  double width = 0.0;
  std::vector<double> density;  // occupation density per bin
  std::vector<double> mass;     // occupation measure per bin
  double box_volume = 0.0;      // lambda(I) as covered by cells

  double center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
  double total_mass() const {
    double s = 0.0;
    for (double d : density) s += d * width;
    return s;
  }
  /// int L^2 dy of the histogram.
  double l2_integral() const {
    double s = 0.0;
    for (double d : density) s += d * d * width;
    return s;
  }
};

inline LocalTimeEstimate local_time_histogram(const FieldRealization& path, const ParameterBox& box, double lo,
                                              double hi, std::size_t nbins) {
  if (nbins == 0 || !(hi > lo)) throw ParameterError("local time needs at least one bin of positive width");
  const auto bc = detail::box_cells(path, box);
  LocalTimeEstimate e;
  e.box = box;
  e.width = (hi - lo) / static_cast<double>(nbins);
  for (std::size_t k = 0; k <= nbins; ++k) e.edges.push_back(k == nbins ? hi : lo + e.width * static_cast<double>(k));
  std::vector<std::size_t> counts(nbins, 0);
  std::size_t total = 0;
  detail::for_each_cell_value(path, bc, [&](double v) {
    if (!(v >= lo && v < hi))
      throw DomainError("path value " + std::to_string(v) + " lies outside the bin range; enlarge the bins");
    auto k = static_cast<std::size_t>((v - lo) / e.width);
    if (k >= nbins) k = nbins - 1;
    while (k > 0 && v < e.edges[k]) --k;
    while (k + 1 < nbins && v >= e.edges[k + 1]) ++k;
    ++counts[k];
    ++total;
  });
  e.box_volume = static_cast<double>(total) * bc.cell_volume;
  for (std::size_t k = 0; k < nbins; ++k) {
    e.mass.push_back(static_cast<double>(counts[k]) * bc.cell_volume);
    e.density.push_back(e.mass.back() / e.width);
  }
  return e;
}

struct FourierLocalTime {
  std::vector<double> x;
  std::vector<double> density;
  double z_max = 0.0;
  double refinement_delta = 0.0;  // relative L2 change when z_max is doubled
};

namespace detail {

/// Trapezoid weights over the box nodes times exp(i u z) summed: the
/// characteristic function of the occupation measure.
inline std::vector<double> fourier_density(const std::vector<double>& vals, const std::vector<double>& wts,
                                           const std::vector<double>& x, double zmax, std::size_t zpoints) {
  const double dz = 2.0 * zmax / static_cast<double>(zpoints - 1);
  std::vector<std::complex<double>> phi(zpoints);
  for (std::size_t k = 0; k < zpoints; ++k) {
    const double z = -zmax + dz * static_cast<double>(k);
    std::complex<double> s = 0.0;
    for (std::size_t n = 0; n < vals.size(); ++n) s += wts[n] * std::polar(1.0, vals[n] * z);
    phi[k] = s;
  }
  std::vector<double> out;
  for (double xv : x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < zpoints; ++k) {
      const double z = -zmax + dz * static_cast<double>(k);
      const double w = (k == 0 || k + 1 == zpoints) ? 0.5 * dz : dz;
      acc += w * (std::polar(1.0, -z * xv) * phi[k]).real();
    }
    out.push_back(acc / (2.0 * std::numbers::pi));
  }
  return out;
}

}  // namespace detail

/// (2 pi)^{-1} int_{-Z}^{Z} e^{-izx} int_I e^{i X_t z} dt dz, both integrals by
/// the trapezoid rule (nodes of the box in t, zpoints in z).
inline FourierLocalTime local_time_fourier(const FieldRealization& path, const ParameterBox& box,
                                           const std::vector<double>& x_values, double z_max,
                                           std::size_t z_points = 1025) {
  if (!(z_max > 0.0) || z_points < 3) throw ParameterError("Fourier local time needs z_max > 0 and >= 3 z points");
  const auto bc = detail::box_cells(path, box);
  const auto& g = path.grid();
  const std::size_t d = g.dims();
  std::vector<double> vals, wts;
  if (!bc.empty) {
    std::vector<std::size_t> idx = bc.lo;
    while (true) {
      double w = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double h = g.spacing(i);
        w *= (idx[i] == bc.lo[i] || idx[i] == bc.hi[i]) ? 0.5 * h : h;
      }
      vals.push_back(path.at(std::span<const std::size_t>(idx)));
      wts.push_back(w);
      std::size_t i = d;
      while (i-- > 0) {
        if (++idx[i] <= bc.hi[i]) break;
        idx[i] = bc.lo[i];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  FourierLocalTime r;
  r.x = x_values;
  r.z_max = z_max;
  r.density = detail::fourier_density(vals, wts, x_values, z_max, z_points);
  const auto fine = detail::fourier_density(vals, wts, x_values, 2.0 * z_max, 2 * z_points - 1);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    num += (fine[k] - r.density[k]) * (fine[k] - r.density[k]);
    den += r.density[k] * r.density[k];
  }
  r.refinement_delta = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return r;
}

/// Relative L2 distance between a histogram and a Fourier estimate evaluated
/// at the bin centers.
inline double local_time_l2_distance(const LocalTimeEstimate& hist, const FourierLocalTime& four) {
  if (four.density.size() != hist.density.size()) throw DimensionError("estimates have different lengths");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < hist.density.size(); ++k) {
    num += (four.density[k] - hist.density[k]) * (four.density[k] - hist.density[k]);
    den += hist.density[k] * hist.density[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

inline std::vector<double> bin_centers(const LocalTimeEstimate& e) {
  std::vector<double> c;
  for (std::size_t k = 0; k + 1 < e.edges.size(); ++k) c.push_back(e.center(k));
  return c;
}

struct SufficiencyIntegral {
  double value = 0.0;
  double coarse_value = 0.0;
  bool converged = false;
};

/// int_I int_I (|t-s|^e + |x-y|^e)^{-1/2} over a box of side lengths (a, b)
/// in (time, space), written in difference variables:
///   4 int_0^a int_0^b (a - tau)(b - xi) (tau^e + xi^e)^{-1/2} dxi dtau.
inline SufficiencyIntegral metric_sufficiency_integral(double a, double b, double exponent, std::size_t points = 16,
                                                       double rel_tol = 1e-4) {
  if (!(a > 0.0) || !(b > 0.0) || !(exponent > 0.0)) throw DomainError("sufficiency integral needs positive sizes");
  auto eval = [&](std::size_t levels) {
    auto graded = [&](double len) {
      std::vector<double> br{0.0};
      for (std::size_t k = levels; k >= 1; --k) br.push_back(len * std::pow(0.5, static_cast<double>(k)));
      br.push_back(len);
      return br;
    };
    const auto bt = graded(a), bx = graded(b);
    return 4.0 * integrate_panels(
                     [&](double tau) {
                       return (a - tau) * integrate_panels(
                                              [&](double xi) {
                                                return (b - xi) / std::sqrt(std::pow(tau, exponent) +
                                                                            std::pow(xi, exponent));
                                              },
                                              bx, points);
                     },
                     bt, points);
  };
  SufficiencyIntegral r;
  r.coarse_value = eval(20);
  r.value = eval(40);
  r.converged = std::isfinite(r.value) && std::abs(r.value - r.coarse_value) <= rel_tol * std::abs(r.value);
  return r;
}

inline void write_local_time_csv(const LocalTimeEstimate& e, std::ostream& os) {
  os << "bin_center,density\n" << std::setprecision(17);
  for (std::size_t k = 0; k < e.density.size(); ++k) os << e.center(k) << ',' << e.density[k] << '\n';
}

}  // namespace hfield
