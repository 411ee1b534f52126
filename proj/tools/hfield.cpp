// hfield: simulate Hermite sheets, run verification suites, solve the
// stochastic wave equation and estimate local times from the command line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hfield/field_io.hpp"
#include "hfield/hermite.hpp"
#include "hfield/integral.hpp"
#include "hfield/parallel.hpp"
#include "hfield/stats.hpp"
#include "hfield/wave.hpp"
#include "report.hpp"

namespace {

using namespace hfield;
using cli::Csv;
using cli::Json;
using cli::num;

constexpr int kExitFailedChecks = 1;
constexpr int kExitError = 2;
constexpr int kExitRefused = 3;

// Stream id for functions drawn by the CLI itself, disjoint from replicate ids.
constexpr std::uint64_t kAuxStream = std::uint64_t{1} << 62;

HurstIndex make_hurst(std::vector<double> h, std::size_t d, int q) {
  if (h.size() == 1 && d > 1) h.assign(d, h[0]);
  if (h.size() != d) throw DimensionError("--hurst needs 1 or d = " + std::to_string(d) + " values");
  return HurstIndex(std::move(h), q);
}

GridSpec cube_grid(std::size_t d, double extent, std::size_t cells) {
  return GridSpec::from_origin_zero(MultiIndex::filled(d, extent), std::vector<std::size_t>(d, cells));
}

struct Generator {
  std::unique_ptr<HermiteVariationGenerator> variation;
  std::unique_ptr<KernelGenerator> kernel;

  Generator(const std::string& kind, const GridSpec& grid, const HurstIndex& h, std::size_t n, const KernelConfig& k) {
    if (kind == "variation")
      variation = std::make_unique<HermiteVariationGenerator>(grid, h, n);
    else
      kernel = std::make_unique<KernelGenerator>(grid, h, k);
  }
  FieldSampler sampler(std::uint64_t seed) const {
    return variation ? make_sampler(*variation, seed) : make_sampler(*kernel, seed);
  }
  std::vector<std::string> warnings() const { return kernel ? kernel->warnings() : std::vector<std::string>{}; }
};

void emit(const Csv& csv, const cli::ReportHeader& h, const std::string& out) {
  if (out.empty()) {
    csv.write(std::cout, h);
    return;
  }
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw FormatError("cannot write " + out);
  csv.write(f, h);
}

std::string replicate_path(const std::string& dir, const char* stem, std::size_t r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.hfld", stem, r);
  return (std::filesystem::path(dir) / buf).string();
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::size_t d = 1;
  int q = 1;
  std::vector<double> hurst{0.75};
  std::size_t n = 256;
  double extent = 1.0;
  std::size_t cells = 8;
  std::string generator = "variation";
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  bool moments_only = false;
  std::size_t y_cells = 256;
  std::size_t tail_cells = 96;
  double depth = 8.0;
  std::string out, out_dir;
  std::size_t threads = 0;

  Json config() const {
    return {{"d", d},          {"q", q},
            {"hurst", hurst},  {"n", n},
            {"extent", extent}, {"cells", cells},
            {"generator", generator}, {"replicates", replicates},
            {"seed", seed},    {"moments-only", moments_only},
            {"y-cells", y_cells}, {"tail-cells", tail_cells},
            {"depth", depth}};
  }
  KernelConfig kernel() const {
    KernelConfig k;
    k.y_cells = y_cells;
    k.tail_cells = tail_cells;
    k.truncation_depth = depth;
    return k;
  }
};

int cmd_simulate(const SimulateOpts& o) {
  const auto hurst = make_hurst(o.hurst, o.d, o.q);
  const auto grid = cube_grid(o.d, o.extent, o.cells);
  const Generator gen(o.generator, grid, hurst, o.n, o.kernel());
  const auto sampler = gen.sampler(o.seed);
  const bool persist = !o.out_dir.empty() && !o.moments_only;
  if (persist) std::filesystem::create_directories(o.out_dir);
  const auto rows = run_replicates(o.replicates, o.threads, [&](std::size_t r) {
    const auto f = sampler(r);
    if (persist) write_field(f, replicate_path(o.out_dir, "replicate", r));
    std::vector<double> v(o.cells);
    for (std::size_t k = 1; k <= o.cells; ++k) {
      const std::vector<std::size_t> idx(o.d, k);
      v[k - 1] = f.at(std::span<const std::size_t>(idx));
    }
    return v;
  });
  Csv csv({"t", "moment2", "se", "theory", "z"});
  for (const auto& w : gen.warnings()) csv.comment("warning: " + w);
  for (std::size_t k = 1; k <= o.cells; ++k) {
    auto col = column(rows, k - 1);
    for (auto& x : col) x *= x;
    const auto ms = mean_se(col);
    const double t = grid.node_coord(0, k);
    const double th = covariance(hurst, MultiIndex::filled(o.d, t), MultiIndex::filled(o.d, t));
    csv.row({num(t), num(ms.mean), num(ms.se), num(th), num(ms.se > 0 ? (ms.mean - th) / ms.se : 0.0)});
  }
  emit(csv, {"simulate", o.config()}, o.out);
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyOpts {
  std::string suite = "all";
  std::size_t d = 1;
  int q = 1;
  std::vector<double> hurst{0.75};
  std::size_t n = 256;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  double zmax = 3.0;
  double slope_tol = 0.1;
  bool wrong_theory = false;
  std::string out;
  std::size_t threads = 0;

  Json config() const {
    return {{"suite", suite}, {"d", d}, {"q", q}, {"hurst", hurst}, {"n", n},
            {"replicates", replicates}, {"seed", seed}, {"zmax", zmax}, {"slope-tol", slope_tol},
            {"test-wrong-theory", wrong_theory}};
  }
};

struct Check {
  std::string name;
  double estimate, se, theory, z;
  bool pass;
};

double zscore(double est, double th, double se) {
  if (se > 0.0) return (est - th) / se;
  return est == th ? 0.0 : INFINITY;
}

Check slope_check(const std::string& name, const RegressionReport& r, double tol) {
  return {name, r.slope, r.slope_se, r.theory, r.z(), r.within(tol)};
}

int cmd_verify(const VerifyOpts& o) {
  const auto hurst = make_hurst(o.hurst, o.d, o.q);
  // Theory values in test mode use H + 0.1 on every axis.
  std::vector<double> hth = hurst.values();
  if (o.wrong_theory)
    for (auto& h : hth) h += 0.1;
  const auto grid = cube_grid(o.d, 1.0, 8);
  const KernelConfig kc;
  const Generator gen("variation", grid, hurst, o.n, kc);
  const auto sampler = gen.sampler(o.seed);
  const auto all = o.suite == "all";
  std::vector<Check> checks;

  if (all || o.suite == "covariance") {
    std::vector<MultiIndex> pts;
    for (double t : {0.25, 0.5, 0.75, 1.0}) pts.push_back(MultiIndex::filled(o.d, t));
    const Generator g1("variation", grid, make_hurst(o.hurst, o.d, 1), o.n, kc);
    const Generator g2("variation", grid, make_hurst(o.hurst, o.d, 2), o.n, kc);
    const auto r1 = sample_point_values(g1.sampler(o.seed), pts, o.replicates, o.threads);
    const auto r2 = sample_point_values(g2.sampler(o.seed + 1), pts, o.replicates, o.threads);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i; j < pts.size(); ++j) {
        const auto c1 = covariance_se(column(r1, i), column(r1, j));
        const auto c2 = covariance_se(column(r2, i), column(r2, j));
        const double se = std::hypot(c1.se, c2.se);
        const double z = zscore(c1.mean - c2.mean, 0.0, se);
        checks.push_back({"cov_q1_minus_q2[" + std::to_string(i) + "," + std::to_string(j) + "]", c1.mean - c2.mean,
                          se, 0.0, z, std::abs(z) <= o.zmax});
      }
  }
  if (all || o.suite == "selfsim") {
    const std::vector<double> scales{0.125, 0.25, 0.5, 1.0};
    auto mc = verify_self_similarity(sampler, hurst, scales, o.replicates, o.threads);
    auto ex = verify_self_similarity_exact(hurst, scales);
    double th = 0.0;
    for (double h : hth) th += 2.0 * h;
    mc.theory = th;
    ex.theory = th;
    checks.push_back(slope_check("selfsim_slope_mc", mc, o.slope_tol));
    checks.push_back(slope_check("selfsim_slope_exact", ex, 1e-12));
  }
  if (all || o.suite == "stationarity") {
    const auto r = verify_stationary_increments(sampler, MultiIndex::filled(o.d, 0.5), MultiIndex::filled(o.d, 0.25),
                                                o.replicates, o.threads);
    checks.push_back({"stationarity_m2", r.m2_base - r.m2_shift, r.se2, 0.0, r.z2, std::abs(r.z2) <= o.zmax});
    checks.push_back({"stationarity_m4", r.m4_base - r.m4_shift, r.se4, 0.0, r.z4, std::abs(r.z4) <= o.zmax});
  }
  if (all || o.suite == "holder") {
    const std::vector<double> deltas{0.125, 0.25, 0.5, 1.0};
    auto reps = verify_holder_scaling(sampler, hurst, MultiIndex::filled(o.d, 1.0), deltas, o.replicates, o.threads);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      reps[i].theory = 2.0 * hth[i];
      checks.push_back(slope_check("holder_slope_axis" + std::to_string(i + 1), reps[i], o.slope_tol));
    }
  }
  if (all || o.suite == "isometry") {
    RngStream frng(o.seed, kAuxStream);
    std::vector<StepFunction> fs;
    for (int k = 0; k < 5; ++k) fs.push_back(random_step_function(grid, 3, frng));
    const auto rows = run_replicates(o.replicates, o.threads, [&](std::size_t r) {
      const auto f = sampler(r);
      std::vector<double> v;
      for (const auto& s : fs) v.push_back(wiener_integral(s, f));
      return v;
    });
    for (std::size_t k = 0; k < fs.size(); ++k) {
      auto col = column(rows, k);
      for (auto& x : col) x *= x;
      const auto ms = mean_se(col);
      const double th = inner_product_H(fs[k], fs[k], hurst);
      const double z = zscore(ms.mean, th, ms.se);
      checks.push_back({"isometry_f" + std::to_string(k + 1), ms.mean, ms.se, th, z, std::abs(z) <= o.zmax});
    }
  }
  if (checks.empty()) throw ParameterError("unknown suite " + o.suite);

  Csv csv({"check", "estimate", "se", "theory", "z", "pass"});
  std::vector<std::string> failed;
  std::fprintf(stderr, "%-28s %14s %12s %14s %9s  %s\n", "check", "estimate", "se", "theory", "z", "result");
  for (const auto& c : checks) {
    csv.row({c.name, num(c.estimate), num(c.se), num(c.theory), num(c.z), c.pass ? "1" : "0"});
    std::fprintf(stderr, "%-28s %14.6g %12.4g %14.6g %9.3f  %s\n", c.name.c_str(), c.estimate, c.se, c.theory, c.z,
                 c.pass ? "pass" : "FAIL");
    if (!c.pass) failed.push_back(c.name);
  }
  emit(csv, {"verify", o.config()}, o.out);
  if (!failed.empty()) {
    std::fprintf(stderr, "%zu check(s) failed:", failed.size());
    for (const auto& f : failed) std::fprintf(stderr, " %s", f.c_str());
    std::fprintf(stderr, "\n");
    return kExitFailedChecks;
  }
  return 0;
}

// -------------------------------------------------------------------- wave

struct WaveOpts {
  std::size_t d = 1;
  double H = 0.75;
  std::vector<double> H0{0.75};
  int q = 1;
  double T = 1.0;
  double M = 2.0;
  std::size_t n = 32;
  std::string noise = "variation";
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  std::vector<double> deltas{0.03125, 0.0625, 0.125, 0.25};
  bool no_scaling = false;
  bool localtime = false;
  std::size_t bins = 12;
  std::size_t save_solutions = 0;
  std::string out, out_dir, localtime_out;
  std::size_t threads = 0;

  Json config() const {
    return {{"d", d},         {"H", H},
            {"H0", H0},       {"q", q},
            {"T", T},         {"M", M},
            {"n", n},         {"noise", noise},
            {"replicates", replicates}, {"seed", seed},
            {"deltas", deltas}, {"no-scaling", no_scaling},
            {"localtime", localtime}, {"bins", bins},
            {"save-solutions", save_solutions}};
  }
  WaveConfig wave() const {
    WaveConfig c;
    c.d = d;
    c.H = H;
    c.H0 = H0;
    if (c.H0.size() == 1 && d > 1) c.H0.assign(d, H0[0]);
    c.q = q;
    c.T = T;
    c.M = M;
    c.resolution = n;
    c.noise = noise == "kernel" ? NoiseKind::kernel : NoiseKind::variation;
    return c;
  }
};

int cmd_wave(const WaveOpts& o) {
  const auto c = o.wave();
  c.validate();
  const auto b = beta_exponent(c);
  std::fprintf(stderr, "beta = %.10g, 2H+1 = %.10g: existence (beta < 2H+1) %s; regularity window (%.10g, %.10g) %s\n",
               b.beta, b.bound, b.exists ? "holds" : "FAILS", 2.0 * c.H - 1.0,
               std::min(static_cast<double>(c.d), b.bound), b.regular ? "holds" : "fails");
  if (!b.exists) {
    std::fprintf(stderr, "refused: no mild solution, beta = %.10g does not satisfy beta < 2H+1 = %.10g\n", b.beta,
                 b.bound);
    return kExitRefused;
  }
  const WaveSolver solver(c);
  Csv csv({"quantity", "estimate", "se", "theory", "z"});
  for (const auto& w : solver.warnings()) csv.comment("warning: " + w);
  csv.row({"beta", num(b.beta), "0", num(b.beta), "0"});
  csv.row({"bound_2H+1", num(b.bound), "0", num(b.bound), "0"});

  const SpaceTimePoint base{c.T, MultiIndex::filled(c.d, 0.0)};
  const auto vals = run_replicates(o.replicates, o.threads,
                                   [&](std::size_t r) { return solver.sample_points(o.seed, r, {base})[0]; });
  std::vector<double> sq(vals.size());
  for (std::size_t r = 0; r < vals.size(); ++r) sq[r] = vals[r] * vals[r];
  const auto ms = mean_se(sq);
  const double oracle = solution_variance_oracle(c, c.T, base.x);
  csv.row({"variance_u(T,0)", num(ms.mean), num(ms.se), num(oracle), num(zscore(ms.mean, oracle, ms.se))});

  if (!o.no_scaling) {
    if (!b.regular) {
      std::fprintf(stderr, "increment scaling skipped: beta outside the regularity window\n");
      csv.comment("increment scaling skipped: beta outside the regularity window");
    } else {
      for (auto axis : {ScalingAxis::time, ScalingAxis::space}) {
        const std::string a = axis == ScalingAxis::time ? "time" : "space";
        const auto rep = verify_increment_scaling(solver, axis, base, o.deltas, o.replicates, o.seed, o.threads);
        const auto& g = rep.regression;
        csv.row({"slope_" + a, num(g.slope), num(g.slope_se), num(g.theory), num(g.z())});
        csv.row({"c1_" + a, num(rep.c1), "0", "", ""});
        csv.row({"c2_" + a, num(rep.c2), "0", "", ""});
        if (c.d == 1) {
          const auto om = oracle_increment_moments(c, axis, base, o.deltas);
          const auto og = scaling_regression(o.deltas, om);
          csv.row({"oracle_slope_" + a, num(og.slope), num(og.slope_se), num(g.theory), ""});
        }
      }
    }
  }

  if (o.save_solutions > 0 || o.localtime) {
    if (o.save_solutions > 0) {
      if (o.out_dir.empty()) throw ParameterError("--save-solutions needs --out-dir");
      std::filesystem::create_directories(o.out_dir);
    }
    const std::size_t nsol = std::max<std::size_t>(o.save_solutions, o.localtime ? 1 : 0);
    const auto sols = run_replicates(nsol, o.threads, [&](std::size_t r) {
      auto s = solver.solve(o.seed, r);
      if (r < o.save_solutions) write_field(s.field, replicate_path(o.out_dir, "solution", r));
      return std::make_shared<WaveSolution>(std::move(s));
    });
    if (o.localtime) {
      const auto& f = sols[0]->field;
      const auto& g = f.grid();
      std::vector<double> lo{0.5 * c.T}, hi{c.T};
      for (std::size_t i = 0; i < c.d; ++i) {
        lo.push_back(g.origin()[i + 1]);
        hi.push_back(g.upper()[i + 1]);
      }
      const ParameterBox box{MultiIndex(lo), MultiIndex(hi)};
      auto [vmin, vmax] = std::minmax_element(f.values().begin(), f.values().end());
      const double pad = 0.05 * (*vmax - *vmin) + 1e-12;
      const auto hist = local_time_histogram(f, box, *vmin - pad, *vmax + pad, o.bins);
      const auto four = local_time_fourier(f, box, bin_centers(hist), std::numbers::pi / hist.width);
      csv.row({"localtime_mass", num(hist.total_mass()), "0", num(box.volume()), ""});
      csv.row({"localtime_l2", num(hist.l2_integral()), "0", "", ""});
      csv.row({"localtime_fourier_l2_distance", num(local_time_l2_distance(hist, four)), "0", "", ""});
      csv.row({"localtime_fourier_z_delta", num(four.refinement_delta), "0", "", ""});
      if (!o.localtime_out.empty()) {
        Csv lt({"bin_center", "density", "fourier"});
        for (std::size_t k = 0; k < hist.density.size(); ++k)
          lt.row({num(hist.center(k)), num(hist.density[k]), num(four.density[k])});
        std::ofstream fo(o.localtime_out, std::ios::trunc);
        lt.write(fo, {"wave", o.config()});
      }
    }
  }
  emit(csv, {"wave", o.config()}, o.out);
  return 0;
}

// --------------------------------------------------------------- localtime

struct LocaltimeOpts {
  std::string field;
  std::vector<double> lo, hi, range;
  std::size_t bins = 12;
  bool fourier = false;
  std::string out;

  Json config() const {
    return {{"field", field}, {"lo", lo}, {"hi", hi}, {"range", range}, {"bins", bins}, {"fourier", fourier}};
  }
};

int cmd_localtime(const LocaltimeOpts& o) {
  const auto f = read_field(o.field);
  const auto& g = f.grid();
  const ParameterBox box{o.lo.empty() ? g.origin() : MultiIndex(o.lo), o.hi.empty() ? g.upper() : MultiIndex(o.hi)};
  double a, b;
  if (o.range.empty()) {
    auto [vmin, vmax] = std::minmax_element(f.values().begin(), f.values().end());
    const double pad = 0.05 * (*vmax - *vmin) + 1e-12;
    a = *vmin - pad;
    b = *vmax + pad;
  } else {
    if (o.range.size() != 2) throw ParameterError("--range needs two values");
    a = o.range[0];
    b = o.range[1];
  }
  const auto hist = local_time_histogram(f, box, a, b, o.bins);
  std::vector<std::string> cols{"bin_center", "density"};
  FourierLocalTime four;
  if (o.fourier) {
    cols.push_back("fourier");
    four = local_time_fourier(f, box, bin_centers(hist), std::numbers::pi / hist.width);
  }
  Csv csv(cols);
  csv.comment("total_mass=" + num(hist.total_mass()) + " box_volume=" + num(box.volume()) +
              " l2_integral=" + num(hist.l2_integral()));
  if (o.fourier)
    csv.comment("fourier_l2_distance=" + num(local_time_l2_distance(hist, four)) +
                " z_refinement_delta=" + num(four.refinement_delta));
  for (std::size_t k = 0; k < hist.density.size(); ++k) {
    std::vector<std::string> r{num(hist.center(k)), num(hist.density[k])};
    if (o.fourier) r.push_back(num(four.density[k]));
    csv.row(r);
  }
  std::fprintf(stderr, "total mass %.10g (box volume %.10g), int L^2 = %.10g\n", hist.total_mass(), box.volume(),
               hist.l2_integral());
  emit(csv, {"localtime", o.config()}, o.out);
  return 0;
}

// ------------------------------------------------------------------ wiener

struct WienerOpts {
  std::size_t d = 1;
  int q = 1;
  std::vector<double> hurst{0.75};
  std::size_t n = 256;
  std::size_t cells = 8;
  double extent = 1.0;
  std::string generator = "variation";
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::string steps;
  std::size_t random_steps = 5;
  std::size_t terms = 3;
  std::string out;
  std::size_t threads = 0;

  Json config() const {
    return {{"d", d},         {"q", q},       {"hurst", hurst}, {"n", n},
            {"cells", cells}, {"extent", extent}, {"generator", generator},
            {"replicates", replicates}, {"seed", seed}, {"steps", steps},
            {"random-steps", random_steps}, {"terms", terms}};
  }
};

int cmd_wiener(const WienerOpts& o) {
  const auto hurst = make_hurst(o.hurst, o.d, o.q);
  const auto grid = cube_grid(o.d, o.extent, o.cells);
  const Generator gen(o.generator, grid, hurst, o.n, KernelConfig{});
  std::vector<StepFunction> fs;
  if (!o.steps.empty()) {
    std::ifstream in(o.steps);
    if (!in) throw FormatError("cannot open " + o.steps);
    fs.push_back(read_step_csv(in));
  } else {
    RngStream frng(o.seed, kAuxStream);
    for (std::size_t k = 0; k < o.random_steps; ++k) fs.push_back(random_step_function(grid, o.terms, frng));
  }
  const auto sampler = gen.sampler(o.seed);
  const auto rows = run_replicates(o.replicates, o.threads, [&](std::size_t r) {
    const auto f = sampler(r);
    std::vector<double> v;
    for (const auto& s : fs) v.push_back(wiener_integral(s, f));
    return v;
  });
  Csv csv({"function", "mc_variance", "se", "inner_product", "z"});
  for (const auto& w : gen.warnings()) csv.comment("warning: " + w);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    auto col = column(rows, k);
    for (auto& x : col) x *= x;
    const auto ms = mean_se(col);
    const double th = inner_product_H(fs[k], fs[k], hurst);
    csv.row({std::to_string(k + 1), num(ms.mean), num(ms.se), num(th), num(zscore(ms.mean, th, ms.se))});
  }
  emit(csv, {"wiener", o.config()}, o.out);
  return 0;
}

// -------------------------------------------------------------------- main

int run(std::vector<std::string> args);

/// Rebuilds the command line from a report header.
std::vector<std::string> replay_args(const cli::ReportHeader& h) {
  std::vector<std::string> a{"hfield", h.command};
  for (const auto& [key, v] : h.config.items()) {
    if (v.is_boolean()) {
      if (v.get<bool>()) a.push_back("--" + key);
    } else if (v.is_array()) {
      if (v.empty()) continue;
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + e.dump();
      a.push_back("--" + key + "=" + s);
    } else if (v.is_string()) {
      if (!v.get<std::string>().empty()) a.push_back("--" + key + "=" + v.get<std::string>());
    } else {
      a.push_back("--" + key + "=" + v.dump());
    }
  }
  return a;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Hermite sheets, wave equation solutions and local times"};
  app.set_config("--config", "", "INI/TOML config file; one section per subcommand")->check(CLI::ExistingFile);
  app.require_subcommand(1);

  auto threads_opt = [](CLI::App* s, std::size_t& t) {
    s->add_option("--threads", t, "worker threads (0: HFIELD_THREADS or 1)");
  };
  const auto gen_check = CLI::IsMember({"variation", "kernel"});

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "sample Hermite sheet replicates and summarize E[Z(t)^2]");
  sim->add_option("--d", so.d, "sheet dimension")->check(CLI::Range(1, 4));
  sim->add_option("--q", so.q, "Hermite order")->check(CLI::Range(1, kMaxHermiteOrder));
  sim->add_option("--hurst", so.hurst, "Hurst index (1 or d values)")->delimiter(',');
  sim->add_option("--n", so.n, "fGn resolution per unit length");
  sim->add_option("--extent", so.extent, "grid side length");
  sim->add_option("--cells", so.cells, "grid cells per axis");
  sim->add_option("--generator", so.generator)->check(gen_check);
  sim->add_option("--replicates", so.replicates);
  sim->add_option("--seed", so.seed);
  sim->add_flag("--moments-only", so.moments_only, "do not persist fields");
  sim->add_option("--y-cells", so.y_cells, "kernel generator: uniform y cells");
  sim->add_option("--tail-cells", so.tail_cells, "kernel generator: geometric tail cells");
  sim->add_option("--depth", so.depth, "kernel generator: truncation depth L");
  sim->add_option("--out", so.out, "summary CSV (default stdout)");
  sim->add_option("--out-dir", so.out_dir, "directory for replicate fields");
  threads_opt(sim, so.threads);

  VerifyOpts vo;
  auto* ver = app.add_subcommand("verify", "run invariant suites; nonzero exit on failure");
  ver->add_option("--suite", vo.suite)
      ->check(CLI::IsMember({"all", "covariance", "selfsim", "stationarity", "holder", "isometry"}));
  ver->add_option("--d", vo.d)->check(CLI::Range(1, 4));
  ver->add_option("--q", vo.q)->check(CLI::Range(1, kMaxHermiteOrder));
  ver->add_option("--hurst", vo.hurst)->delimiter(',');
  ver->add_option("--n", vo.n);
  ver->add_option("--replicates", vo.replicates);
  ver->add_option("--seed", vo.seed);
  ver->add_option("--zmax", vo.zmax);
  ver->add_option("--slope-tol", vo.slope_tol);
  ver->add_flag("--test-wrong-theory", vo.wrong_theory, "shift theory H by 0.1 (harness self-test)");
  ver->add_option("--out", vo.out);
  threads_opt(ver, vo.threads);

  WaveOpts wo;
  auto* wav = app.add_subcommand("wave", "mild solution of the stochastic wave equation");
  wav->add_option("--d", wo.d, "space dimension");
  wav->add_option("--H", wo.H, "time Hurst index");
  wav->add_option("--H0", wo.H0, "space Hurst indices")->delimiter(',');
  wav->add_option("--q", wo.q)->check(CLI::Range(1, kMaxHermiteOrder));
  wav->add_option("--T", wo.T);
  wav->add_option("--M", wo.M, "space box half-width");
  wav->add_option("--n", wo.n, "cells per unit length");
  wav->add_option("--noise", wo.noise)->check(gen_check);
  wav->add_option("--replicates", wo.replicates);
  wav->add_option("--seed", wo.seed);
  wav->add_option("--deltas", wo.deltas, "increment separations")->delimiter(',');
  wav->add_flag("--no-scaling", wo.no_scaling);
  wav->add_flag("--localtime", wo.localtime, "local time of replicate 0 on [T/2,T] x space");
  wav->add_option("--bins", wo.bins);
  wav->add_option("--save-solutions", wo.save_solutions, "persist the first K solutions");
  wav->add_option("--out", wo.out);
  wav->add_option("--out-dir", wo.out_dir);
  wav->add_option("--localtime-out", wo.localtime_out, "local time CSV");
  threads_opt(wav, wo.threads);

  LocaltimeOpts lo;
  auto* loc = app.add_subcommand("localtime", "occupation density of a stored field");
  loc->add_option("--field", lo.field)->required()->check(CLI::ExistingFile);
  loc->add_option("--lo", lo.lo, "box low corner (default grid origin)")->delimiter(',');
  loc->add_option("--hi", lo.hi, "box high corner (default grid upper corner)")->delimiter(',');
  loc->add_option("--range", lo.range, "value range of the bins")->delimiter(',');
  loc->add_option("--bins", lo.bins);
  loc->add_flag("--fourier", lo.fourier, "add the Fourier estimator at Z = pi/w");
  loc->add_option("--out", lo.out);

  WienerOpts io;
  auto* wie = app.add_subcommand("wiener", "Monte Carlo Wiener integrals of step functions vs the H norm");
  wie->add_option("--d", io.d)->check(CLI::Range(1, 4));
  wie->add_option("--q", io.q)->check(CLI::Range(1, kMaxHermiteOrder));
  wie->add_option("--hurst", io.hurst)->delimiter(',');
  wie->add_option("--n", io.n);
  wie->add_option("--cells", io.cells);
  wie->add_option("--extent", io.extent);
  wie->add_option("--generator", io.generator)->check(gen_check);
  wie->add_option("--replicates", io.replicates);
  wie->add_option("--seed", io.seed);
  wie->add_option("--steps", io.steps, "step-function CSV (default: random functions)");
  wie->add_option("--random-steps", io.random_steps);
  wie->add_option("--terms", io.terms);
  wie->add_option("--out", io.out);
  threads_opt(wie, io.threads);

  std::string rp_file, rp_out, rp_dir, rp_lt;
  std::size_t rp_threads = 0;
  auto* rep = app.add_subcommand("replay", "re-run the command recorded in a report header");
  rep->add_option("report", rp_file)->required()->check(CLI::ExistingFile);
  rep->add_option("--out", rp_out);
  rep->add_option("--out-dir", rp_dir);
  rep->add_option("--localtime-out", rp_lt);
  rep->add_option("--threads", rp_threads);

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) return cmd_simulate(so);
    if (*ver) return cmd_verify(vo);
    if (*wav) return cmd_wave(wo);
    if (*loc) return cmd_localtime(lo);
    if (*wie) return cmd_wiener(io);
    if (*rep) {
      const auto h = cli::read_header(rp_file);
      auto a = replay_args(h);
      if (!rp_out.empty()) a.push_back("--out=" + rp_out);
      if (!rp_dir.empty()) a.push_back("--out-dir=" + rp_dir);
      if (!rp_lt.empty()) a.push_back("--localtime-out=" + rp_lt);
      if (rp_threads > 0) a.push_back("--threads=" + std::to_string(rp_threads));
      return run(std::move(a));
    }
  } catch (const ExistenceError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return kExitRefused;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }
