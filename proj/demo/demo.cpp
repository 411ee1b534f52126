// Samples a Rosenblatt sheet path, a wave solution driven by it, and the
// local time of the solution; prints short summaries.

#include <cstdio>

#include "hfield/hermite.hpp"
#include "hfield/stats.hpp"
#include "hfield/wave.hpp"

using namespace hfield;

int main() {
  const HurstIndex h({0.75}, 2);
  const auto grid = GridSpec::from_origin_zero(MultiIndex{1.0}, {8});
  const HermiteVariationGenerator gen(grid, h, 256);
  const auto path = gen.generate(1, 0);
  std::printf("Rosenblatt path, H = 0.75:\n");
  for (std::size_t k = 0; k <= 8; ++k) std::printf("  Z(%.3f) = % .5f\n", grid.node_coord(0, k), path.values()[k]);

  WaveConfig c;
  c.H = 0.7;
  c.H0 = {0.6};
  c.q = 2;
  c.M = 1.25;
  c.resolution = 64;
  const auto b = beta_exponent(c);
  std::printf("\nwave, q = 2, H = 0.7, H0 = 0.6: beta = %.2f < 2H+1 = %.2f\n", b.beta, b.bound);
  const WaveSolver solver(c);
  const auto sol = solver.solve(2, 0);
  std::printf("  u(1, 0) = %.5f, oracle sd = %.5f\n", sol.at(1.0, MultiIndex{0.0}),
              std::sqrt(solution_variance_oracle(c, 1.0, MultiIndex{0.0})));

  const ParameterBox box{MultiIndex{0.5, -0.25}, MultiIndex{1.0, 0.25}};
  double lo = 1e300, hi = -1e300;
  for (double v : sol.field.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto lt = local_time_histogram(sol.field, box, lo - 1e-9, hi + 1e-9, 10);
  std::printf("\nlocal time on [0.5,1] x [-0.25,0.25]:\n");
  for (std::size_t k = 0; k < lt.density.size(); ++k) std::printf("  % .4f  %.4f\n", lt.center(k), lt.density[k]);
  std::printf("  total mass %.6f\n", lt.total_mass());
}
