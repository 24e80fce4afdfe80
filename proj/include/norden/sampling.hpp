#pragma once

#include <cstdint>
#include <vector>

#include "norden/lift.hpp"

namespace norden {

/// Deterministic, platform-independent generator (splitmix64) so that a
/// (config, seed) pair always yields the same sample set.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double next_unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

 private:
  uint64_t state_;
};

struct SamplingConfig {
  int num_points = 100;
  uint64_t seed = 42;
  double x_radius = 0.5;  // chart-safe ball for the base point
  double t_lo = 0.0;
  double t_hi = 0.5;      // clamped to the family's validity domain by callers
};

/// Random tangent points: base point uniform in the x ball, fiber direction
/// uniform, fiber length set so the energy density is uniform in
/// [t_lo, t_hi]. When t_lo == 0 the first point sits on the null section.
inline std::vector<TangentPoint> sample_points(const SpaceForm& sf, const SamplingConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<TangentPoint> pts;
  pts.reserve(static_cast<std::size_t>(cfg.num_points));
  for (int k = 0; k < cfg.num_points; ++k) {
    std::vector<double> x(sf.n), u(sf.n);
    for (;;) {  // rejection-sample the ball
      double r2 = 0.0;
      for (int i = 0; i < sf.n; ++i) {
        x[i] = cfg.x_radius * rng.next_symmetric();
        r2 += x[i] * x[i];
      }
      if (r2 <= cfg.x_radius * cfg.x_radius) break;
    }
    double unorm2 = 0.0;
    do {
      unorm2 = 0.0;
      for (int i = 0; i < sf.n; ++i) {
        u[i] = rng.next_symmetric();
        unorm2 += u[i] * u[i];
      }
    } while (unorm2 < 1e-4);

    double t_target = cfg.t_lo + (cfg.t_hi - cfg.t_lo) * rng.next_unit();
    if (k == 0 && cfg.t_lo == 0.0) t_target = 0.0;

    BasePointData bp = metric_at(sf, x);
    double gnorm2 = 0.0;
    for (int i = 0; i < sf.n; ++i)
      for (int j = 0; j < sf.n; ++j) gnorm2 += bp.g(i, j) * u[i] * u[j];
    double scale = std::sqrt(2.0 * t_target / gnorm2);
    for (auto& ui : u) ui *= scale;
    pts.push_back(make_tangent_point(sf, x, u));
  }
  return pts;
}

}  // namespace norden
