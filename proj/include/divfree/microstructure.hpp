#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "divfree/rng.hpp"
#include "divfree/spectral_grid.hpp"

namespace divfree {

struct MicrostructureConfig {
  double s_u = 1.0 / 3.0;     // target mean grain size as fraction of ell_u
  double e_min = 50.0;        // GPa
  double e_max = 200.0;       // GPa
  double nu_min = 0.25;
  double nu_max = 0.35;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(s_u > 0.0 && s_u <= 1.0)) throw std::invalid_argument("MicrostructureConfig: need 0 < s_u <= 1");
    if (!(e_min > 0.0 && e_max >= e_min)) throw std::invalid_argument("MicrostructureConfig: bad E range");
    if (!(nu_min > 0.0 && nu_min <= nu_max && nu_max < 0.5))
      throw std::invalid_argument("MicrostructureConfig: bad nu range");
  }

  // expected grain area ~ (s_u * ell_u)^2, hence round(s_u^-2) seeds in 2D
  int seed_count() const { return std::max(1, static_cast<int>(std::llround(1.0 / (s_u * s_u)))); }
};

struct Microstructure {
  int n_dis = 0;
  int n_grains = 0;
  std::vector<int> grain_id;      // [n][n]
  std::vector<double> e_field;    // GPa, constant per grain
  std::vector<double> nu_field;   // constant per grain
};

struct SeedPoint {
  double x1, x2;
};

// Nearest-seed assignment under the wrap-around Euclidean metric. Equidistant
// pixels go to the lowest seed index.
inline std::vector<int> assign_voronoi(const std::vector<SeedPoint>& seeds, const GridConfig& grid) {
  const int n = grid.n_dis;
  const double ell = grid.ell_u;
  std::vector<int> ids(static_cast<std::size_t>(n) * n, 0);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      double x1 = ell * static_cast<double>(i1) / n;
      double x2 = ell * static_cast<double>(i2) / n;
      double best = -1.0;
      int best_id = 0;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        double d1 = std::fabs(x1 - seeds[s].x1);
        double d2 = std::fabs(x2 - seeds[s].x2);
        d1 = std::min(d1, ell - d1);
        d2 = std::min(d2, ell - d2);
        double d = d1 * d1 + d2 * d2;
        if (best < 0.0 || d < best) {
          best = d;
          best_id = static_cast<int>(s);
        }
      }
      ids[static_cast<std::size_t>(i1) * n + i2] = best_id;
    }
  return ids;
}

inline Microstructure voronoi_tessellate(const MicrostructureConfig& cfg, const GridConfig& grid) {
  cfg.validate();
  grid.validate();
  const int n_seeds = cfg.seed_count();
  CounterRng rng(cfg.seed, "microstructure");
  std::vector<SeedPoint> seeds(n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    seeds[s].x1 = rng.uniform(0.0, grid.ell_u);
    seeds[s].x2 = rng.uniform(0.0, grid.ell_u);
  }
  Microstructure m;
  m.n_dis = grid.n_dis;
  m.n_grains = n_seeds;
  m.grain_id = assign_voronoi(seeds, grid);
  std::vector<double> e_grain(n_seeds), nu_grain(n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    e_grain[s] = rng.uniform(cfg.e_min, cfg.e_max);
    nu_grain[s] = rng.uniform(cfg.nu_min, cfg.nu_max);
  }
  const std::size_t np = m.grain_id.size();
  m.e_field.resize(np);
  m.nu_field.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    m.e_field[p] = e_grain[m.grain_id[p]];
    m.nu_field[p] = nu_grain[m.grain_id[p]];
  }
  return m;
}

// The two NA input channels carried by the microstructure.
inline std::pair<const std::vector<double>*, const std::vector<double>*> property_fields(
    const Microstructure& m) {
  return {&m.e_field, &m.nu_field};
}

// Pixels whose grain id differs from a periodic 4-neighbour.
inline std::vector<bool> grain_boundary_mask(const Microstructure& m) {
  const int n = m.n_dis;
  std::vector<bool> mask(static_cast<std::size_t>(n) * n, false);
  auto id = [&](int i1, int i2) { return m.grain_id[static_cast<std::size_t>((i1 + n) % n) * n + (i2 + n) % n]; };
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      int c = id(i1, i2);
      if (id(i1 + 1, i2) != c || id(i1 - 1, i2) != c || id(i1, i2 + 1) != c || id(i1, i2 - 1) != c)
        mask[static_cast<std::size_t>(i1) * n + i2] = true;
    }
  return mask;
}

}  // namespace divfree
