#include "sdpgame/pivots.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

namespace sdpgame {

bool region_membership(const Point3& x, const GeometricParams& params) {
  const auto vals = evaluate_base(params, x);
  for (int k = 0; k < 6; ++k) {
    if (vals[k] < 0) return false;
  }
  return true;
}

bool region_membership(const PivotPoint& p, const GeometricParams& params) {
  return region_membership(p.point(), params);
}

PivotExhausted::PivotExhausted(int found, int wanted)
    : std::runtime_error("pivot generation exhausted: found " +
                         std::to_string(found) + " of " +
                         std::to_string(wanted) + " admissible points"),
      found_(found) {}

std::vector<double> chebyshev_nodes(int count, double lo, double hi) {
  std::vector<double> out;
  for (int k = count - 1; k >= 0; --k) {
    const double c = std::cos((2.0 * k + 1.0) * M_PI / (2.0 * count));
    out.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * c);
  }
  return out;
}

double radical_inverse(uint64_t index, int base) {
  double inv = 1.0 / base, f = inv, out = 0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

std::vector<PivotPoint> generate_pivots(const GeometricParams& params, int K,
                                        uint64_t seed,
                                        const PivotOptions& options) {
  params.validate();
  if (K < 1) throw std::invalid_argument("pivot count must be >= 1");
  const double r2 = params.r * params.r, R2 = params.R * params.R;

  std::vector<PivotPoint> out;
  std::set<std::tuple<double, double, double>> seen;
  auto take = [&](PivotPoint p) {
    if (static_cast<int>(out.size()) >= K) return;
    if (p.h > p.v) std::swap(p.h, p.v);
    if (p.w == 0) p.w = 0;  // fold -0
    if (!region_membership(p, params)) return;
    if (!seen.insert({p.h, p.v, p.w}).second) return;
    out.push_back(p);
  };

  for (double t : chebyshev_nodes(options.diagonal_nodes, r2, R2)) {
    take({t, t, 0.0});
  }
  if (static_cast<int>(out.size()) >= K) return out;

  std::vector<PivotPoint> grid;
  const auto hv = chebyshev_nodes(options.grid_hv, r2, R2);
  for (size_t i = 0; i < hv.size(); ++i) {
    for (size_t j = i; j < hv.size(); ++j) {
      const double h = hv[i], v = hv[j];
      const double s = std::sqrt(h * v);
      for (double w : chebyshev_nodes(options.grid_w, -s, s)) {
        PivotPoint p{h, v, w};
        if (region_membership(p, params) && !seen.count({h, v, w})) {
          grid.push_back(p);
        }
      }
    }
  }
  const int need = K - static_cast<int>(out.size());
  if (static_cast<int>(grid.size()) <= need) {
    for (const auto& p : grid) take(p);
  } else {
    // Even stride so the subset spreads over the whole grid.
    for (int k = 0; k < need; ++k) {
      take(grid[static_cast<size_t>(k) * grid.size() / need]);
    }
  }

  // Halton fill with a seeded Cranley-Patterson rotation.
  std::mt19937_64 rng(seed);
  const double shift[3] = {static_cast<double>(rng() >> 11) * 0x1.0p-53,
                           static_cast<double>(rng() >> 11) * 0x1.0p-53,
                           static_cast<double>(rng() >> 11) * 0x1.0p-53};
  for (int it = 1; it <= options.fill_budget &&
                   static_cast<int>(out.size()) < K;
       ++it) {
    double u[3];
    const int bases[3] = {2, 3, 5};
    for (int c = 0; c < 3; ++c) {
      u[c] = radical_inverse(static_cast<uint64_t>(it), bases[c]) + shift[c];
      u[c] -= std::floor(u[c]);
    }
    const double h = r2 + (R2 - r2) * u[0];
    const double v = r2 + (R2 - r2) * u[1];
    const double s = std::sqrt(h * v);
    take({h, v, -s + 2 * s * u[2]});
  }
  if (static_cast<int>(out.size()) < K) {
    throw PivotExhausted(static_cast<int>(out.size()), K);
  }
  return out;
}

}  // namespace sdpgame
