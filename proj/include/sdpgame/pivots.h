#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sdpgame/poly.h"

namespace sdpgame {

struct PivotPoint {
  double h = 0, v = 0, w = 0;

  Point3 point() const { return make_point(h, v, w); }
  bool on_diagonal() const { return h == v && w == 0; }
  bool operator==(const PivotPoint&) const = default;
};

// True iff P1..P6 are all nonnegative at the point (evaluated exactly from
// the double inputs).
bool region_membership(const Point3& x, const GeometricParams& params);
bool region_membership(const PivotPoint& p, const GeometricParams& params);

struct PivotOptions {
  // Chebyshev nodes (t, t, 0) on [r^2, R^2], emitted first. A certificate
  // of degree d needs at least 2d + 1 of them.
  int diagonal_nodes = 13;
  // Chebyshev grid in h <= v and in w.
  int grid_hv = 6;
  int grid_w = 5;
  // Low-discrepancy fill attempts before giving up.
  int fill_budget = 200000;
};

class PivotExhausted : public std::runtime_error {
 public:
  PivotExhausted(int found, int wanted);
  int found() const { return found_; }

 private:
  int found_;
};

// Exactly K distinct points of the admissible region, deterministic in
// (params, K, seed, options). Points are stored with h <= v since every row
// is symmetric under swapping them.
std::vector<PivotPoint> generate_pivots(const GeometricParams& params, int K,
                                        uint64_t seed,
                                        const PivotOptions& options = {});

// Chebyshev-Gauss nodes on [lo, hi], ascending.
std::vector<double> chebyshev_nodes(int count, double lo, double hi);

// Radical inverse in the given prime base (Halton coordinate).
double radical_inverse(uint64_t index, int base);

}  // namespace sdpgame
