#pragma once

#include <cmath>

#include "mfg/core/types.hpp"

namespace mfg {

// Structured cell grid over (s, d). Cell (j, k) is centered at
// (s0 + (k+1/2) ds, d0 + (j+1/2) dd); k runs longitudinally.
struct GridSpec {
  int K = 150;  // longitudinal cells
  int J = 15;   // lateral cells
  double ds = 10.0;
  double dd = 0.75;
  double s0 = 0.0;
  double d0 = -5.625;

  static GridSpec from_bounds(const StateBounds& b, int K, int J) {
    GridSpec g;
    g.K = K;
    g.J = J;
    g.ds = b.s_max / K;
    g.dd = 2.0 * b.d_max / J;
    g.s0 = 0.0;
    g.d0 = -b.d_max;
    return g;
  }

  double center_s(int k) const { return s0 + (k + 0.5) * ds; }
  double center_d(int j) const { return d0 + (j + 0.5) * dd; }
  double s_extent() const { return K * ds; }
  double d_extent() const { return J * dd; }
  bool contains(double s, double d) const {
    return s >= s0 && s <= s0 + s_extent() && d >= d0 && d <= d0 + d_extent();
  }
  // Fractional cell coordinates of a point (relative to cell centers),
  // clamped into the valid interpolation range.
  double frac_k(double s) const {
    const double f = (s - s0) / ds - 0.5;
    return std::clamp(f, 0.0, static_cast<double>(K - 1));
  }
  double frac_j(double d) const {
    const double f = (d - d0) / dd - 0.5;
    return std::clamp(f, 0.0, static_cast<double>(J - 1));
  }
  int cell_k(double s) const {
    return std::clamp(static_cast<int>((s - s0) / ds), 0, K - 1);
  }
  int cell_j(double d) const {
    return std::clamp(static_cast<int>((d - d0) / dd), 0, J - 1);
  }
  double cell_area() const { return ds * dd; }
};

}  // namespace mfg
