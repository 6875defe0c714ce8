#pragma once

#include <array>

#include "mfg/field/density.hpp"

namespace mfg {

using Mat6 = std::array<double, 36>;  // row-major 6x6
using Vec6 = std::array<double, 6>;

inline Vec6 mat6_apply(const Mat6& m, const Vec6& v) {
  Vec6 out{};
  for (int r = 0; r < 6; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) acc += m[static_cast<std::size_t>(r * 6 + c)] * v[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

struct InteractionParams {
  double sigma_s_base_sq = 225.0;  // m^2
  double sigma_d_base_sq = 4.0;    // m^2
  double sigma_theta = 1.0;
  std::array<double, 7> style_weight{1, 1, 1, 1, 1, 1, 1};  // W diagonal
  // Cross-style matrix entries in the order
  // (v, a, va, av, aa, d, da, vd, ad, add); all zero by default.
  std::array<double, 10> lambda{};
  double coupling_gain = 1.0;  // g_h

  bool lambda_is_zero() const {
    for (double v : lambda)
      if (v != 0.0) return false;
    return true;
  }
};

// Anisotropic Gaussian spatial kernel in (0, 1].
double spatial_kernel(const VehicleState& xi, const VehicleState& xj,
                      const DrivingStyle& ti, const DrivingStyle& tj,
                      const InteractionParams& p);

// Style-dependent interaction ranges.
double sigma_s_sq(const DrivingStyle& ti, const DrivingStyle& tj,
                  const InteractionParams& p);
double sigma_d_sq(const DrivingStyle& ti, const DrivingStyle& tj,
                  const InteractionParams& p);

// Block-diagonal geometric matrix built from the bearing and heading
// offsets. Throws for coincident positions.
Mat6 geometric_matrix(const VehicleState& xi, const VehicleState& xj, double phi_i,
                      double phi_j);

// Scalar compatibility times identity plus the sparse cross-style matrix.
// Style components are min-max normalized by the catalog envelope before
// weighting.
Mat6 style_compatibility(const DrivingStyle& ti, const DrivingStyle& tj,
                         const InteractionParams& p);

double style_compatibility_scalar(const DrivingStyle& ti, const DrivingStyle& tj,
                                  const InteractionParams& p);

// Aggregated repulsive drift increment felt at x from the whole measure.
// Mass within one cell of x is treated as the vehicle's own bump and
// skipped. Throws when x is outside the grid.
Vec6 mean_field_coupling(const VehicleState& x, const DrivingStyle& theta,
                         const DensityTensor& rho, const InteractionParams& p);

// Kernel intensity of the measure as felt by style theta, per grid cell
// (the influence-surface export).
std::vector<double> interaction_intensity(const DensityTensor& rho,
                                          const DrivingStyle& theta,
                                          const InteractionParams& p);

}  // namespace mfg
