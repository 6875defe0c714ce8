#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfg {

// Frenet state of one vehicle: longitudinal (s, v_s, a_s) and lateral
// (d, v_d, a_d) relative to the reference path.
struct VehicleState {
  double s = 0.0;    // m
  double v_s = 0.0;  // m/s
  double a_s = 0.0;  // m/s^2
  double d = 0.0;    // m, lateral offset
  double v_d = 0.0;  // m/s
  double a_d = 0.0;  // m/s^2
};

inline double planar_distance(const VehicleState& a, const VehicleState& b) {
  const double ds = a.s - b.s;
  const double dd = a.d - b.d;
  return std::sqrt(ds * ds + dd * dd);
}

// Heading angle implied by the velocity vector; 0 for a resting vehicle.
inline double heading(const VehicleState& x) {
  if (x.v_s == 0.0 && x.v_d == 0.0) return 0.0;
  return std::atan2(x.v_d, x.v_s);
}

struct StateBounds {
  double s_max = 1500.0;
  double v_max = 40.0;
  double a_max = 6.5;
  double d_max = 5.625;
  double v_d_max = 3.0;
  double a_d_max = 3.0;
};

inline VehicleState clamp_state(VehicleState x, const StateBounds& b) {
  x.s = std::clamp(x.s, 0.0, b.s_max);
  x.v_s = std::clamp(x.v_s, 0.0, b.v_max);
  x.a_s = std::clamp(x.a_s, -b.a_max, b.a_max);
  x.d = std::clamp(x.d, -b.d_max, b.d_max);
  x.v_d = std::clamp(x.v_d, -b.v_d_max, b.v_d_max);
  x.a_d = std::clamp(x.a_d, -b.a_d_max, b.a_d_max);
  return x;
}

// Acceleration commands plus the discrete lane-change decision.
struct ControlInput {
  double u_a = 0.0;  // m/s^2 longitudinal
  double u_d = 0.0;  // m/s^2 lateral
  int delta = 0;     // {-1, 0, +1}
};

struct LaneGeometry {
  double lane_width = 3.75;
  // Ordered lateral offsets of lane centers, ascending.
  std::vector<double> lane_centers{-3.75, 0.0, 3.75};
  double road_length = 1500.0;
  double curvature_radius = std::numeric_limits<double>::infinity();

  double edge_low() const { return lane_centers.front() - 0.5 * lane_width; }
  double edge_high() const { return lane_centers.back() + 0.5 * lane_width; }
  // Distance from lateral offset d to the closest road boundary
  // (negative when outside the drivable band).
  double clearance_to_boundary(double d) const {
    return std::min(edge_high() - d, d - edge_low());
  }
  int nearest_lane(double d) const {
    int best = 0;
    double bd = std::abs(d - lane_centers[0]);
    for (int i = 1; i < static_cast<int>(lane_centers.size()); ++i) {
      const double c = std::abs(d - lane_centers[i]);
      if (c < bd) {
        bd = c;
        best = i;
      }
    }
    return best;
  }
};

}  // namespace mfg
