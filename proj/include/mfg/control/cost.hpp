#pragma once

#include <array>
#include <span>
#include <vector>

#include "mfg/core/scenario.hpp"
#include "mfg/field/density.hpp"
#include "mfg/safety/safety.hpp"

namespace mfg {

// Style-dependent weights of the running and terminal costs.
struct CostWeights {
  std::array<double, 6> Q{0.0, 1.0, 0.1, 4.0, 0.5, 0.1};  // state tracking
  std::array<double, 3> R{0.5, 1.0, 0.2};                 // control effort
  std::array<double, 2> S{0.1, 0.1};                      // control rate
  double w_jerk = 0.1;
  double w_lateral = 0.5;
  double w_aggr = 0.5;         // 1 - alpha_aggr
  double w_centripetal = 0.1;
  double u_comfort = 1.5;      // 0.6 * a_max_i
  double a_cent_des = 0.0;
  double w_fuel = 0.05;        // 0.15 for conservative drivers
  double w_mandatory = 5.0;
  double w_transition = 1.0;
  double w_smoothness = 0.5;
  double eps_lane = 0.3;
};

CostWeights make_cost_weights(const DrivingStyle& style);

// Reference schedules per time step. In nearest-lane mode the lateral
// target is the closest lane center to the evaluated state (lane
// keeping); otherwise the d_target schedule applies.
struct ReferenceProfile {
  bool nearest_lane = false;
  double v_des = 25.0;
  std::vector<double> s_ref;
  std::vector<double> d_target;
  std::vector<double> v_ref;
  std::vector<int> delta_plan;

  double s_at(int t) const { return s_ref.empty() ? 0.0 : s_ref[clamp_t(t, s_ref.size())]; }
  double v_at(int t) const { return v_ref.empty() ? v_des : v_ref[clamp_t(t, v_ref.size())]; }
  int delta_at(int t) const {
    return delta_plan.empty() ? 0 : delta_plan[clamp_t(t, delta_plan.size())];
  }
  double d_at(int t, double d_now, const LaneGeometry& geo) const {
    if (nearest_lane) return geo.lane_centers[static_cast<std::size_t>(geo.nearest_lane(d_now))];
    return d_target.empty() ? 0.0 : d_target[clamp_t(t, d_target.size())];
  }

 private:
  static std::size_t clamp_t(int t, std::size_t n) {
    if (t < 0) return 0;
    return std::min(static_cast<std::size_t>(t), n - 1);
  }
};

ReferenceProfile make_lane_keep_ref(const DrivingStyle& style, int T_steps, double dt);

// Lateral target blends linearly from d_from to d_to over [t1, t2] (s);
// delta_plan carries the change direction inside the window.
ReferenceProfile make_lane_change_ref(const DrivingStyle& style, double d_from,
                                      double d_to, double t1, double t2, int T_steps,
                                      double dt, double s_start);

struct CostBreakdown {
  double track = 0.0;
  double safety = 0.0;
  double comfort = 0.0;
  double fuel = 0.0;
  double lane = 0.0;
  double total() const { return track + safety + comfort + fuel + lane; }
};

// Running cost rate at one state/control; the full-quadrature reference
// implementation of the stage cost.
CostBreakdown cost_components(
    const VehicleState& x, const ControlInput& u, const ControlInput& u_prev,
    const DensityTensor& rho, const DrivingStyle& theta, const ReferenceProfile& ref,
    int t, const CostWeights& w, const SafetyParams& p, const StateBounds& bounds,
    const LaneGeometry& geo, double dt,
    std::span<const std::pair<VehicleState, DrivingStyle>> others = {});

// Quadratic terminal tracking penalty.
double terminal_cost(const VehicleState& x, const DrivingStyle& theta,
                     const ReferenceProfile& ref, int T_steps, const CostWeights& w,
                     const LaneGeometry& geo);

}  // namespace mfg
