#include "mfg/control/cost.hpp"

#include <cmath>

namespace mfg {
namespace {

double sq(double v) { return v * v; }

}  // namespace

CostWeights make_cost_weights(const DrivingStyle& style) {
  CostWeights w;
  w.w_aggr = 1.0 - style.alpha_aggr;
  w.u_comfort = 0.6 * style.a_max;
  w.w_fuel = style.cls == StyleClass::kConservative ? 0.15 : 0.05;
  return w;
}

ReferenceProfile make_lane_keep_ref(const DrivingStyle& style, int T_steps, double dt) {
  ReferenceProfile ref;
  ref.nearest_lane = true;
  ref.v_des = style.v_des;
  ref.s_ref.resize(static_cast<std::size_t>(T_steps) + 1);
  for (int t = 0; t <= T_steps; ++t)
    ref.s_ref[static_cast<std::size_t>(t)] = style.v_des * t * dt;
  return ref;
}

ReferenceProfile make_lane_change_ref(const DrivingStyle& style, double d_from,
                                      double d_to, double t1, double t2, int T_steps,
                                      double dt, double s_start) {
  ReferenceProfile ref;
  ref.v_des = style.v_des;
  ref.s_ref.resize(static_cast<std::size_t>(T_steps) + 1);
  ref.d_target.resize(static_cast<std::size_t>(T_steps) + 1);
  ref.delta_plan.resize(static_cast<std::size_t>(T_steps) + 1, 0);
  const int dir = d_to > d_from ? 1 : (d_to < d_from ? -1 : 0);
  for (int t = 0; t <= T_steps; ++t) {
    const double tt = t * dt;
    ref.s_ref[static_cast<std::size_t>(t)] = s_start + style.v_des * tt;
    double frac = 0.0;
    if (tt >= t2)
      frac = 1.0;
    else if (tt > t1)
      frac = (tt - t1) / (t2 - t1);
    ref.d_target[static_cast<std::size_t>(t)] = d_from + (d_to - d_from) * frac;
    if (tt > t1 && tt < t2) ref.delta_plan[static_cast<std::size_t>(t)] = dir;
  }
  return ref;
}

CostBreakdown cost_components(
    const VehicleState& x, const ControlInput& u, const ControlInput& u_prev,
    const DensityTensor& rho, const DrivingStyle& theta, const ReferenceProfile& ref,
    int t, const CostWeights& w, const SafetyParams& p, const StateBounds& bounds,
    const LaneGeometry& geo, double dt,
    std::span<const std::pair<VehicleState, DrivingStyle>> others) {
  CostBreakdown out;
  const double d_tgt = ref.d_at(t, x.d, geo);

  // tracking
  out.track += w.Q[0] * sq(x.s - ref.s_at(t));
  out.track += w.Q[1] * sq(x.v_s - ref.v_at(t));
  out.track += w.Q[2] * sq(x.a_s);
  out.track += w.Q[3] * sq(x.d - d_tgt);
  out.track += w.Q[4] * sq(x.v_d);
  out.track += w.Q[5] * sq(x.a_d);
  out.track += w.R[0] * sq(u.u_a);
  out.track += w.R[1] * sq(u.u_d);
  out.track += w.R[2] * sq(static_cast<double>(u.delta - ref.delta_at(t)));
  out.track += w.S[0] * sq((u.u_a - u_prev.u_a) / dt);
  out.track += w.S[1] * sq((u.u_d - u_prev.u_d) / dt);

  // safety: field quadrature, boundary clearance, discrete pairs
  const double field_risk = instantaneous_risk(x, theta, rho, {}, p, bounds);
  double discrete = 0.0;
  for (const auto& [xj, tj] : others) discrete += discrete_weight(x, xj, theta, tj, p);
  out.safety = theta.omega_interact * field_risk +
               theta.kappa_safe * boundary_penalty(geo.clearance_to_boundary(x.d), p) +
               theta.alpha_aggr * discrete;

  // comfort
  const double ju_a = (u.u_a - u_prev.u_a) / dt;
  const double ju_d = (u.u_d - u_prev.u_d) / dt;
  out.comfort += w.w_jerk * (sq(ju_a) + sq(ju_d));
  out.comfort += w.w_lateral * sq(u.u_d);
  const double u_norm = std::sqrt(sq(u.u_a) + sq(u.u_d));
  if (u_norm > w.u_comfort) out.comfort += w.w_aggr;
  if (std::isfinite(geo.curvature_radius))
    out.comfort += w.w_centripetal * sq(sq(x.v_s) / geo.curvature_radius - w.a_cent_des);

  out.fuel = w.w_fuel * sq(u.u_a);

  // lane change
  if (std::abs(x.d - d_tgt) > w.eps_lane) out.lane += w.w_mandatory;
  if (u.delta != 0)
    out.lane += w.w_transition * sq(static_cast<double>(u.delta)) *
                lane_transition_margin(x, theta, rho, p, bounds);
  out.lane += w.w_smoothness * sq(x.v_d);
  return out;
}

double terminal_cost(const VehicleState& x, const DrivingStyle& theta,
                     const ReferenceProfile& ref, int T_steps, const CostWeights& w,
                     const LaneGeometry& geo) {
  (void)theta;
  const double d_tgt = ref.d_at(T_steps, x.d, geo);
  double c = 0.0;
  c += w.Q[0] * sq(x.s - ref.s_at(T_steps));
  c += w.Q[1] * sq(x.v_s - ref.v_at(T_steps));
  c += w.Q[2] * sq(x.a_s);
  c += w.Q[3] * sq(x.d - d_tgt);
  c += w.Q[4] * sq(x.v_d);
  c += w.Q[5] * sq(x.a_d);
  return c;
}

}  // namespace mfg
