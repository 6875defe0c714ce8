#include "mfg/plan/path.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/sim/rng.hpp"

namespace mfg {

double transition_fn(double xi, double beta_k, double gamma_k, int n_k) {
  const double base = 0.5 * (1.0 - std::cos(M_PI * std::pow(xi, beta_k)));
  const double ripple =
      gamma_k * xi * xi * (1.0 - xi) * (1.0 - xi) * std::sin(2.0 * M_PI * n_k * xi);
  return base + ripple;
}

double lateral_profile(double s, const PathParams& p) {
  if (s <= p.s_lc_start) return p.d_init;
  if (s >= p.s_lc_end) return p.d_target;
  const double xi = (s - p.s_lc_start) / (p.s_lc_end - p.s_lc_start);
  return p.d_init + (p.d_target - p.d_init) * transition_fn(xi, p.beta_k, p.gamma_k, p.n_k);
}

double style_velocity_factor(StyleClass cls) {
  switch (cls) {
    case StyleClass::kSuperAggressive: return 1.2;
    case StyleClass::kAggressive:
    case StyleClass::kCompetitive: return 1.1;
    case StyleClass::kConservative: return 0.8;
    default: return 1.0;
  }
}

double velocity_profile(double s, const PathParams& p, const DrivingStyle& style) {
  const double z = (s - p.s_mid) / p.sigma_slowdown;
  const double dip = 1.0 - p.eps_slowdown * std::exp(-0.5 * z * z);
  return style.v_des * dip * style_velocity_factor(style.cls);
}

namespace {

// Integrates the s-parameterized profiles onto the simulation clock.
CandidatePath sample_path(const PathParams& p, const DrivingStyle& style, double dt,
                          double v0, int max_steps) {
  CandidatePath path;
  path.params = p;
  path.dt = dt;
  double s = p.s_start;
  double v = v0;
  path.states.reserve(static_cast<std::size_t>(max_steps) + 1);
  for (int t = 0; t <= max_steps; ++t) {
    VehicleState x;
    x.s = s;
    x.v_s = v;
    x.d = lateral_profile(s, p);
    path.states.push_back(x);
    if (s >= p.s_end && t > 0) break;
    // relax toward the profile speed within the style's accel envelope
    const double v_want = velocity_profile(s, p, style);
    const double dv = std::clamp((v_want - v) / dt, style.a_min, style.a_max);
    v = v + dv * dt;
    s += v * dt;
  }
  // lateral derivatives from differences
  const std::size_t n = path.states.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    path.states[i].v_d = (path.states[i + 1].d - path.states[i].d) / dt;
    path.states[i].a_s = (path.states[i + 1].v_s - path.states[i].v_s) / dt;
  }
  if (n >= 2) {
    path.states[n - 1].v_d = path.states[n - 2].v_d;
    path.states[n - 1].a_s = path.states[n - 2].a_s;
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    path.states[i].a_d = (path.states[i + 1].v_d - path.states[i].v_d) / dt;
  if (n >= 2) path.states[n - 1].a_d = path.states[n - 2].a_d;
  return path;
}

bool feasible(const CandidatePath& path, const ScenarioConfig& sc, double eps_target) {
  if (path.states.size() < 2) return false;
  const StateBounds& b = sc.bounds;
  for (const auto& x : path.states) {
    const double speed = std::sqrt(x.v_s * x.v_s + x.v_d * x.v_d);
    const double accel = std::sqrt(x.a_s * x.a_s + x.a_d * x.a_d);
    if (speed > b.v_max || accel > b.a_max) return false;
    if (std::abs(x.d) > b.d_max) return false;
  }
  const VehicleState& last = path.states.back();
  const double d_tgt = path.params.d_target;
  if (std::abs(last.d - d_tgt) > eps_target) return false;
  if (last.s < path.params.s_lc_end) return false;
  return true;
}

}  // namespace

std::vector<CandidatePath> generate_candidates(const ScenarioConfig& sc,
                                               const VehicleState& ego,
                                               const DrivingStyle& theta_ego, int n,
                                               std::uint64_t seed,
                                               const CandidateRanges& ranges) {
  if (n < 1) throw std::invalid_argument("candidate count must be positive");
  const CounterRng rng{seed};
  const double d_target =
      sc.geometry.lane_centers[static_cast<std::size_t>(sc.target_lane)];
  const int max_steps = sc.steps();
  std::vector<CandidatePath> out;
  out.reserve(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < ranges.retry_cap && !accepted; ++attempt) {
      const std::uint64_t k = static_cast<std::uint64_t>(i) * 1000 +
                              static_cast<std::uint64_t>(attempt);
      PathParams p;
      p.s_start = ego.s;
      p.d_init = ego.d;
      p.d_target = d_target;
      p.s_lc_start =
          ego.s + rng.uniform_range(ranges.lc_start_min, ranges.lc_start_max, k, 1);
      const double len = rng.uniform_range(ranges.lc_len_min, ranges.lc_len_max, k, 2);
      p.s_lc_end = p.s_lc_start + len;
      p.s_end = p.s_lc_end + ranges.tail;
      p.v_target = theta_ego.v_des * style_velocity_factor(theta_ego.cls);
      const double beta_pref = preferred_beta(theta_ego.alpha_aggr);
      p.beta_k = beta_pref * rng.uniform_range(ranges.beta_rel_min, ranges.beta_rel_max, k, 3);
      p.gamma_k = 0.05 * theta_ego.alpha_aggr * rng.uniform(k, 4);
      p.n_k = 1 + static_cast<int>(rng.uniform(k, 5) * 3.0);
      p.eps_slowdown =
          rng.uniform_range(ranges.eps_slowdown_min, ranges.eps_slowdown_max, k, 6);
      p.sigma_slowdown = ranges.sigma_slowdown;
      p.s_mid = 0.5 * (p.s_lc_start + p.s_lc_end);
      p.t_start = 0.0;
      p.tau_transition = len / std::max(theta_ego.v_des, 1.0);
      p.t_end = p.tau_transition;
      p.sigma_timing = rng.uniform(k, 7);
      p.phi_transition = std::atan2(p.d_target - p.d_init, len);
      p.kappa_smooth = p.beta_k;

      CandidatePath path = sample_path(p, theta_ego, sc.dt, ego.v_s, max_steps);
      if (feasible(path, sc, ranges.eps_target)) {
        out.push_back(std::move(path));
        accepted = true;
      }
    }
    if (!accepted)
      throw std::runtime_error("no feasible candidate path after retries");
  }
  return out;
}

}  // namespace mfg
