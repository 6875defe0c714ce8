#pragma once

#include <cstdint>
#include <vector>

#include "mfg/core/scenario.hpp"
#include "mfg/core/style.hpp"

namespace mfg {

// Hierarchical lane-change path parameterization: global endpoints, local
// maneuver geometry, timing, transition shape, and the slowdown dip.
struct PathParams {
  // global
  double s_start = 0.0;
  double s_end = 0.0;
  double d_init = 0.0;
  double d_target = 0.0;
  double v_target = 0.0;
  // local
  double s_lc_start = 0.0;
  double s_lc_end = 0.0;
  double phi_transition = 0.0;
  double kappa_smooth = 0.0;
  // temporal
  double t_start = 0.0;
  double t_end = 0.0;
  double tau_transition = 0.0;
  double sigma_timing = 0.0;
  // shape
  double beta_k = 1.0;
  double gamma_k = 0.0;
  int n_k = 2;
  // slowdown
  double eps_slowdown = 0.1;
  double sigma_slowdown = 20.0;
  double s_mid = 0.0;
};

// Smooth 0->1 ramp with a style ripple; anchored at both ends.
double transition_fn(double xi, double beta_k, double gamma_k, int n_k);

// Piecewise lateral profile: d_init before the maneuver, blended inside,
// d_target after.
double lateral_profile(double s, const PathParams& p);

// Desired-speed profile with a Gaussian slowdown dip and the style factor.
double velocity_profile(double s, const PathParams& p, const DrivingStyle& style);

double style_velocity_factor(StyleClass cls);

// Preferred transition sharpness for an aggressiveness level.
inline double preferred_beta(double alpha_aggr) { return 0.5 + 1.5 * alpha_aggr; }

struct CandidatePath {
  PathParams params;
  std::vector<VehicleState> states;  // sampled at dt, starting at t = 0
  double dt = 0.1;
};

struct CandidateRanges {
  double lc_start_min = 5.0, lc_start_max = 25.0;  // offset ahead of ego
  double lc_len_min = 40.0, lc_len_max = 110.0;
  double beta_rel_min = 0.7, beta_rel_max = 1.3;
  double eps_slowdown_min = 0.05, eps_slowdown_max = 0.15;
  double sigma_slowdown = 20.0;
  double tail = 30.0;          // run-out past the maneuver end
  double eps_target = 2.0;     // m endpoint tolerance
  int retry_cap = 20;
};

// Deterministic seeded sampling of feasible candidates; paths violating
// the admissible bounds are resampled up to the retry cap. Throws when no
// feasible candidate can be produced.
std::vector<CandidatePath> generate_candidates(const ScenarioConfig& sc,
                                               const VehicleState& ego,
                                               const DrivingStyle& theta_ego, int n,
                                               std::uint64_t seed,
                                               const CandidateRanges& ranges = {});

}  // namespace mfg
