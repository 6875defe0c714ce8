#include "mfg/sim/simulate.hpp"

#include <cmath>

#include "mfg/common/threading.hpp"

namespace mfg {
namespace {

// First-order actuation lag: commanded acceleration is reached on the
// style's reaction-time scale.
void step_vehicle(VehicleState& x, const ControlInput& u, const DrivingStyle& st,
                  const Vec6& h, const StateBounds& bounds, double dt, bool noisy,
                  const NoiseModel& noise, const CounterRng& rng, int vehicle_id,
                  int step) {
  const ControlInput us = saturate_control(u, st, bounds);
  VehicleState n = x;
  n.a_s = x.a_s + dt * (us.u_a - x.a_s) / st.tau_react;
  n.a_d = x.a_d + dt * (us.u_d - x.a_d) / st.tau_react;
  n.v_s = x.v_s + dt * x.a_s + dt * h[1];
  n.v_d = x.v_d + dt * x.a_d + dt * h[4];
  n.s = x.s + dt * (x.v_s + h[0]);
  n.d = x.d + dt * (x.v_d + h[3]);
  if (noisy) {
    const double sp = noise.sigma_pos(st) * std::sqrt(dt);
    const double sv = noise.sigma_vel(st) * std::sqrt(dt);
    const auto id = static_cast<std::uint64_t>(vehicle_id);
    const auto ts = static_cast<std::uint64_t>(step);
    n.s += sp * rng.normal(id, ts, 0);
    n.v_s += sv * rng.normal(id, ts, 1);
    n.d += sp * rng.normal(id, ts, 2);
    n.v_d += sv * rng.normal(id, ts, 3);
  }
  x = clamp_state(n, bounds);
}

}  // namespace

std::pair<HjbProblem, ValueTable> make_tracker(const ScenarioConfig& sc,
                                               const EngineParams& ep,
                                               const EquilibriumState& eq,
                                               const CandidatePath* path) {
  (void)ep;
  const int ego_slab = eq.rho_seq.front().slab_of(sc.ego().style);
  HjbProblem prob = eq.problems[static_cast<std::size_t>(ego_slab)];
  if (path) {
    // reference from the selected path, padded with its endpoint
    ReferenceProfile ref;
    ref.v_des = prob.style.v_des;
    const int T = prob.T_steps;
    ref.s_ref.resize(static_cast<std::size_t>(T) + 1);
    ref.d_target.resize(static_cast<std::size_t>(T) + 1);
    ref.v_ref.resize(static_cast<std::size_t>(T) + 1);
    ref.delta_plan.resize(static_cast<std::size_t>(T) + 1, 0);
    const auto& states = path->states;
    const int dir = path->params.d_target > path->params.d_init
                        ? 1
                        : (path->params.d_target < path->params.d_init ? -1 : 0);
    for (int t = 0; t <= T; ++t) {
      const std::size_t i = std::min(static_cast<std::size_t>(t), states.size() - 1);
      ref.s_ref[static_cast<std::size_t>(t)] = states[i].s;
      ref.d_target[static_cast<std::size_t>(t)] = states[i].d;
      ref.v_ref[static_cast<std::size_t>(t)] = states[i].v_s;
      const double s = states[i].s;
      if (s > path->params.s_lc_start && s < path->params.s_lc_end)
        ref.delta_plan[static_cast<std::size_t>(t)] = dir;
    }
    prob.ref = std::move(ref);
  } else {
    prob.ref = make_lane_keep_ref(prob.style, prob.T_steps, sc.dt);
  }
  prob.store_values = false;
  ValueTable vt = hjb_backward_solve(prob, eq.rho_seq);
  return {std::move(prob), std::move(vt)};
}

SimResult simulate(const ScenarioConfig& sc, const EquilibriumState& eq,
                   const EngineParams& ep, const HjbProblem& tracker_prob,
                   const ValueTable& tracker_table,
                   const std::map<int, std::vector<VehicleState>>& replays,
                   std::uint64_t seed) {
  SimResult out;
  const int T = sc.steps();
  const CounterRng rng{seed};
  const DensityTensor& rho0 = eq.rho_seq.front();

  struct Agent {
    VehicleSpec spec;
    DrivingStyle style;
    VehicleState x;
    int slab;
    const std::vector<VehicleState>* replay = nullptr;
  };
  std::vector<Agent> agents;
  for (const auto& v : sc.vehicles) {
    Agent a;
    a.spec = v;
    a.slab = rho0.slab_of(v.style);
    a.style = rho0.style_params[static_cast<std::size_t>(a.slab)];
    a.x = sc.initial_state(v);
    if (v.replayed) {
      const auto it = replays.find(v.id);
      if (it == replays.end())
        throw std::invalid_argument("replay data missing for vehicle " +
                                    std::to_string(v.id));
      a.replay = &it->second;
      if (!a.replay->empty()) a.x = a.replay->front();
    }
    agents.push_back(std::move(a));
  }

  const double d_target =
      sc.geometry.lane_centers[static_cast<std::size_t>(sc.target_lane)];
  std::vector<double> ego_speeds;
  std::vector<double> ego_lateral;

  for (int t = 0; t < T; ++t) {
    const DensityTensor& rho_t = eq.rho_seq[static_cast<std::size_t>(t)];
    // controls decided on the current states
    std::vector<ControlInput> controls(agents.size());
    std::vector<Vec6> drifts(agents.size(), Vec6{});
    for (std::size_t i = 0; i < agents.size(); ++i) {
      Agent& a = agents[i];
      if (a.replay) continue;
      if (rho_t.grid.contains(a.x.s, a.x.d))
        drifts[i] = mean_field_coupling(a.x, a.style, rho_t, ep.interaction);
      const bool is_ego = a.spec.id == sc.ego_id;
      const HjbProblem& pb =
          is_ego ? tracker_prob : eq.problems[static_cast<std::size_t>(a.slab)];
      const ValueTable& vt =
          is_ego ? tracker_table : eq.policies[static_cast<std::size_t>(a.slab)];
      const int k = pb.grid.cell_k(a.x.s);
      const int j = pb.grid.cell_j(a.x.d);
      const int b = pb.vbins.nearest(a.x.v_s);
      const std::size_t cell = (static_cast<std::size_t>(b) * pb.grid.J + j) * pb.grid.K + k;
      const int tt = std::min(t, static_cast<int>(vt.policy.size()) - 1);
      controls[i] = pb.controls.control(vt.policy[static_cast<std::size_t>(tt)][cell]);
    }

    // log current step, then advance
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Agent& a = agents[i];
      out.log.rows.push_back({t * sc.dt, a.spec.id, a.x, controls[i], a.replay == nullptr});
    }

    // metrics against the ego
    const Agent* ego = nullptr;
    for (const auto& a : agents)
      if (a.spec.id == sc.ego_id) ego = &a;
    double dmin = std::numeric_limits<double>::infinity();
    double ttc_min = std::numeric_limits<double>::infinity();
    for (const auto& a : agents) {
      if (a.spec.id == sc.ego_id) continue;
      const double d = planar_distance(ego->x, a.x);
      dmin = std::min(dmin, d);
      if (d > 0.0) ttc_min = std::min(ttc_min, time_to_collision(ego->x, a.x));
      if (d <= ep.collision_dist) ++out.metrics.collision_count;
      if (d <= ep.safety.d_danger)
        ++out.metrics.danger_count;
      else if (d <= ep.safety.d_safe_threshold)
        ++out.metrics.warning_count;
      else
        ++out.metrics.safe_count;
    }
    out.metrics.min_distance.push_back(dmin);
    out.metrics.min_ttc.push_back(ttc_min);
    ego_speeds.push_back(ego->x.v_s);
    ego_lateral.push_back(ego->x.d);

    for (std::size_t i = 0; i < agents.size(); ++i) {
      Agent& a = agents[i];
      if (a.replay) {
        const std::size_t ri = std::min(static_cast<std::size_t>(t + 1),
                                        a.replay->size() - 1);
        a.x = (*a.replay)[ri];
        continue;
      }
      const bool is_ego = a.spec.id == sc.ego_id;
      step_vehicle(a.x, controls[i], a.style, drifts[i], sc.bounds, sc.dt, !is_ego,
                   ep.noise, rng, a.spec.id, t);
    }
  }

  // completion: first time the lateral offset settles within 0.2 m of the
  // target lane for the rest of the horizon
  for (std::size_t t = 0; t < ego_lateral.size(); ++t) {
    bool settled = true;
    for (std::size_t u = t; u < ego_lateral.size(); ++u)
      if (std::abs(ego_lateral[u] - d_target) > 0.2) {
        settled = false;
        break;
      }
    if (settled) {
      out.metrics.completion_time = static_cast<double>(t) * sc.dt;
      break;
    }
  }
  if (!ego_speeds.empty()) {
    double mean = 0.0;
    for (double v : ego_speeds) mean += v;
    mean /= static_cast<double>(ego_speeds.size());
    double var = 0.0;
    for (double v : ego_speeds) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ego_speeds.size());
    out.metrics.ego_speed_mean = mean;
    out.metrics.ego_speed_variance = var;
  }
  return out;
}

PipelineResult run_pipeline(const ScenarioConfig& sc, const EngineParams& ep,
                            const SolverParams& sp,
                            const std::map<int, std::vector<VehicleState>>& replays) {
  PipelineResult out;
  out.eq = run_equilibrium(sc, ep, sp);

  const VehicleState ego0 = sc.initial_state(sc.ego());
  const DrivingStyle ego_style =
      out.eq.rho_seq.front().style_params[static_cast<std::size_t>(
          out.eq.rho_seq.front().slab_of(sc.ego().style))];
  out.candidates =
      generate_candidates(sc, ego0, ego_style, ep.n_paths, sp.seed, ep.candidates);

  OthersPrediction others = predict_others_cv(sc, sc.steps());
  // replayed vehicles are predicted by their recordings
  for (std::size_t t = 0; t < others.size(); ++t) {
    std::size_t oi = 0;
    for (const auto& v : sc.vehicles) {
      if (v.id == sc.ego_id) continue;
      if (v.replayed) {
        const auto it = replays.find(v.id);
        if (it != replays.end() && !it->second.empty()) {
          const std::size_t ri = std::min(t, it->second.size() - 1);
          others[t][oi].first = it->second[ri];
        }
      }
      ++oi;
    }
  }

  out.evaluations.resize(out.candidates.size());
  parallel_for(out.candidates.size(), [&](std::size_t c) {
    out.evaluations[c] =
        evaluate_path(out.candidates[c], out.eq.rho_seq, out.eq.vel_seq, others,
                      ego_style, ep.eval, ep.safety, sc.bounds, sc.geometry);
  });

  const CandidatePath* chosen = nullptr;
  try {
    out.selected = select_path(out.candidates, out.evaluations, out.eq.rho_seq, others,
                               ego_style, ep.safety, sc.bounds);
    chosen = &out.candidates[static_cast<std::size_t>(out.selected)];
  } catch (const std::runtime_error&) {
    out.selected = -1;  // lane-keep fallback
  }

  auto [tracker_prob, tracker_table] = make_tracker(sc, ep, out.eq, chosen);
  out.sim = simulate(sc, out.eq, ep, tracker_prob, tracker_table, replays, sp.seed);
  return out;
}

}  // namespace mfg
