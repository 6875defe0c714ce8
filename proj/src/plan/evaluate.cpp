#include "mfg/plan/evaluate.hpp"

#include <cmath>
#include <stdexcept>

namespace mfg {
namespace {

double sq(double v) { return v * v; }

double hinge_sq(double v, double cap) {
  const double e = v - cap;
  return e > 0.0 ? e * e : 0.0;
}

// Divergence of the mass-weighted mean transport field, centered
// differences at the cell containing (s, d).
double divergence_at(const VelocityField& vel, const DensityTensor& rho, double s,
                     double d) {
  const GridSpec& g = rho.grid;
  if (!g.contains(s, d)) return 0.0;
  const int k = g.cell_k(s);
  const int j = g.cell_j(d);
  const auto mean_v = [&](int jj, int kk, bool lateral) {
    double num = 0.0, den = 0.0;
    for (int l = 0; l < rho.L(); ++l) {
      const double mass = rho.m[rho.idx(l, jj, kk)];
      const double v = lateral ? vel.vd[vel.idx(l, jj, kk)] : vel.vs[vel.idx(l, jj, kk)];
      num += mass * v;
      den += mass;
    }
    return den < 1e-12 ? 0.0 : num / den;
  };
  double div = 0.0;
  if (k > 0 && k < g.K - 1)
    div += (mean_v(j, k + 1, false) - mean_v(j, k - 1, false)) / (2.0 * g.ds);
  if (j > 0 && j < g.J - 1)
    div += (mean_v(j + 1, k, true) - mean_v(j - 1, k, true)) / (2.0 * g.dd);
  return div;
}

}  // namespace

OthersPrediction predict_others_cv(const ScenarioConfig& sc, int steps) {
  OthersPrediction out(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t <= steps; ++t) {
    for (const auto& v : sc.vehicles) {
      if (v.id == sc.ego_id) continue;
      VehicleState x = sc.initial_state(v);
      x.s += x.v_s * t * sc.dt;
      out[static_cast<std::size_t>(t)].emplace_back(x, style_catalog(v.style));
    }
  }
  return out;
}

PathEvaluation evaluate_path(const CandidatePath& path,
                             std::span<const DensityTensor> rho_seq,
                             std::span<const VelocityField> vel_seq,
                             const OthersPrediction& others,
                             const DrivingStyle& theta_ego, const EvalWeights& ew,
                             const SafetyParams& p, const StateBounds& bounds,
                             const LaneGeometry& geo) {
  const std::size_t n = path.states.size();
  if (rho_seq.size() < n || others.size() < n)
    throw std::invalid_argument("prediction sequences shorter than the path");
  const double dt = path.dt;
  PathEvaluation ev;

  double v_peak = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const VehicleState& x = path.states[t];
    const DensityTensor& rho = rho_seq[t];
    v_peak = std::max(v_peak, x.v_s);

    // field interaction: risk quadrature plus transport divergence
    if (rho.grid.contains(x.s, x.d)) {
      ev.field += instantaneous_risk(x, theta_ego, rho, {}, p, bounds) * dt;
      if (t < vel_seq.size()) ev.field += divergence_at(vel_seq[t], rho, x.s, x.d) * dt;
    }

    // pairwise safety: quartic proximity, TTC indicator, road boundary
    const LocalStats ls = rho.grid.contains(x.s, x.d) ? local_stats(rho, x) : LocalStats{};
    for (const auto& [xj, tj] : others[t]) {
      const double d_safe = dynamic_safety_distance(x, xj, theta_ego, tj, 0.0,
                                                    ls.rho_local, ls.alpha_local, p, bounds);
      const double dist = planar_distance(x, xj);
      const double q = sq(sq(dist / d_safe));
      ev.safety += std::exp(-q) * dt;
      if (dist > 0.0 && time_to_collision(x, xj) < ew.T_critical)
        ev.safety += ew.zeta_ttc * dt;
    }
    ev.safety += boundary_penalty(geo.clearance_to_boundary(x.d), p) * dt;

    // kinematic feasibility hinges
    const double speed = std::sqrt(sq(x.v_s) + sq(x.v_d));
    const double accel = std::sqrt(sq(x.a_s) + sq(x.a_d));
    ev.dynamics += ew.rho_v * hinge_sq(speed, bounds.v_max) * dt;
    ev.dynamics += ew.rho_a * hinge_sq(accel, bounds.a_max) * dt;
    if (t + 1 < n) {
      const VehicleState& xn = path.states[t + 1];
      const double jerk =
          std::sqrt(sq((xn.a_s - x.a_s) / dt) + sq((xn.a_d - x.a_d) / dt));
      ev.dynamics += ew.rho_j * hinge_sq(jerk, ew.j_max) * dt;
    }
    if (speed > 1e-6) {
      const double kappa = std::abs(x.v_s * x.a_d - x.v_d * x.a_s) / (speed * speed * speed);
      ev.dynamics += ew.rho_kappa * hinge_sq(kappa, ew.kappa_max) * dt;
    }

    // mandatory completion terms
    const bool in_transition = x.s > path.params.s_lc_start && x.s < path.params.s_lc_end;
    if (in_transition && rho.grid.contains(x.s, x.d))
      ev.mandatory += ew.w_transition * lane_transition_margin(x, theta_ego, rho, p, bounds) * dt;
    ev.mandatory += ew.w_smoothness * sq(x.v_d) * dt;
  }

  if (std::abs(path.states.back().d - path.params.d_target) > ew.eps_endpoint)
    ev.mandatory += ew.w_mandatory;

  // style adherence: transition sharpness and peak-speed factor
  const double beta_pref = preferred_beta(theta_ego.alpha_aggr);
  const double peak_factor = v_peak / theta_ego.v_des;
  ev.style = sq(path.params.beta_k - beta_pref) +
             sq(peak_factor - style_velocity_factor(theta_ego.cls));

  ev.total = ew.w1 * ev.field + ew.w2 * ev.safety + ew.w3 * ev.dynamics +
             ew.w4 * ev.style + ew.w5 * ev.mandatory;
  return ev;
}

int select_path(std::span<const CandidatePath> candidates,
                std::span<const PathEvaluation> evals,
                std::span<const DensityTensor> rho_seq, const OthersPrediction& others,
                const DrivingStyle& theta_ego, const SafetyParams& p,
                const StateBounds& bounds) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (candidates.size() != evals.size())
    throw std::invalid_argument("candidate/evaluation count mismatch");

  int best = -1;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const CandidatePath& path = candidates[c];
    bool safe = true;
    const int ego_slab = rho_seq.empty() ? -1 : rho_seq[0].slab_of(theta_ego.cls);
    for (std::size_t t = 0; t < path.states.size() && safe; ++t) {
      const VehicleState& x = path.states[t];
      if (t < others.size())
        for (const auto& [xj, tj] : others[t])
          if (planar_distance(x, xj) < p.d_min) {
            safe = false;
            break;
          }
      if (safe && t < rho_seq.size() &&
          smooth_risk_mass(x, theta_ego, rho_seq[t], p, bounds, ego_slab) > p.eps_coll)
        safe = false;
    }
    if (!safe) continue;
    if (best < 0 || evals[c].total < evals[static_cast<std::size_t>(best)].total ||
        (evals[c].total == evals[static_cast<std::size_t>(best)].total &&
         evals[c].safety < evals[static_cast<std::size_t>(best)].safety))
      best = static_cast<int>(c);
  }
  if (best < 0) throw std::runtime_error("no safe path among candidates");
  return best;
}

}  // namespace mfg
