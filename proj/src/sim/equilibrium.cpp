#include "mfg/sim/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/common/threading.hpp"
#include "mfg/kernels/kernels.hpp"
#include "mfg/sim/rng.hpp"

namespace mfg {
namespace {

using kernels::ops;

std::vector<DrivingStyle> resolve_styles(const ScenarioConfig& sc,
                                         std::span<const DrivingStyle> override) {
  std::vector<DrivingStyle> out;
  for (StyleClass c : sc.present_styles()) {
    DrivingStyle st = style_catalog(c);
    for (const auto& ov : override)
      if (ov.cls == c) st = ov;
    out.push_back(st);
  }
  return out;
}

HjbProblem make_problem(const ScenarioConfig& sc, const EngineParams& ep,
                        const DrivingStyle& style, bool is_ego, bool store_values) {
  HjbProblem pb;
  pb.style = style;
  pb.weights = make_cost_weights(style);
  pb.grid = GridSpec::from_bounds(sc.bounds, ep.grid_K, ep.grid_J);
  pb.vbins = VBins{ep.v_bins, sc.bounds.v_max};
  pb.controls = make_control_grid(style, sc.bounds, ep.n_ua, ep.n_ud);
  pb.safety = ep.safety;
  pb.interaction = ep.interaction;
  pb.bounds = sc.bounds;
  pb.geo = sc.geometry;
  pb.dt = sc.dt;
  pb.tau_lat = ep.tau_lat;
  pb.T_steps = sc.steps();
  pb.store_values = store_values;
  if (is_ego) {
    const double d_from =
        sc.geometry.lane_centers[static_cast<std::size_t>(sc.ego().lane)];
    const double d_to =
        sc.geometry.lane_centers[static_cast<std::size_t>(sc.target_lane)];
    pb.ref = make_lane_change_ref(style, d_from, d_to, ep.lc_ref_t1, ep.lc_ref_t2,
                                  pb.T_steps, sc.dt, sc.absolute_s(sc.ego()));
  } else {
    pb.ref = make_lane_keep_ref(style, pb.T_steps, sc.dt);
  }
  return pb;
}

struct ForwardOutput {
  std::vector<DensityTensor> rho_seq;
  std::vector<VelocityField> vel_seq;
};

// Density propagation under the current policies. Slab velocities are
// momentum-transported alongside the mass so each cell advects with the
// speed its population actually carries; the per-cell policy is queried
// at that speed.
ForwardOutput forward_pass(const ScenarioConfig& sc, const EngineParams& ep,
                           const std::vector<DrivingStyle>& styles,
                           const std::vector<HjbProblem>& problems,
                           const std::vector<ValueTable>* tables) {
  const GridSpec grid = GridSpec::from_bounds(sc.bounds, ep.grid_K, ep.grid_J);
  const int T = sc.steps();
  ForwardOutput out;
  out.rho_seq.reserve(static_cast<std::size_t>(T) + 1);
  out.rho_seq.push_back(init_density(sc, grid, ep.sigma_s0, ep.sigma_d0, styles));
  DensityTensor& rho0 = out.rho_seq.front();
  const int L = rho0.L();
  const std::size_t slab = rho0.slab_size();

  // momentum field: unit bumps weighted by initial speed
  std::vector<double> mom(static_cast<std::size_t>(L) * slab, 0.0);
  {
    DensityTensor carrier = DensityTensor::zeros(grid, rho0.styles);
    carrier.style_params = rho0.style_params;
    for (const auto& v : sc.vehicles) {
      const VehicleState x = sc.initial_state(v);
      add_bump(carrier, carrier.slab_of(v.style), x.s, x.d, ep.sigma_s0, ep.sigma_d0,
               v.speed);
    }
    mom = carrier.m;
  }

  out.vel_seq.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const DensityTensor& rho = out.rho_seq.back();
    VelocityField vel = VelocityField::zeros(grid, L);
    std::vector<double> accel(static_cast<std::size_t>(L) * slab, 0.0);

    for (int l = 0; l < L; ++l) {
      const DrivingStyle& st = styles[static_cast<std::size_t>(l)];
      const CellFields drift = build_cell_fields(rho, st, ep.safety, ep.interaction,
                                                 sc.bounds, {.drift_only = true});
      const HjbProblem& pb = problems[static_cast<std::size_t>(l)];
      const double* rho_sl = rho.slab(l);
      const double* mom_sl = mom.data() + static_cast<std::size_t>(l) * slab;
      for (int j = 0; j < grid.J; ++j)
        for (int k = 0; k < grid.K; ++k) {
          const std::size_t c = static_cast<std::size_t>(j) * grid.K + k;
          const std::size_t g = static_cast<std::size_t>(l) * slab + c;
          const double mass = rho_sl[c];
          double vbar = mass < 1e-12 ? st.v_des
                                     : std::clamp(mom_sl[c] / mass, 0.0, sc.bounds.v_max);
          double ua = 0.0, ud = 0.0;
          if (tables) {
            const int b = pb.vbins.nearest(vbar);
            const std::size_t cell =
                (static_cast<std::size_t>(b) * grid.J + j) * grid.K + k;
            const std::uint8_t idx =
                (*tables)[static_cast<std::size_t>(l)].policy[static_cast<std::size_t>(t)][cell];
            const ControlInput u = pb.controls.control(idx);
            ua = u.u_a;
            ud = u.u_d;
          }
          vel.vs[g] = std::clamp(vbar + drift.h_s[c], 0.0, sc.bounds.v_max);
          vel.vd[g] = std::clamp(ud * ep.tau_lat + drift.h_d[c],
                                 -sc.bounds.v_d_max, sc.bounds.v_d_max);
          accel[g] = ua + drift.h_vs[c];
        }
    }

    // accelerate, then transport mass and momentum with the same field
    for (std::size_t i = 0; i < mom.size(); ++i)
      mom[i] += rho.m[i] * accel[i] * sc.dt;
    out.rho_seq.push_back(fp_step(rho, vel, ep.noise, sc.dt));
    transport_like_density(mom, rho, vel, ep.noise, sc.dt);
    const DensityTensor& rho_n = out.rho_seq.back();
    for (int l = 0; l < L; ++l) {
      const double v_des = styles[static_cast<std::size_t>(l)].v_des;
      for (std::size_t c = 0; c < slab; ++c) {
        const std::size_t g = static_cast<std::size_t>(l) * slab + c;
        const double mass = rho_n.m[g];
        const double v = mass < 1e-12 ? v_des
                                      : std::clamp(mom[g] / mass, 0.0, sc.bounds.v_max);
        mom[g] = v * mass;
      }
    }
    out.vel_seq.push_back(std::move(vel));
  }
  return out;
}

void blend_density_seq(std::vector<DensityTensor>& iterate,
                       const std::vector<DensityTensor>& fresh, double gamma) {
  for (std::size_t t = 0; t < iterate.size(); ++t) {
    DensityTensor& a = iterate[t];
    const DensityTensor& b = fresh[t];
    for (int l = 0; l < a.L(); ++l) {
      const double target = a.slab_mass(l);
      double* sa = a.slab(l);
      ops().blend(sa, b.slab(l), gamma, sa, a.slab_size());
      const double got = a.slab_mass(l);
      if (got > 1e-12) {
        const double scale = target / got;
        for (std::size_t i = 0; i < a.slab_size(); ++i) sa[i] *= scale;
      }
    }
    a.leak = (1.0 - gamma) * a.leak + gamma * b.leak;
  }
}

double density_seq_distance(const std::vector<DensityTensor>& a,
                            const std::vector<DensityTensor>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sequence length mismatch");
  double acc = 0.0;
  double mass0 = a.empty() ? 0.0 : a.front().total_mass();
  if (mass0 <= 0.0) mass0 = 1.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].m.size() != b[t].m.size())
      throw std::invalid_argument("density shape mismatch");
    acc += ops().abs_diff_sum(a[t].m.data(), b[t].m.data(), a[t].m.size());
  }
  return acc / (static_cast<double>(a.size()) * mass0);
}

double table_distance(const std::vector<ValueTable>& a, const std::vector<ValueTable>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("table count mismatch");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const bool full = a[l].store_values && b[l].store_values &&
                      a[l].values.size() == b[l].values.size();
    if (full) {
      for (std::size_t t = 0; t < a[l].values.size(); ++t) {
        if (a[l].values[t].size() != b[l].values[t].size())
          throw std::invalid_argument("value slice shape mismatch");
        acc += ops().abs_diff_sum(a[l].values[t].data(), b[l].values[t].data(),
                                  a[l].values[t].size());
        count += a[l].values[t].size();
      }
    } else {
      if (a[l].value0.size() != b[l].value0.size())
        throw std::invalid_argument("value slice shape mismatch");
      acc += ops().abs_diff_sum(a[l].value0.data(), b[l].value0.data(),
                                a[l].value0.size());
      count += a[l].value0.size();
    }
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

double fit_contraction(const std::vector<double>& residuals) {
  // geometric fit: least squares slope of log r_k
  std::vector<double> logs;
  for (double r : residuals)
    if (r > 1e-300) logs.push_back(std::log(r));
  const std::size_t n = logs.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += logs[i];
    sxx += x * x;
    sxy += x * logs[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  const double slope = (n * sxy - sx * sy) / denom;
  return std::exp(slope);
}

}  // namespace

EquilibriumState relaxed_update(const EquilibriumState& prev,
                                const std::vector<DensityTensor>& rho_new,
                                const std::vector<ValueTable>& tables_new,
                                double gamma) {
  if (rho_new.size() != prev.rho_seq.size())
    throw std::invalid_argument("density sequence length mismatch");
  if (tables_new.size() != prev.policies.size())
    throw std::invalid_argument("policy table count mismatch");
  EquilibriumState out = prev;
  blend_density_seq(out.rho_seq, rho_new, gamma);
  for (std::size_t l = 0; l < tables_new.size(); ++l) {
    ValueTable& dst = out.policies[l];
    const ValueTable& src = tables_new[l];
    if (dst.K != src.K || dst.J != src.J || dst.B != src.B ||
        dst.T_steps != src.T_steps)
      throw std::invalid_argument("value table shape mismatch");
    if (dst.store_values && src.store_values) {
      for (std::size_t t = 0; t < dst.values.size(); ++t)
        ops().blend(dst.values[t].data(), src.values[t].data(), gamma,
                    dst.values[t].data(), dst.values[t].size());
    }
    ops().blend(dst.value0.data(), src.value0.data(), gamma, dst.value0.data(),
                dst.value0.size());
    dst.policy = src.policy;  // argmin indices follow the fresh backup
  }
  return out;
}

double convergence_metric(const EquilibriumState& a, const EquilibriumState& b) {
  return density_seq_distance(a.rho_seq, b.rho_seq) +
         table_distance(a.policies, b.policies);
}

EquilibriumState run_equilibrium(const ScenarioConfig& sc, const EngineParams& ep,
                                 const SolverParams& sp,
                                 std::span<const DrivingStyle> style_override) {
  const std::vector<DrivingStyle> styles = resolve_styles(sc, style_override);
  const int L = static_cast<int>(styles.size());
  const int T = sc.steps();
  const std::size_t cells = static_cast<std::size_t>(ep.grid_K) * ep.grid_J * ep.v_bins;
  const bool store_values =
      sp.store_values && cells * static_cast<std::size_t>(T + 1) <= ep.value_entry_budget;

  EquilibriumState eq;
  eq.problems.reserve(static_cast<std::size_t>(L));
  const StyleClass ego_cls = sc.ego().style;
  for (int l = 0; l < L; ++l)
    eq.problems.push_back(make_problem(sc, ep, styles[static_cast<std::size_t>(l)],
                                       styles[static_cast<std::size_t>(l)].cls == ego_cls,
                                       store_values));

  // initial forward under nominal (coasting) controls, then a first
  // backward solve per style
  ForwardOutput fw = forward_pass(sc, ep, styles, eq.problems, nullptr);
  eq.rho_seq = std::move(fw.rho_seq);
  eq.vel_seq = std::move(fw.vel_seq);
  eq.policies.assign(static_cast<std::size_t>(L), {});
  parallel_for(static_cast<std::size_t>(L), [&](std::size_t l) {
    eq.policies[l] = hjb_backward_solve(eq.problems[l], eq.rho_seq);
  });

  std::vector<DensityTensor> prev_op_rho = eq.rho_seq;
  std::vector<double> prev_v0(static_cast<std::size_t>(L) * 0);

  auto value0_snapshot = [&]() {
    std::vector<std::vector<double>> snap;
    snap.reserve(eq.policies.size());
    for (const auto& vt : eq.policies) snap.push_back(vt.value0);
    return snap;
  };
  std::vector<std::vector<double>> prev_snapshot = value0_snapshot();

  for (int it = 1; it <= sp.max_iters; ++it) {
    eq.iterations = it;
    ForwardOutput op = forward_pass(sc, ep, styles, eq.problems, &eq.policies);

    // residual on successive operator outputs plus value-iterate movement
    double res = density_seq_distance(op.rho_seq, prev_op_rho);
    prev_op_rho = op.rho_seq;

    if (it == 1) {
      eq.rho_seq = std::move(op.rho_seq);
    } else {
      blend_density_seq(eq.rho_seq, op.rho_seq, sp.gamma_relax);
    }
    eq.vel_seq = std::move(op.vel_seq);

    const double gamma_v = it == 1 ? 1.0 : sp.gamma_relax;
    std::vector<ValueTable> fresh(static_cast<std::size_t>(L));
    parallel_for(static_cast<std::size_t>(L), [&](std::size_t l) {
      fresh[l] = hjb_backward_solve(eq.problems[l], eq.rho_seq, &eq.policies[l], gamma_v);
    });
    eq.policies = std::move(fresh);

    const auto snap = value0_snapshot();
    double vres = 0.0;
    std::size_t vcount = 0;
    for (std::size_t l = 0; l < snap.size(); ++l) {
      vres += ops().abs_diff_sum(snap[l].data(), prev_snapshot[l].data(), snap[l].size());
      vcount += snap[l].size();
    }
    prev_snapshot = snap;
    res += vcount ? vres / static_cast<double>(vcount) : 0.0;

    eq.residuals.push_back(res);
    if (res < sp.eps_conv) {
      eq.converged = true;
      break;
    }
  }
  eq.contraction_ratio = fit_contraction(eq.residuals);
  return eq;
}

NashGap nash_gap(const EquilibriumState& eq, const ScenarioConfig& sc,
                 const EngineParams& ep, int n_samples, std::uint64_t seed) {
  (void)sc;
  (void)ep;
  NashGap out;
  const CounterRng rng{seed};
  for (std::size_t l = 0; l < eq.policies.size(); ++l) {
    HjbProblem prob = eq.problems[l];
    prob.store_values = true;
    const ValueTable v_br = hjb_backward_solve(prob, eq.rho_seq);
    const ValueTable v_pol = policy_evaluate(prob, eq.rho_seq, eq.policies[l]);
    // rollout cost scale: the policy value at the slab's densest initial cell
    double scale = 0.0;
    {
      const DensityTensor& rho0 = eq.rho_seq.front();
      const double* slab = rho0.slab(static_cast<int>(l));
      std::size_t best = 0;
      for (std::size_t i = 1; i < rho0.slab_size(); ++i)
        if (slab[i] > slab[best]) best = i;
      const int j = static_cast<int>(best) / prob.grid.K;
      const int k = static_cast<int>(best) % prob.grid.K;
      const int b = prob.vbins.nearest(prob.style.v_des);
      scale = v_pol.values[0][v_pol.idx(b, j, k)];
    }
    if (scale <= 0.0) scale = 1.0;
    for (int s = 0; s < n_samples; ++s) {
      const std::uint64_t key = static_cast<std::uint64_t>(l) * 10000 + s;
      const int t = static_cast<int>(rng.uniform(key, 1) * prob.T_steps);
      const int b = static_cast<int>(rng.uniform(key, 2) * prob.vbins.B);
      const int j = static_cast<int>(rng.uniform(key, 3) * prob.grid.J);
      const int k = static_cast<int>(rng.uniform(key, 4) * prob.grid.K);
      const std::size_t i = v_br.idx(b, j, k);
      const double gap =
          std::max(0.0, v_pol.values[static_cast<std::size_t>(t)][i] -
                            v_br.values[static_cast<std::size_t>(t)][i]);
      out.max_gap = std::max(out.max_gap, gap);
      out.max_relative = std::max(out.max_relative, gap / scale);
    }
  }
  return out;
}

std::vector<PerturbationRow> perturbation_test(const ScenarioConfig& sc,
                                               const EngineParams& ep,
                                               const SolverParams& sp,
                                               std::span<const double> deltas) {
  const EquilibriumState base = run_equilibrium(sc, ep, sp);
  std::vector<PerturbationRow> rows;
  for (double delta : deltas) {
    std::vector<DrivingStyle> table;
    for (int c = 0; c < kStyleCount; ++c) {
      DrivingStyle st = style_catalog(static_cast<StyleClass>(c));
      st.v_des *= 1.0 + delta;
      st.a_max *= 1.0 + delta;
      st.a_min *= 1.0 + delta;
      st.kappa_safe *= 1.0 + delta;
      st.omega_interact *= 1.0 + delta;
      st.alpha_aggr = std::min(0.995, st.alpha_aggr * (1.0 + delta));
      st.tau_react *= 1.0 + delta;
      table.push_back(st);
    }
    const EquilibriumState pert = run_equilibrium(sc, ep, sp, table);
    rows.push_back({delta, convergence_metric(base, pert), pert.converged});
  }
  return rows;
}

}  // namespace mfg
