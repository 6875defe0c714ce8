#include "mfg/control/hjb.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/kernels/kernels.hpp"

namespace mfg {
namespace {

double sq(double v) { return v * v; }

struct AxisPair {
  int i0;
  double w;
};

inline AxisPair prep_axis(double frac, int n) {
  const int i0 = std::min(static_cast<int>(frac), n - 2);
  return {i0, frac - i0};
}

}  // namespace

ControlGrid make_control_grid(const DrivingStyle& style, const StateBounds& bounds,
                              int n_a, int n_d) {
  ControlGrid ug;
  // Symmetric half-step ladders around zero so the idle control exists.
  ug.ua.resize(static_cast<std::size_t>(n_a));
  for (int i = 0; i < n_a; ++i) {
    const double f = 2.0 * i / (n_a - 1) - 1.0;  // -1..1
    ug.ua[static_cast<std::size_t>(i)] = f < 0.0 ? -f * style.a_min : f * style.a_max;
  }
  ug.ud.resize(static_cast<std::size_t>(n_d));
  for (int i = 0; i < n_d; ++i) {
    const double f = 2.0 * i / (n_d - 1) - 1.0;
    ug.ud[static_cast<std::size_t>(i)] = f * bounds.a_d_max;
  }
  return ug;
}

const std::vector<double>& ValueTable::slice(int t) const {
  if (store_values) return values[static_cast<std::size_t>(t)];
  if (t == 0) return value0;
  throw std::logic_error("value slice not stored");
}

double HjbStage::cost_cell(int j, int k) const {
  const HjbProblem& pb = *prob;
  const double s = pb.grid.center_s(k);
  const double d = pb.grid.center_d(j);
  const double d_tgt = pb.ref.d_at(t, d, pb.geo);
  const std::size_t i = static_cast<std::size_t>(j) * pb.grid.K + k;
  double c = pb.weights.Q[0] * sq(s - pb.ref.s_at(t));
  c += pb.weights.Q[3] * sq(d - d_tgt);
  c += pb.style.omega_interact * fields.risk[i];
  c += pb.style.kappa_safe * boundary_penalty(pb.geo.clearance_to_boundary(d), pb.safety);
  if (std::abs(d - d_tgt) > pb.weights.eps_lane) c += pb.weights.w_mandatory;
  return c;
}

double HjbStage::cost_speed(double v) const {
  const HjbProblem& pb = *prob;
  double c = pb.weights.Q[1] * sq(v - pb.ref.v_at(t));
  if (std::isfinite(pb.geo.curvature_radius))
    c += pb.weights.w_centripetal *
         sq(sq(v) / pb.geo.curvature_radius - pb.weights.a_cent_des);
  return c;
}

double HjbStage::cost_control(const ControlInput& u) const {
  const HjbProblem& pb = *prob;
  const CostWeights& w = pb.weights;
  const double vd = u.u_d * pb.tau_lat;  // lateral speed proxy
  double c = w.R[0] * sq(u.u_a) + w.R[1] * sq(u.u_d);
  c += w.R[2] * sq(static_cast<double>(u.delta - pb.ref.delta_at(t)));
  c += w.Q[2] * sq(u.u_a) + w.Q[4] * sq(vd) + w.Q[5] * sq(u.u_d);
  c += w.w_lateral * sq(u.u_d);
  if (std::sqrt(sq(u.u_a) + sq(u.u_d)) > w.u_comfort) c += w.w_aggr;
  c += w.w_fuel * sq(u.u_a);
  c += w.w_smoothness * sq(vd);
  return c;
}

double HjbStage::cost_delta(int delta, int j, int k) const {
  if (delta == 0) return 0.0;
  const std::size_t i = static_cast<std::size_t>(j) * prob->grid.K + k;
  return prob->weights.w_transition * fields.msafety[i];
}

void HjbStage::successor(double s, double d, double v, int j, int k,
                         const ControlInput& u, double* s_out, double* d_out,
                         double* v_out, double* oob_pen) const {
  const HjbProblem& pb = *prob;
  const std::size_t i = static_cast<std::size_t>(j) * pb.grid.K + k;
  const double sn = s + (v + fields.h_s[i]) * pb.dt;
  const double dn = d + (u.u_d * pb.tau_lat + fields.h_d[i]) * pb.dt;
  const double vn =
      std::clamp(v + (u.u_a + fields.h_vs[i]) * pb.dt, 0.0, pb.vbins.v_max);
  double pen = 0.0;
  const GridSpec& g = pb.grid;
  if (sn < g.s0 || sn > g.s0 + g.s_extent() || dn < g.d0 || dn > g.d0 + g.d_extent())
    pen = boundary_penalty(pb.geo.clearance_to_boundary(dn), pb.safety);
  *s_out = sn;
  *d_out = dn;
  *v_out = vn;
  *oob_pen = pen;
}

double HjbStage::value_of(double s, double d, double v, int j, int k, int u_idx,
                          const std::vector<double>& v_next_slice) const {
  const HjbProblem& pb = *prob;
  const ControlInput u = pb.controls.control(u_idx);
  double sn, dn, vn, pen;
  successor(s, d, v, j, k, u, &sn, &dn, &vn, &pen);
  const double rate = cost_cell(j, k) + cost_speed(v) + cost_control(u) +
                      cost_delta(u.delta, j, k) + pen;

  const GridSpec& g = pb.grid;
  const AxisPair ak = prep_axis(g.frac_k(sn), g.K);
  const AxisPair aj = prep_axis(g.frac_j(dn), g.J);
  const AxisPair ab = prep_axis(pb.vbins.frac_b(vn), pb.vbins.B);
  const double* V = v_next_slice.data();
  const std::size_t plane = static_cast<std::size_t>(g.J) * g.K;
  const double* base0 = V + static_cast<std::size_t>(ab.i0) * plane;
  const double* base1 = base0 + plane;
  const std::size_t off = static_cast<std::size_t>(aj.i0) * g.K + ak.i0;
  const double wk1 = ak.w, wk0 = 1.0 - ak.w;
  const double wj1 = aj.w, wj0 = 1.0 - aj.w;
  const double* r00 = base0 + off;
  const double* r01 = r00 + g.K;
  const double* r10 = base1 + off;
  const double* r11 = r10 + g.K;
  const double bil0 =
      wj0 * (wk0 * r00[0] + wk1 * r00[1]) + wj1 * (wk0 * r01[0] + wk1 * r01[1]);
  const double bil1 =
      wj0 * (wk0 * r10[0] + wk1 * r10[1]) + wj1 * (wk0 * r11[0] + wk1 * r11[1]);
  const double interp = (1.0 - ab.w) * bil0 + ab.w * bil1;
  return rate * pb.dt + interp;
}

double HjbStage::best_value(double s, double d, double v, int j, int k,
                            const std::vector<double>& v_next_slice,
                            int* best_idx) const {
  const int n = prob->controls.size();
  double best = std::numeric_limits<double>::infinity();
  double best_norm = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int u_idx = 0; u_idx < n; ++u_idx) {
    const double val = value_of(s, d, v, j, k, u_idx, v_next_slice);
    const ControlInput u = prob->controls.control(u_idx);
    const double norm = sq(u.u_a) + sq(u.u_d) + sq(static_cast<double>(u.delta));
    if (val < best || (val == best && norm < best_norm)) {
      best = val;
      best_norm = norm;
      best_i = u_idx;
    }
  }
  if (best_idx) *best_idx = best_i;
  return best;
}

HjbStage make_stage(const HjbProblem& prob, const DensityTensor& rho_t, int t) {
  HjbStage st;
  st.prob = &prob;
  st.t = t;
  st.fields =
      build_cell_fields(rho_t, prob.style, prob.safety, prob.interaction, prob.bounds);
  return st;
}

double terminal_value_at(const HjbProblem& prob, int b, int j, int k) {
  VehicleState x;
  x.s = prob.grid.center_s(k);
  x.d = prob.grid.center_d(j);
  x.v_s = prob.vbins.level(b);
  return terminal_cost(x, prob.style, prob.ref, prob.T_steps, prob.weights, prob.geo);
}

namespace {

// One backward step over all cells. Interp pairs are cached per cell; the
// per-control arithmetic mirrors HjbStage::value_of exactly (same helper
// expressions, same combination order), so stored minima agree bit-for-bit
// with point re-evaluation.
void sweep_slice(const HjbStage& st, const std::vector<double>& v_next,
                 std::vector<double>& v_out, std::vector<std::uint8_t>& pol_out) {
  const HjbProblem& pb = *st.prob;
  const GridSpec& g = pb.grid;
  const int B = pb.vbins.B;
  const int n_a = static_cast<int>(pb.controls.ua.size());
  const int n_d = static_cast<int>(pb.controls.ud.size());
  const std::size_t plane = static_cast<std::size_t>(g.J) * g.K;

  const int n_u = pb.controls.size();
  std::vector<double> ctrl_cost(static_cast<std::size_t>(n_u));
  std::vector<double> ctrl_norm(static_cast<std::size_t>(n_u));
  std::vector<double> delta_sq(static_cast<std::size_t>(n_u));
  for (int u = 0; u < n_u; ++u) {
    const ControlInput c = pb.controls.control(u);
    ctrl_cost[static_cast<std::size_t>(u)] = st.cost_control(c);
    ctrl_norm[static_cast<std::size_t>(u)] =
        sq(c.u_a) + sq(c.u_d) + sq(static_cast<double>(c.delta));
    delta_sq[static_cast<std::size_t>(u)] = c.delta == 0 ? 0.0 : 1.0;
  }
  std::vector<double> speed_cost(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b)
    speed_cost[static_cast<std::size_t>(b)] = st.cost_speed(pb.vbins.level(b));

  std::vector<AxisPair> kp(static_cast<std::size_t>(B));
  std::vector<bool> s_oob(static_cast<std::size_t>(B));
  std::vector<AxisPair> jp(static_cast<std::size_t>(n_d));
  std::vector<AxisPair> bp(static_cast<std::size_t>(B) * n_a);
  std::vector<double> dn_of(static_cast<std::size_t>(n_d));
  std::vector<double> dpen(static_cast<std::size_t>(n_d));

  for (int j = 0; j < g.J; ++j) {
    const double d = g.center_d(j);
    for (int k = 0; k < g.K; ++k) {
      const double s = g.center_s(k);
      const std::size_t cell = static_cast<std::size_t>(j) * g.K + k;
      const double base_cost = st.cost_cell(j, k);
      const double m_w = pb.weights.w_transition * st.fields.msafety[cell];
      const double hs = st.fields.h_s[cell];
      const double hvs = st.fields.h_vs[cell];
      const double hd = st.fields.h_d[cell];

      for (int b = 0; b < B; ++b) {
        const double sn = s + (pb.vbins.level(b) + hs) * pb.dt;
        kp[static_cast<std::size_t>(b)] = prep_axis(g.frac_k(sn), g.K);
        s_oob[static_cast<std::size_t>(b)] = sn < g.s0 || sn > g.s0 + g.s_extent();
        for (int ia = 0; ia < n_a; ++ia) {
          const double vn =
              std::clamp(pb.vbins.level(b) +
                             (pb.controls.ua[static_cast<std::size_t>(ia)] + hvs) * pb.dt,
                         0.0, pb.vbins.v_max);
          bp[static_cast<std::size_t>(b) * n_a + ia] = prep_axis(pb.vbins.frac_b(vn), B);
        }
      }
      for (int id = 0; id < n_d; ++id) {
        const double dn =
            d + (pb.controls.ud[static_cast<std::size_t>(id)] * pb.tau_lat + hd) * pb.dt;
        jp[static_cast<std::size_t>(id)] = prep_axis(g.frac_j(dn), g.J);
        dn_of[static_cast<std::size_t>(id)] = dn;
        dpen[static_cast<std::size_t>(id)] =
            (dn < g.d0 || dn > g.d0 + g.d_extent())
                ? boundary_penalty(pb.geo.clearance_to_boundary(dn), pb.safety)
                : 0.0;
      }

      for (int b = 0; b < B; ++b) {
        const double c_bv = base_cost + speed_cost[static_cast<std::size_t>(b)];
        const AxisPair ak = kp[static_cast<std::size_t>(b)];
        const double wk1 = ak.w, wk0 = 1.0 - ak.w;
        const bool soob = s_oob[static_cast<std::size_t>(b)];

        double best = std::numeric_limits<double>::infinity();
        double best_norm = std::numeric_limits<double>::infinity();
        int best_i = 0;
        int u_idx = 0;
        for (int ia = 0; ia < n_a; ++ia) {
          const AxisPair ab = bp[static_cast<std::size_t>(b) * n_a + ia];
          const double* base0 = v_next.data() + static_cast<std::size_t>(ab.i0) * plane;
          const double* base1 = base0 + plane;
          const double wb1 = ab.w, wb0 = 1.0 - ab.w;
          for (int id = 0; id < n_d; ++id) {
            const AxisPair aj = jp[static_cast<std::size_t>(id)];
            const std::size_t off = static_cast<std::size_t>(aj.i0) * g.K + ak.i0;
            const double wj1 = aj.w, wj0 = 1.0 - aj.w;
            const double* r00 = base0 + off;
            const double* r01 = r00 + g.K;
            const double* r10 = base1 + off;
            const double* r11 = r10 + g.K;
            const double bil0 = wj0 * (wk0 * r00[0] + wk1 * r00[1]) +
                                wj1 * (wk0 * r01[0] + wk1 * r01[1]);
            const double bil1 = wj0 * (wk0 * r10[0] + wk1 * r10[1]) +
                                wj1 * (wk0 * r11[0] + wk1 * r11[1]);
            const double interp = wb0 * bil0 + wb1 * bil1;
            double pen = dpen[static_cast<std::size_t>(id)];
            if (soob && pen == 0.0)
              pen = boundary_penalty(
                  pb.geo.clearance_to_boundary(dn_of[static_cast<std::size_t>(id)]),
                  pb.safety);
            for (int del = 0; del < 3; ++del, ++u_idx) {
              const double rate = c_bv + ctrl_cost[static_cast<std::size_t>(u_idx)] +
                                  delta_sq[static_cast<std::size_t>(u_idx)] * m_w + pen;
              const double val = rate * pb.dt + interp;
              if (val < best ||
                  (val == best && ctrl_norm[static_cast<std::size_t>(u_idx)] < best_norm)) {
                best = val;
                best_norm = ctrl_norm[static_cast<std::size_t>(u_idx)];
                best_i = u_idx;
              }
            }
          }
        }
        const std::size_t out_i = (static_cast<std::size_t>(b) * g.J + j) * g.K + k;
        v_out[out_i] = best;
        pol_out[out_i] = static_cast<std::uint8_t>(best_i);
      }
    }
  }
}

}  // namespace

ValueTable hjb_backward_solve(const HjbProblem& prob,
                              std::span<const DensityTensor> rho_seq,
                              const ValueTable* prev, double gamma) {
  if (static_cast<int>(rho_seq.size()) < prob.T_steps + 1)
    throw std::invalid_argument("density sequence shorter than the horizon");
  ValueTable vt;
  vt.T_steps = prob.T_steps;
  vt.K = prob.grid.K;
  vt.J = prob.grid.J;
  vt.B = prob.vbins.B;
  vt.store_values = prob.store_values;
  const std::size_t n = vt.cells();
  if (prev && (prev->K != vt.K || prev->J != vt.J || prev->B != vt.B ||
               prev->T_steps != vt.T_steps))
    throw std::invalid_argument("previous value table shape mismatch");
  const bool blend = prev && prev->store_values && gamma < 1.0;

  vt.policy.assign(static_cast<std::size_t>(prob.T_steps), {});
  if (vt.store_values) vt.values.assign(static_cast<std::size_t>(prob.T_steps) + 1, {});

  std::vector<double> term(n);
  for (int b = 0; b < vt.B; ++b)
    for (int j = 0; j < vt.J; ++j)
      for (int k = 0; k < vt.K; ++k)
        term[vt.idx(b, j, k)] = terminal_value_at(prob, b, j, k);

  std::vector<double> bufA = std::move(term);
  std::vector<double> bufB(n);
  const std::vector<double>* v_next = &bufA;
  if (vt.store_values) {
    vt.values[static_cast<std::size_t>(prob.T_steps)] = bufA;
    v_next = &vt.values[static_cast<std::size_t>(prob.T_steps)];
  }

  for (int t = prob.T_steps - 1; t >= 0; --t) {
    const HjbStage st = make_stage(prob, rho_seq[static_cast<std::size_t>(t)], t);
    auto& pol = vt.policy[static_cast<std::size_t>(t)];
    pol.assign(n, 0);
    std::vector<double>& fresh = (v_next == &bufA) ? bufB : bufA;
    if (fresh.size() != n) fresh.resize(n);
    sweep_slice(st, *v_next, fresh, pol);
    if (blend) {
      const auto& old = prev->values[static_cast<std::size_t>(t)];
      kernels::ops().blend(old.data(), fresh.data(), gamma, fresh.data(), n);
    }
    if (vt.store_values) {
      vt.values[static_cast<std::size_t>(t)] = fresh;
      v_next = &vt.values[static_cast<std::size_t>(t)];
    } else {
      v_next = &fresh;
    }
  }
  vt.value0 = *v_next;
  return vt;
}

ControlInput extract_policy(const ValueTable& vt, const HjbProblem& prob,
                            const DensityTensor& rho_t, int t, int j, int k, int b) {
  if (t < 0 || t >= vt.T_steps) throw std::invalid_argument("time step out of range");
  const HjbStage st = make_stage(prob, rho_t, t);
  int best = 0;
  st.best_value(prob.grid.center_s(k), prob.grid.center_d(j), prob.vbins.level(b), j, k,
                vt.slice(t + 1), &best);
  return prob.controls.control(best);
}

ValueTable policy_evaluate(const HjbProblem& prob,
                           std::span<const DensityTensor> rho_seq,
                           const ValueTable& policy_source) {
  ValueTable vt;
  vt.T_steps = prob.T_steps;
  vt.K = prob.grid.K;
  vt.J = prob.grid.J;
  vt.B = prob.vbins.B;
  vt.store_values = true;
  const std::size_t n = vt.cells();
  vt.values.assign(static_cast<std::size_t>(prob.T_steps) + 1, {});
  vt.policy = policy_source.policy;

  auto& term = vt.values[static_cast<std::size_t>(prob.T_steps)];
  term.resize(n);
  for (int b = 0; b < vt.B; ++b)
    for (int j = 0; j < vt.J; ++j)
      for (int k = 0; k < vt.K; ++k)
        term[vt.idx(b, j, k)] = terminal_value_at(prob, b, j, k);

  for (int t = prob.T_steps - 1; t >= 0; --t) {
    const HjbStage st = make_stage(prob, rho_seq[static_cast<std::size_t>(t)], t);
    const auto& v_next = vt.values[static_cast<std::size_t>(t + 1)];
    auto& out = vt.values[static_cast<std::size_t>(t)];
    out.resize(n);
    const auto& pol = policy_source.policy[static_cast<std::size_t>(t)];
    for (int b = 0; b < vt.B; ++b)
      for (int j = 0; j < vt.J; ++j)
        for (int k = 0; k < vt.K; ++k) {
          const std::size_t i = vt.idx(b, j, k);
          out[i] = st.value_of(prob.grid.center_s(k), prob.grid.center_d(j),
                               prob.vbins.level(b), j, k, pol[i], v_next);
        }
  }
  vt.value0 = vt.values[0];
  return vt;
}

}  // namespace mfg
