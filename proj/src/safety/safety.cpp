#include "mfg/safety/safety.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfg {

double dynamic_safety_distance(const VehicleState& xi, const VehicleState& xj,
                               const DrivingStyle& ti, const DrivingStyle& tj,
                               double t, double rho_local, double alpha_local,
                               const SafetyParams& p, const StateBounds& bounds) {
  const double f1 = std::abs(xi.v_s - xj.v_s);
  const double f2 = std::abs(heading(xi) - heading(xj));
  const double f3 = style_distance(ti, tj);
  const double f4 = std::abs(xi.a_s - xj.a_s);
  const double f5 = std::abs(xi.v_d - xj.v_d);

  double amp = 1.0;
  amp *= 1.0 + ti.omega_interact * f1 / p.v_ref;
  amp *= 1.0 + ti.alpha_aggr * f2 / M_PI;
  amp *= 1.0 + f3 / max_style_norm();
  amp *= 1.0 + ti.kappa_safe * f4 / bounds.a_max;
  amp *= 1.0 + ti.alpha_aggr * f5 / bounds.v_d_max;

  const double tr = t / p.T_pred;
  const double gap = p.T_pred - t;
  const double upsilon =
      1.0 + p.gamma_pred * tr * tr +
      p.delta_pred * std::exp(-(gap * gap) / (p.sigma_pred * p.sigma_pred));
  const double omega = 1.0 + p.zeta_density * rho_local + p.zeta_aggr * alpha_local;
  return p.d_base * amp * upsilon * omega;
}

double risk_kernel(const VehicleState& xi, const VehicleState& xj,
                   const DrivingStyle& ti, const DrivingStyle& tj, double d_safe,
                   const SafetyParams& p) {
  (void)ti;
  (void)tj;
  const double d = planar_distance(xi, xj);
  const double ratio = d / d_safe;
  const double core = std::exp(-std::pow(ratio, p.eta));
  const double dv = std::abs(xi.v_s - xj.v_s);
  const double vmax = std::max(xi.v_s, xj.v_s) + p.eps_v;
  const double dphi = std::abs(heading(xi) - heading(xj));
  return core * (1.0 + p.lambda_v * dv / vmax) * (1.0 + p.lambda_phi * dphi / M_PI);
}

double gamma_compat(StyleClass ci, StyleClass cj) {
  if (ci == StyleClass::kEgo) return 0.8;
  const bool ai = aggressive_group(ci);
  const bool aj = aggressive_group(cj);
  const bool coni = conservative_group(ci);
  const bool conj = conservative_group(cj);
  if (ai && aj) return 2.0;
  if ((ai && conj) || (coni && aj)) return 1.5;
  if (coni && conj) return 1.0;
  return 1.0;
}

double discrete_weight(const VehicleState& xi, const VehicleState& xj,
                       const DrivingStyle& ti, const DrivingStyle& tj,
                       const SafetyParams& p) {
  const double d = planar_distance(xi, xj);
  const double base = std::exp(-d / p.sigma_discrete) / (1.0 + ti.tau_react * tj.tau_react);
  return base * gamma_compat(ti.cls, tj.cls);
}

double smooth_risk(double d, double d_safe, double xi_exp) {
  if (d <= 0.5 * d_safe) return 1.0;
  if (d > d_safe) return 0.0;
  const double arg = 1.0 - (2.0 * d - d_safe) / d_safe;
  return std::pow(arg, xi_exp);
}

double boundary_penalty(double d_c2b, const SafetyParams& p) {
  if (d_c2b <= 0.0) return p.boundary_cap;
  if (d_c2b <= p.d_safe_threshold) {
    const double r = p.d_min / d_c2b;
    return p.beta_boundary * r * r;
  }
  return 0.0;
}

double time_to_collision(const VehicleState& xi, const VehicleState& xj) {
  const double ds = xj.s - xi.s;
  const double dd = xj.d - xi.d;
  const double dist = std::sqrt(ds * ds + dd * dd);
  if (dist <= 0.0) throw std::invalid_argument("TTC undefined for coincident positions");
  const double nx = ds / dist;
  const double ny = dd / dist;
  // Approach rate along the line of sight; negative when closing.
  const double rate = (xj.v_s - xi.v_s) * nx + (xj.v_d - xi.v_d) * ny;
  if (rate < 0.0) return dist / (-rate);
  return std::numeric_limits<double>::infinity();
}

double instantaneous_risk(const VehicleState& x, const DrivingStyle& theta,
                          const DensityTensor& rho,
                          std::span<const std::pair<VehicleState, DrivingStyle>> others,
                          const SafetyParams& p, const StateBounds& bounds) {
  const GridSpec& g = rho.grid;
  if (!g.contains(x.s, x.d)) throw std::invalid_argument("state outside grid");
  const LocalStats ls = local_stats(rho, x);

  double risk = 0.0;
  for (int l = 0; l < rho.L(); ++l) {
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    // Cells are treated as co-moving mass: only the spatial offset and the
    // style mismatch drive the kernel.
    VehicleState probe = x;
    const double d_safe = dynamic_safety_distance(x, probe, theta, tl, 0.0,
                                                  ls.rho_local, ls.alpha_local, p, bounds);
    const double* slab = rho.slab(l);
    std::size_t i = 0;
    for (int j = 0; j < g.J; ++j) {
      const double cd = g.center_d(j);
      for (int k = 0; k < g.K; ++k, ++i) {
        const double mass = slab[i];
        if (mass < 1e-12) continue;
        const double dsv = x.s - g.center_s(k);
        const double ddv = x.d - cd;
        const double dist = std::sqrt(dsv * dsv + ddv * ddv);
        risk += mass * std::exp(-std::pow(dist / d_safe, p.eta));
      }
    }
  }
  for (const auto& [xj, tj] : others) risk += discrete_weight(x, xj, theta, tj, p);
  return risk;
}

double lane_transition_margin(const VehicleState& x, const DrivingStyle& theta,
                              const DensityTensor& rho, const SafetyParams& p,
                              const StateBounds& bounds) {
  const GridSpec& g = rho.grid;
  if (!g.contains(x.s, x.d)) throw std::invalid_argument("state outside grid");
  const LocalStats ls = local_stats(rho, x);
  double acc = 0.0;
  for (int l = 0; l < rho.L(); ++l) {
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    const double d_safe = dynamic_safety_distance(x, x, theta, tl, 0.0, ls.rho_local,
                                                  ls.alpha_local, p, bounds);
    const double* slab = rho.slab(l);
    std::size_t i = 0;
    for (int j = 0; j < g.J; ++j) {
      const double cd = g.center_d(j);
      for (int k = 0; k < g.K; ++k, ++i) {
        const double mass = slab[i];
        if (mass < 1e-12) continue;
        const double dsv = x.s - g.center_s(k);
        const double ddv = x.d - cd;
        const double dist = std::sqrt(dsv * dsv + ddv * ddv);
        acc += mass * std::exp(-std::pow(dist / d_safe, p.eta)) / d_safe;
      }
    }
  }
  return std::exp(acc);
}

double smooth_risk_mass(const VehicleState& x, const DrivingStyle& theta,
                        const DensityTensor& rho, const SafetyParams& p,
                        const StateBounds& bounds, int skip_slab) {
  const GridSpec& g = rho.grid;
  if (!g.contains(x.s, x.d)) return 0.0;
  const LocalStats ls = local_stats(rho, x);
  double acc = 0.0;
  for (int l = 0; l < rho.L(); ++l) {
    if (l == skip_slab) continue;
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    const double d_safe = dynamic_safety_distance(x, x, theta, tl, 0.0, ls.rho_local,
                                                  ls.alpha_local, p, bounds);
    const double* slab = rho.slab(l);
    std::size_t i = 0;
    for (int j = 0; j < g.J; ++j) {
      const double cd = g.center_d(j);
      for (int k = 0; k < g.K; ++k, ++i) {
        const double mass = slab[i];
        if (mass < 1e-12) continue;
        const double dsv = x.s - g.center_s(k);
        const double ddv = x.d - cd;
        acc += mass * smooth_risk(std::sqrt(dsv * dsv + ddv * ddv), d_safe, p.xi);
      }
    }
  }
  return acc;
}

double temporal_risk(const VehicleState& x, const DrivingStyle& theta,
                     std::span<const DensityTensor> rho_pred, const SafetyParams& p,
                     const StateBounds& bounds, const NoiseModel& noise, double dt) {
  if (rho_pred.empty()) throw std::invalid_argument("empty prediction sequence");
  const double T = static_cast<double>(rho_pred.size());
  double total = 0.0;
  for (std::size_t step = 0; step < rho_pred.size(); ++step) {
    const double tau = static_cast<double>(step + 1);
    const double discount = 1.0 / (1.0 + std::pow(tau, p.nu));
    const double t_sec = tau * dt;
    VehicleState xp = x;
    xp.s += x.v_s * t_sec;
    xp.d += x.v_d * t_sec;

    const DensityTensor& rho = rho_pred[step];
    const GridSpec& g = rho.grid;
    if (!g.contains(xp.s, xp.d)) continue;  // extrapolated out of the domain
    const LocalStats ls = local_stats(rho, xp);
    double acc = 0.0;
    for (int l = 0; l < rho.L(); ++l) {
      const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
      const double d_safe =
          dynamic_safety_distance(xp, xp, theta, tl, std::min(t_sec, p.T_pred),
                                  ls.rho_local, ls.alpha_local, p, bounds);
      const double mismatch = style_distance(theta, tl);
      const double psi_unc =
          std::exp(t_sec * noise.sigma_frobenius(tl) / p.sigma_base_unc) *
          (1.0 + p.kappa_hetero * mismatch * mismatch);
      const double* slab = rho.slab(l);
      std::size_t i = 0;
      for (int j = 0; j < g.J; ++j) {
        const double cd = g.center_d(j);
        for (int k = 0; k < g.K; ++k, ++i) {
          const double mass = slab[i];
          if (mass < 1e-12) continue;
          const double dsv = xp.s - g.center_s(k);
          const double ddv = xp.d - cd;
          const double dist = std::sqrt(dsv * dsv + ddv * ddv);
          acc += mass * smooth_risk(dist, d_safe, p.xi) * psi_unc;
        }
      }
    }
    total += discount * acc;
  }
  return total / T;
}

}  // namespace mfg
