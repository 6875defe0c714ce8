#include "mfg/control/fields.hpp"

#include <cmath>

#include "mfg/kernels/kernels.hpp"

namespace mfg {
namespace {

struct SourceCell {
  int j;
  int k;
  double mass;
};

}  // namespace

CellFields build_cell_fields(const DensityTensor& rho, const DrivingStyle& style,
                             const SafetyParams& p, const InteractionParams& ip,
                             const StateBounds& bounds,
                             const FieldBuildOptions& opt) {
  const GridSpec& g = rho.grid;
  const std::size_t n = static_cast<std::size_t>(g.J) * g.K;
  CellFields out;
  out.h_s.assign(n, 0.0);
  out.h_vs.assign(n, 0.0);
  out.h_d.assign(n, 0.0);
  if (!opt.drift_only) {
    out.risk.assign(n, 0.0);
    out.msafety.assign(n, 0.0);
  }

  // Surrounding factor per cell from the total mass field.
  std::vector<double> omega_field;
  if (!opt.drift_only) {
    std::vector<double> total(n, 0.0);
    for (int l = 0; l < rho.L(); ++l) {
      const double* slab = rho.slab(l);
      for (std::size_t i = 0; i < n; ++i) total[i] += slab[i];
    }
    std::vector<double> alpha_num(n, 0.0), alpha_den(n, 0.0);
    for (int l = 0; l < rho.L(); ++l) {
      const double a = rho.style_params[static_cast<std::size_t>(l)].alpha_aggr;
      const double* slab = rho.slab(l);
      for (int j = 0; j < g.J; ++j)
        for (int k = 0; k < g.K; ++k) {
          const double mass = slab[static_cast<std::size_t>(j) * g.K + k];
          if (mass <= 0.0) continue;
          for (int jj = std::max(0, j - 1); jj <= std::min(g.J - 1, j + 1); ++jj)
            for (int kk = std::max(0, k - 1); kk <= std::min(g.K - 1, k + 1); ++kk) {
              alpha_num[static_cast<std::size_t>(jj) * g.K + kk] += a * mass;
              alpha_den[static_cast<std::size_t>(jj) * g.K + kk] += mass;
            }
        }
    }
    omega_field.resize(n);
    const double inv_area = 1.0 / g.cell_area();
    for (std::size_t i = 0; i < n; ++i) {
      const double alpha_bar = alpha_den[i] < 1e-12 ? 0.0 : alpha_num[i] / alpha_den[i];
      omega_field[i] =
          1.0 + p.zeta_density * total[i] * inv_area + p.zeta_aggr * alpha_bar;
    }
  }

  const double upsilon0 =
      1.0 + p.delta_pred * std::exp(-(p.T_pred * p.T_pred) / (p.sigma_pred * p.sigma_pred));
  const bool quartic = p.eta == 4.0;

  std::vector<double> qbuf(static_cast<std::size_t>(g.K));
  std::vector<double> wbuf(static_cast<std::size_t>(g.K));
  std::vector<double> macc;
  if (!opt.drift_only) macc.assign(n, 0.0);
  std::vector<SourceCell> sources;

  for (int l = 0; l < rho.L(); ++l) {
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    sources.clear();
    const double* slab = rho.slab(l);
    for (int j = 0; j < g.J; ++j)
      for (int k = 0; k < g.K; ++k) {
        const double mass = slab[static_cast<std::size_t>(j) * g.K + k];
        if (mass >= 1e-12) sources.push_back({j, k, mass});
      }
    if (sources.empty()) continue;

    // risk + transition margin quadratures
    if (!opt.drift_only) {
      const double xi_amp = (1.0 + style_distance(style, tl) / max_style_norm()) * upsilon0;
      std::vector<double> invd(n), invd2(n);
      double d_hi = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d_safe = p.d_base * xi_amp * omega_field[i];
        invd[i] = 1.0 / d_safe;
        invd2[i] = invd[i] * invd[i];
        d_hi = std::max(d_hi, d_safe);
      }
      const double r_cut = opt.risk_radii * d_hi;
      const int kw = static_cast<int>(r_cut / g.ds) + 1;
      for (const auto& src : sources) {
        const double ss = g.center_s(src.k);
        const double sd = g.center_d(src.j);
        const int k_lo = std::max(0, src.k - kw);
        const int k_hi = std::min(g.K - 1, src.k + kw);
        const int len = k_hi - k_lo + 1;
        for (int j = 0; j < g.J; ++j) {
          const double ddv = g.center_d(j) - sd;
          if (std::abs(ddv) > r_cut) continue;
          const std::size_t row = static_cast<std::size_t>(j) * g.K;
          const double dd2 = ddv * ddv;
          if (quartic) {
            for (int k = k_lo; k <= k_hi; ++k) {
              const double dsv = (k - src.k) * g.ds;
              const double z = (dsv * dsv + dd2) * invd2[row + k];
              qbuf[static_cast<std::size_t>(k - k_lo)] = z * z;
            }
          } else {
            for (int k = k_lo; k <= k_hi; ++k) {
              const double dsv = (k - src.k) * g.ds;
              const double r = std::sqrt(dsv * dsv + dd2);
              qbuf[static_cast<std::size_t>(k - k_lo)] =
                  std::pow(r * invd[row + k], p.eta);
            }
          }
          kernels::ops().exp_neg(qbuf.data(), wbuf.data(), static_cast<std::size_t>(len));
          for (int k = k_lo; k <= k_hi; ++k) {
            const double w = src.mass * wbuf[static_cast<std::size_t>(k - k_lo)];
            out.risk[row + k] += w;
            macc[row + k] += w * invd[row + k];
          }
        }
      }
    }

    // coupling drift
    const bool fast = ip.lambda_is_zero();
    const Mat6 psi_full = fast ? Mat6{} : style_compatibility(style, tl, ip);
    const double inv2ss = 1.0 / (2.0 * sigma_s_sq(style, tl, ip));
    const double inv2sd = 1.0 / (2.0 * sigma_d_sq(style, tl, ip));
    const double psi_sc = style_compatibility_scalar(style, tl, ip) * ip.coupling_gain;
    const double s_cut = opt.gauss_sigmas * std::sqrt(0.5 / inv2ss);
    const double d_cut = opt.gauss_sigmas * std::sqrt(0.5 / inv2sd);
    const int kw = static_cast<int>(s_cut / g.ds) + 1;
    for (const auto& src : sources) {
      const double sd = g.center_d(src.j);
      const int k_lo = std::max(0, src.k - kw);
      const int k_hi = std::min(g.K - 1, src.k + kw);
      const int len = k_hi - k_lo + 1;
      for (int j = 0; j < g.J; ++j) {
        const double ddv = g.center_d(j) - sd;
        if (std::abs(ddv) > d_cut) continue;
        const std::size_t row = static_cast<std::size_t>(j) * g.K;
        const double dd2 = ddv * ddv;
        for (int k = k_lo; k <= k_hi; ++k) {
          const double dsv = (k - src.k) * g.ds;
          qbuf[static_cast<std::size_t>(k - k_lo)] = dsv * dsv * inv2ss + dd2 * inv2sd;
        }
        kernels::ops().exp_neg(qbuf.data(), wbuf.data(), static_cast<std::size_t>(len));
        const bool own_row = std::abs(j - src.j) <= 1;
        for (int k = k_lo; k <= k_hi; ++k) {
          if (own_row && std::abs(k - src.k) <= 1) continue;  // own bump
          const double dsv = (k - src.k) * g.ds;
          const double r = std::sqrt(dsv * dsv + dd2);
          const double es = dsv / r;
          const double ed = ddv / r;
          if (fast) {
            const double w = src.mass * psi_sc * wbuf[static_cast<std::size_t>(k - k_lo)];
            out.h_s[row + k] += w * (-es) * es;
            out.h_vs[row + k] += w * (-ed) * es;
            out.h_d[row + k] += w * ed;
          } else {
            VehicleState at, cell;
            at.s = g.center_s(k);
            at.d = g.center_d(j);
            cell.s = g.center_s(src.k);
            cell.d = sd;
            const Mat6 G = geometric_matrix(at, cell, 0.0, 0.0);
            const Vec6 pd = mat6_apply(psi_full, Vec6{es, 0.0, 0.0, ed, 0.0, 0.0});
            const Vec6 gd = mat6_apply(G, pd);
            const double w = src.mass * ip.coupling_gain *
                             wbuf[static_cast<std::size_t>(k - k_lo)];
            out.h_s[row + k] += w * gd[0];
            out.h_vs[row + k] += w * gd[1];
            out.h_d[row + k] += w * gd[3];
          }
        }
      }
    }
  }

  if (!opt.drift_only)
    for (std::size_t i = 0; i < n; ++i) out.msafety[i] = std::exp(macc[i]);
  (void)bounds;
  return out;
}

}  // namespace mfg
