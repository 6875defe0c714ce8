#include "mfg/field/interaction.hpp"

#include <cmath>
#include <stdexcept>

namespace mfg {
namespace {

std::array<double, 7> normalized(const DrivingStyle& s) {
  const StyleEnvelope& env = style_envelope();
  const auto v = s.as_vector();
  std::array<double, 7> out{};
  for (std::size_t i = 0; i < 7; ++i) {
    const double span = env.hi[i] - env.lo[i];
    out[i] = span > 0.0 ? (v[i] - env.lo[i]) / span : 0.0;
  }
  return out;
}

}  // namespace

double sigma_s_sq(const DrivingStyle& ti, const DrivingStyle& tj,
                  const InteractionParams& p) {
  return ti.omega_interact * tj.omega_interact * p.sigma_s_base_sq;
}

double sigma_d_sq(const DrivingStyle& ti, const DrivingStyle& tj,
                  const InteractionParams& p) {
  return std::sqrt(ti.alpha_aggr * tj.alpha_aggr) * p.sigma_d_base_sq;
}

double spatial_kernel(const VehicleState& xi, const VehicleState& xj,
                      const DrivingStyle& ti, const DrivingStyle& tj,
                      const InteractionParams& p) {
  const double ds = xi.s - xj.s;
  const double dd = xi.d - xj.d;
  return std::exp(-ds * ds / (2.0 * sigma_s_sq(ti, tj, p))) *
         std::exp(-dd * dd / (2.0 * sigma_d_sq(ti, tj, p)));
}

Mat6 geometric_matrix(const VehicleState& xi, const VehicleState& xj, double phi_i,
                      double phi_j) {
  const double ds = xj.s - xi.s;
  const double dd = xj.d - xi.d;
  if (ds == 0.0 && dd == 0.0)
    throw std::invalid_argument("geometric matrix undefined for coincident points");
  const double psi = std::atan2(dd, ds);
  const double dphi = phi_j - phi_i;
  const double cp = std::cos(psi);
  const double sp = std::sin(psi);
  const double cf = std::cos(dphi);
  const double sf = std::sin(dphi);
  const double sgn_s = ds > 0.0 ? 1.0 : (ds < 0.0 ? -1.0 : 0.0);
  const double sgn_d = dd > 0.0 ? 1.0 : (dd < 0.0 ? -1.0 : 0.0);

  Mat6 g{};
  // longitudinal block
  g[0] = cp;  g[1] = -sp; g[2] = 0.0;
  g[6] = sp;  g[7] = cp;  g[8] = 0.0;
  g[12] = 0.0; g[13] = 0.0; g[14] = sgn_s;
  // lateral block
  g[21] = 1.0; g[22] = 0.0; g[23] = sgn_d;
  g[27] = 0.0; g[28] = cf;  g[29] = -sf;
  g[33] = 0.0; g[34] = sf;  g[35] = cf;
  return g;
}

double style_compatibility_scalar(const DrivingStyle& ti, const DrivingStyle& tj,
                                  const InteractionParams& p) {
  const auto ni = normalized(ti);
  const auto nj = normalized(tj);
  double q = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    const double d = ni[i] - nj[i];
    q += p.style_weight[i] * d * d;
  }
  return std::exp(-q / (p.sigma_theta * p.sigma_theta));
}

Mat6 style_compatibility(const DrivingStyle& ti, const DrivingStyle& tj,
                         const InteractionParams& p) {
  const double scalar = style_compatibility_scalar(ti, tj, p);
  Mat6 m{};
  for (int i = 0; i < 6; ++i) m[static_cast<std::size_t>(i * 7)] = scalar;
  const auto& L = p.lambda;
  m[0] += L[0];   // (0,0) v
  m[2] += L[2];   // (0,2) va
  m[7] += L[1];   // (1,1) a
  m[12] += L[3];  // (2,0) av
  m[14] += L[4];  // (2,2) aa
  m[21] += L[5];  // (3,3) d
  m[23] += L[6];  // (3,5) da
  m[28] += L[7];  // (4,4) vd
  m[33] += L[8];  // (5,3) ad
  m[35] += L[9];  // (5,5) add
  return m;
}

Vec6 mean_field_coupling(const VehicleState& x, const DrivingStyle& theta,
                         const DensityTensor& rho, const InteractionParams& p) {
  const GridSpec& g = rho.grid;
  if (!g.contains(x.s, x.d)) throw std::invalid_argument("state outside grid");
  const int kc = g.cell_k(x.s);
  const int jc = g.cell_j(x.d);

  Vec6 h{};
  for (int l = 0; l < rho.L(); ++l) {
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    const double inv2ss = 1.0 / (2.0 * sigma_s_sq(theta, tl, p));
    const double inv2sd = 1.0 / (2.0 * sigma_d_sq(theta, tl, p));
    const bool fast = p.lambda_is_zero();
    const double psi_scalar = style_compatibility_scalar(theta, tl, p);
    const Mat6 psi_full = fast ? Mat6{} : style_compatibility(theta, tl, p);
    const double* slab = rho.slab(l);
    std::size_t i = 0;
    for (int j = 0; j < g.J; ++j) {
      const double cd = g.center_d(j);
      for (int k = 0; k < g.K; ++k, ++i) {
        const double mass = slab[i];
        if (mass < 1e-12) continue;
        if (std::abs(k - kc) <= 1 && std::abs(j - jc) <= 1) continue;  // own bump
        const double cs = g.center_s(k);
        const double ds = x.s - cs;  // offset from cell to x, repulsive direction
        const double dd = x.d - cd;
        const double r = std::sqrt(ds * ds + dd * dd);
        const double phi = std::exp(-(ds * ds * inv2ss + dd * dd * inv2sd));
        const double es = ds / r;
        const double ed = dd / r;
        const double w = mass * phi;
        if (fast) {
          // G * (psi*I) * e_dir with lane-aligned headings: the bearing
          // rotation acts on the longitudinal pair, the lateral component
          // passes through.
          const double cpsi = -es;  // bearing from x to the cell
          const double spsi = -ed;
          h[0] += w * psi_scalar * cpsi * es;
          h[1] += w * psi_scalar * spsi * es;
          h[3] += w * psi_scalar * ed;
        } else {
          VehicleState cell;
          cell.s = cs;
          cell.d = cd;
          const Mat6 G = geometric_matrix(x, cell, 0.0, 0.0);
          const Vec6 dir{es, 0.0, 0.0, ed, 0.0, 0.0};
          const Vec6 pd = mat6_apply(psi_full, dir);
          const Vec6 gd = mat6_apply(G, pd);
          for (std::size_t c = 0; c < 6; ++c) h[c] += w * gd[c];
        }
      }
    }
  }
  for (auto& c : h) c *= p.coupling_gain;
  return h;
}

std::vector<double> interaction_intensity(const DensityTensor& rho,
                                          const DrivingStyle& theta,
                                          const InteractionParams& p) {
  const GridSpec& g = rho.grid;
  std::vector<double> out(static_cast<std::size_t>(g.J) * g.K, 0.0);
  for (int l = 0; l < rho.L(); ++l) {
    const DrivingStyle tl = rho.style_params[static_cast<std::size_t>(l)];
    const double inv2ss = 1.0 / (2.0 * sigma_s_sq(theta, tl, p));
    const double inv2sd = 1.0 / (2.0 * sigma_d_sq(theta, tl, p));
    const double* slab = rho.slab(l);
    std::size_t src = 0;
    for (int js = 0; js < g.J; ++js)
      for (int ks = 0; ks < g.K; ++ks, ++src) {
        const double mass = slab[src];
        if (mass < 1e-12) continue;
        const double ss = g.center_s(ks);
        const double sd = g.center_d(js);
        std::size_t dst = 0;
        for (int j = 0; j < g.J; ++j) {
          const double dd = g.center_d(j) - sd;
          for (int k = 0; k < g.K; ++k, ++dst) {
            const double ds = g.center_s(k) - ss;
            out[dst] += mass * std::exp(-(ds * ds * inv2ss + dd * dd * inv2sd));
          }
        }
      }
  }
  return out;
}

}  // namespace mfg
