#include "mfg/field/fokker_planck.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfg/kernels/kernels.hpp"

namespace mfg {
namespace {

using kernels::ops;

// Donor-cell advection of one slab along s then d, then centered
// diffusion, all with zero ghost cells. Returns the mass lost through the
// boundary.
double step_slab(const double* in, double* out, const double* nus,
                 const double* nud, double alpha_s, double alpha_d, int J, int K) {
  const std::size_t n = static_cast<std::size_t>(J) * K;
  std::vector<double> t1(n), t2(n);
  std::vector<double> prow(static_cast<std::size_t>(K) + 2, 0.0);
  std::vector<double> pnu(static_cast<std::size_t>(K) + 2, 0.0);
  const std::vector<double> zeros(static_cast<std::size_t>(K), 0.0);
  double leak = 0.0;

  // s-direction
  for (int j = 0; j < J; ++j) {
    const double* row = in + static_cast<std::size_t>(j) * K;
    const double* nu = nus + static_cast<std::size_t>(j) * K;
    std::copy(row, row + K, prow.begin() + 1);
    std::copy(nu, nu + K, pnu.begin() + 1);
    ops().advect_row(&prow[1], &pnu[1], &prow[0], &pnu[0], &prow[2], &pnu[2],
                     t1.data() + static_cast<std::size_t>(j) * K, K);
    leak += row[0] * std::max(-nu[0], 0.0) + row[K - 1] * std::max(nu[K - 1], 0.0);
  }

  // d-direction; neighbor rows are contiguous in k.
  for (int j = 0; j < J; ++j) {
    const double* c = t1.data() + static_cast<std::size_t>(j) * K;
    const double* nu_c = nud + static_cast<std::size_t>(j) * K;
    const double* up = j > 0 ? t1.data() + static_cast<std::size_t>(j - 1) * K : zeros.data();
    const double* nu_up = j > 0 ? nud + static_cast<std::size_t>(j - 1) * K : zeros.data();
    const double* dn = j < J - 1 ? t1.data() + static_cast<std::size_t>(j + 1) * K : zeros.data();
    const double* nu_dn = j < J - 1 ? nud + static_cast<std::size_t>(j + 1) * K : zeros.data();
    ops().advect_row(c, nu_c, up, nu_up, dn, nu_dn,
                     t2.data() + static_cast<std::size_t>(j) * K, K);
    if (j == 0)
      for (int k = 0; k < K; ++k) leak += c[k] * std::max(-nu_c[k], 0.0);
    if (j == J - 1)
      for (int k = 0; k < K; ++k) leak += c[k] * std::max(nu_c[k], 0.0);
  }

  // diffusion, both axes in one update
  for (int j = 0; j < J; ++j) {
    const double* c = t2.data() + static_cast<std::size_t>(j) * K;
    double* o = out + static_cast<std::size_t>(j) * K;
    std::copy(c, c + K, prow.begin() + 1);
    ops().stencil3(&prow[1], &prow[0], &prow[2], alpha_s, o, K);
    const double* up = j > 0 ? t2.data() + static_cast<std::size_t>(j - 1) * K : zeros.data();
    const double* dn = j < J - 1 ? t2.data() + static_cast<std::size_t>(j + 1) * K : zeros.data();
    ops().stencil3_accum(o, c, up, dn, alpha_d, K);
    leak += alpha_s * (c[0] + c[K - 1]);
    if (j == 0 || j == J - 1) leak += alpha_d * ops().sum(c, static_cast<std::size_t>(K));
  }
  return leak;
}

void check_cfl(const VelocityField& vel, double dt, const GridSpec& g,
               double alpha_s_max, double alpha_d_max) {
  double max_courant = 0.0;
  for (double v : vel.vs) max_courant = std::max(max_courant, std::abs(v) * dt / g.ds);
  for (double v : vel.vd) max_courant = std::max(max_courant, std::abs(v) * dt / g.dd);
  if (max_courant > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "CFL condition violated: max Courant number " << max_courant;
    throw std::runtime_error(msg.str());
  }
  if (2.0 * (alpha_s_max + alpha_d_max) > 1.0) {
    std::ostringstream msg;
    msg << "diffusion stability violated: 2*(as+ad) = "
        << 2.0 * (alpha_s_max + alpha_d_max);
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

double NoiseModel::sigma_frobenius(const DrivingStyle& st) const {
  const double sp = sigma_pos(st);
  const double sv = sigma_vel(st);
  return std::sqrt(2.0 * sp * sp + 2.0 * sv * sv);
}

DensityTensor fp_step(const DensityTensor& rho, const VelocityField& vel,
                      const NoiseModel& noise, double dt) {
  const GridSpec& g = rho.grid;
  if (vel.L != rho.L()) throw std::invalid_argument("velocity/density slab mismatch");

  double amax_s = 0.0, amax_d = 0.0;
  std::vector<double> diff(static_cast<std::size_t>(rho.L()));
  for (int l = 0; l < rho.L(); ++l) {
    const double D = noise.diffusion(rho.style_params[static_cast<std::size_t>(l)]);
    diff[static_cast<std::size_t>(l)] = D;
    amax_s = std::max(amax_s, D * dt / (g.ds * g.ds));
    amax_d = std::max(amax_d, D * dt / (g.dd * g.dd));
  }
  check_cfl(vel, dt, g, amax_s, amax_d);

  DensityTensor out = rho;
  std::vector<double> nus(rho.slab_size()), nud(rho.slab_size());
  for (int l = 0; l < rho.L(); ++l) {
    const double* vs = vel.vs.data() + static_cast<std::size_t>(l) * rho.slab_size();
    const double* vd = vel.vd.data() + static_cast<std::size_t>(l) * rho.slab_size();
    for (std::size_t i = 0; i < rho.slab_size(); ++i) {
      nus[i] = vs[i] * dt / g.ds;
      nud[i] = vd[i] * dt / g.dd;
    }
    const double D = diff[static_cast<std::size_t>(l)];
    out.leak += step_slab(rho.slab(l), out.slab(l), nus.data(), nud.data(),
                          D * dt / (g.ds * g.ds), D * dt / (g.dd * g.dd), g.J, g.K);
  }
  return out;
}

void transport_like_density(std::vector<double>& field, const DensityTensor& shape,
                            const VelocityField& vel, const NoiseModel& noise,
                            double dt) {
  const GridSpec& g = shape.grid;
  std::vector<double> nus(shape.slab_size()), nud(shape.slab_size());
  std::vector<double> out(field.size());
  for (int l = 0; l < shape.L(); ++l) {
    const double* vs = vel.vs.data() + static_cast<std::size_t>(l) * shape.slab_size();
    const double* vd = vel.vd.data() + static_cast<std::size_t>(l) * shape.slab_size();
    for (std::size_t i = 0; i < shape.slab_size(); ++i) {
      nus[i] = vs[i] * dt / g.ds;
      nud[i] = vd[i] * dt / g.dd;
    }
    const double D = noise.diffusion(shape.style_params[static_cast<std::size_t>(l)]);
    step_slab(field.data() + static_cast<std::size_t>(l) * shape.slab_size(),
              out.data() + static_cast<std::size_t>(l) * shape.slab_size(), nus.data(),
              nud.data(), D * dt / (g.ds * g.ds), D * dt / (g.dd * g.dd), g.J, g.K);
  }
  field = std::move(out);
}

}  // namespace mfg
