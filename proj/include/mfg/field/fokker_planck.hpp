#pragma once

#include <vector>

#include "mfg/field/density.hpp"

namespace mfg {

// Per-cell transport velocities for each style slab, same layout as the
// density tensor.
struct VelocityField {
  GridSpec grid;
  int L = 0;
  std::vector<double> vs;  // m/s
  std::vector<double> vd;  // m/s

  static VelocityField zeros(const GridSpec& g, int L) {
    VelocityField v;
    v.grid = g;
    v.L = L;
    const std::size_t n = static_cast<std::size_t>(g.J) * g.K * L;
    v.vs.assign(n, 0.0);
    v.vd.assign(n, 0.0);
    return v;
  }
  std::size_t idx(int l, int j, int k) const {
    return (static_cast<std::size_t>(l) * grid.J + j) * grid.K + k;
  }
};

// Diffusion magnitudes per style class. sigma_pos feeds the positional
// diffusion of the grid solver; sigma_vel only enters the uncertainty
// propagation factor. Both scale with (0.5 + alpha_aggr).
struct NoiseModel {
  double sigma_pos_base = 0.3;
  double sigma_vel_base = 0.2;

  double sigma_pos(const DrivingStyle& st) const {
    return sigma_pos_base * (0.5 + st.alpha_aggr);
  }
  double sigma_vel(const DrivingStyle& st) const {
    return sigma_vel_base * (0.5 + st.alpha_aggr);
  }
  // Positional diffusion coefficient D such that cell-variance grows by
  // 2*D*dt per axis per step.
  double diffusion(const DrivingStyle& st) const {
    const double sp = sigma_pos(st);
    return sp * sp;
  }
  // Frobenius norm of the assembled diagonal noise matrix
  // diag(sigma_pos, sigma_vel, 0, sigma_pos, sigma_vel, 0).
  double sigma_frobenius(const DrivingStyle& st) const;
};

// One explicit step: donor-cell upwind advection (dimensionally split)
// followed by centered diffusion, absorbing boundary with leak
// accounting. Throws when the CFL condition fails, reporting the largest
// Courant number.
DensityTensor fp_step(const DensityTensor& rho, const VelocityField& vel,
                      const NoiseModel& noise, double dt);

// Same transport applied to an arbitrary per-slab scalar field (used for
// momentum transport); no mass bookkeeping.
void transport_like_density(std::vector<double>& field, const DensityTensor& shape,
                            const VelocityField& vel, const NoiseModel& noise,
                            double dt);

}  // namespace mfg
