#include "mfg/field/density.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/kernels/kernels.hpp"

namespace mfg {

double DensityTensor::total_mass() const {
  return kernels::ops().sum(m.data(), m.size());
}

double DensityTensor::slab_mass(int l) const {
  return kernels::ops().sum(slab(l), slab_size());
}

DensityTensor DensityTensor::zeros(const GridSpec& g, std::vector<StyleClass> styles) {
  DensityTensor rho;
  rho.grid = g;
  rho.styles = std::move(styles);
  rho.style_params.reserve(rho.styles.size());
  for (StyleClass c : rho.styles) rho.style_params.push_back(style_catalog(c));
  rho.m.assign(rho.slab_size() * rho.styles.size(), 0.0);
  return rho;
}

void add_bump(DensityTensor& rho, int l, double s, double d, double sigma_s,
              double sigma_d, double mass) {
  const GridSpec& g = rho.grid;
  // Degenerate spread collapses to the containing cell.
  if (sigma_s < 1e-9 || sigma_d < 1e-9) {
    rho.m[rho.idx(l, g.cell_j(d), g.cell_k(s))] += mass;
    return;
  }
  const int k_lo = std::max(0, g.cell_k(s - 4.0 * sigma_s));
  const int k_hi = std::min(g.K - 1, g.cell_k(s + 4.0 * sigma_s));
  const int j_lo = std::max(0, g.cell_j(d - 4.0 * sigma_d));
  const int j_hi = std::min(g.J - 1, g.cell_j(d + 4.0 * sigma_d));
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(k_hi - k_lo + 1) * (j_hi - j_lo + 1));
  std::size_t i = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double zd = (g.center_d(j) - d) / sigma_d;
    for (int k = k_lo; k <= k_hi; ++k, ++i) {
      const double zs = (g.center_s(k) - s) / sigma_s;
      const double val = std::exp(-0.5 * (zs * zs + zd * zd));
      w[i] = val;
      total += val;
    }
  }
  if (total <= 0.0) {
    rho.m[rho.idx(l, g.cell_j(d), g.cell_k(s))] += mass;
    return;
  }
  i = 0;
  const double scale = mass / total;
  for (int j = j_lo; j <= j_hi; ++j)
    for (int k = k_lo; k <= k_hi; ++k, ++i) rho.m[rho.idx(l, j, k)] += w[i] * scale;
}

DensityTensor init_density(const ScenarioConfig& sc, const GridSpec& grid,
                           double sigma_s0, double sigma_d0,
                           std::span<const DrivingStyle> style_override) {
  DensityTensor rho = DensityTensor::zeros(grid, sc.present_styles());
  for (auto& sp : rho.style_params)
    for (const auto& ov : style_override)
      if (ov.cls == sp.cls) sp = ov;
  for (const auto& v : sc.vehicles) {
    const VehicleState x = sc.initial_state(v);
    if (!grid.contains(x.s, x.d))
      throw std::invalid_argument("vehicle " + std::to_string(v.id) +
                                  " outside grid extents");
    add_bump(rho, rho.slab_of(v.style), x.s, x.d, sigma_s0, sigma_d0);
  }
  return rho;
}

LocalStats local_stats(const DensityTensor& rho, const VehicleState& x) {
  const GridSpec& g = rho.grid;
  if (!g.contains(x.s, x.d)) throw std::invalid_argument("state outside grid");
  LocalStats out;

  const double fk = g.frac_k(x.s);
  const double fj = g.frac_j(x.d);
  const int k0 = std::min(static_cast<int>(fk), g.K - 2);
  const int j0 = std::min(static_cast<int>(fj), g.J - 2);
  const double wk = fk - k0;
  const double wj = fj - j0;
  double corners[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int l = 0; l < rho.L(); ++l)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk)
        corners[dj][dk] += rho.m[rho.idx(l, j0 + dj, k0 + dk)];
  const double interp = (1.0 - wj) * ((1.0 - wk) * corners[0][0] + wk * corners[0][1]) +
                        wj * ((1.0 - wk) * corners[1][0] + wk * corners[1][1]);
  out.rho_local = interp / g.cell_area();

  const int jc = g.cell_j(x.d);
  const int kc = g.cell_k(x.s);
  double mass = 0.0;
  double weighted = 0.0;
  for (int l = 0; l < rho.L(); ++l) {
    const double alpha = rho.style_params[static_cast<std::size_t>(l)].alpha_aggr;
    for (int j = std::max(0, jc - 1); j <= std::min(g.J - 1, jc + 1); ++j)
      for (int k = std::max(0, kc - 1); k <= std::min(g.K - 1, kc + 1); ++k) {
        const double cell = rho.m[rho.idx(l, j, k)];
        mass += cell;
        weighted += alpha * cell;
      }
  }
  out.alpha_local = mass < 1e-12 ? 0.0 : weighted / mass;
  return out;
}

}  // namespace mfg
