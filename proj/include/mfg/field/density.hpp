#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfg/core/scenario.hpp"
#include "mfg/core/style.hpp"
#include "mfg/field/grid.hpp"

namespace mfg {

// Cell masses per style slab, layout [l][j][k], k contiguous. Total mass
// equals the represented vehicle count; outflow through the absorbing
// boundary is tracked in `leak`.
struct DensityTensor {
  GridSpec grid;
  std::vector<StyleClass> styles;        // slab index -> class
  std::vector<DrivingStyle> style_params;  // slab parameters (catalog unless perturbed)
  std::vector<double> m;
  double leak = 0.0;

  int L() const { return static_cast<int>(styles.size()); }
  std::size_t slab_size() const {
    return static_cast<std::size_t>(grid.J) * static_cast<std::size_t>(grid.K);
  }
  std::size_t idx(int l, int j, int k) const {
    return (static_cast<std::size_t>(l) * grid.J + j) * grid.K + k;
  }
  double* slab(int l) { return m.data() + static_cast<std::size_t>(l) * slab_size(); }
  const double* slab(int l) const {
    return m.data() + static_cast<std::size_t>(l) * slab_size();
  }
  int slab_of(StyleClass c) const {
    for (int l = 0; l < L(); ++l)
      if (styles[static_cast<std::size_t>(l)] == c) return l;
    return -1;
  }
  double total_mass() const;
  double slab_mass(int l) const;

  static DensityTensor zeros(const GridSpec& g, std::vector<StyleClass> styles);
};

// One truncated Gaussian bump of unit mass per vehicle, centered at its
// initial (s, d) in its style slab. Throws if a vehicle sits outside the
// grid, naming its id. style_override replaces the catalog parameters for
// the matching classes (perturbation studies).
DensityTensor init_density(const ScenarioConfig& sc, const GridSpec& grid,
                           double sigma_s0 = 5.0, double sigma_d0 = 0.8,
                           std::span<const DrivingStyle> style_override = {});

// Adds a unit-mass bump for one vehicle state into slab l.
void add_bump(DensityTensor& rho, int l, double s, double d, double sigma_s,
              double sigma_d, double mass = 1.0);

struct LocalStats {
  double rho_local = 0.0;   // 1/m^2, bilinear total density at the point
  double alpha_local = 0.0; // mass-weighted mean aggressiveness, 3x3 window
};

// Throws when x lies outside the grid.
LocalStats local_stats(const DensityTensor& rho, const VehicleState& x);

}  // namespace mfg
