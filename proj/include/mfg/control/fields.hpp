#pragma once

#include <vector>

#include "mfg/field/density.hpp"
#include "mfg/field/interaction.hpp"
#include "mfg/safety/safety.hpp"

namespace mfg {

// Per-cell aggregates of the measure as felt by one style: the risk
// quadrature, the lane-transition margin quadrature, and the coupling
// drift components. Arrays are J*K, k contiguous.
struct CellFields {
  std::vector<double> risk;      // sum of omega * mass
  std::vector<double> msafety;   // exp(sum of omega/d_safe * mass)
  std::vector<double> h_s;       // drift on ds/dt
  std::vector<double> h_vs;      // drift on dv_s/dt
  std::vector<double> h_d;       // drift on dd/dt
};

struct FieldBuildOptions {
  bool drift_only = false;   // skip risk/msafety (forward pass needs h only)
  // Window cutoffs; sources beyond contribute < ~1e-8 relative.
  double gauss_sigmas = 6.0;
  double risk_radii = 2.6;
};

CellFields build_cell_fields(const DensityTensor& rho, const DrivingStyle& style,
                             const SafetyParams& p, const InteractionParams& ip,
                             const StateBounds& bounds,
                             const FieldBuildOptions& opt = {});

}  // namespace mfg
