#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfg/core/style.hpp"
#include "mfg/field/density.hpp"
#include "mfg/field/fokker_planck.hpp"

namespace mfg {

struct SafetyParams {
  double d_base = 10.0;
  double d_min = 3.0;
  double d_danger = 8.0;
  double d_safe_threshold = 15.0;
  double eps_coll = 0.05;
  double T_pred = 3.0;
  double T_critical = 3.0;
  double gamma_pred = 0.5;
  double delta_pred = 0.2;
  double sigma_pred = 1.0;
  double zeta_density = 0.3;
  double zeta_aggr = 0.2;
  double eta = 4.0;       // risk gradient sharpness, > 2
  double nu = 1.0;        // temporal discount exponent, >= 1
  double lambda_v = 0.5;
  double lambda_phi = 0.3;
  double eps_v = 0.1;
  double xi = 2.0;        // smooth risk exponent, >= 2
  double beta_boundary = 10.0;
  double boundary_cap = 1e9;
  double sigma_discrete = 20.0;
  double zeta_ttc = 5.0;
  double kappa_hetero = 0.1;
  double sigma_base_unc = 0.5;
  double v_ref = 25.0;
};

// d_base * Xi(relative motion, style mismatch) * Upsilon(t) * Omega(local
// surroundings); always >= d_base.
double dynamic_safety_distance(const VehicleState& xi, const VehicleState& xj,
                               const DrivingStyle& ti, const DrivingStyle& tj,
                               double t, double rho_local, double alpha_local,
                               const SafetyParams& p, const StateBounds& bounds);

// exp(-d^eta/d_safe^eta) modulated by velocity and heading mismatch.
double risk_kernel(const VehicleState& xi, const VehicleState& xj,
                   const DrivingStyle& ti, const DrivingStyle& tj, double d_safe,
                   const SafetyParams& p);

// Behavioral compatibility factor; ego rule takes precedence.
double gamma_compat(StyleClass ci, StyleClass cj);

double discrete_weight(const VehicleState& xi, const VehicleState& xj,
                       const DrivingStyle& ti, const DrivingStyle& tj,
                       const SafetyParams& p);

// 1 inside d_safe/2, polynomial taper to 0 at d_safe.
double smooth_risk(double d, double d_safe, double xi_exp);

// Capped-infinite inside the road edge, inverse-square within the band.
double boundary_penalty(double d_c2b, const SafetyParams& p);

// Time to collision; +infinity when not closing. Throws for coincident
// positions.
double time_to_collision(const VehicleState& xi, const VehicleState& xj);

// Field quadrature of the risk kernel plus discrete pair terms.
double instantaneous_risk(const VehicleState& x, const DrivingStyle& theta,
                          const DensityTensor& rho,
                          std::span<const std::pair<VehicleState, DrivingStyle>> others,
                          const SafetyParams& p, const StateBounds& bounds);

// Lane-transition margin: exp of the d_safe-weighted risk quadrature.
double lane_transition_margin(const VehicleState& x, const DrivingStyle& theta,
                              const DensityTensor& rho, const SafetyParams& p,
                              const StateBounds& bounds);

// Smooth collision-indicator mass of the measure around x; skip_slab
// excludes one style slab (the queried vehicle's own bump).
double smooth_risk_mass(const VehicleState& x, const DrivingStyle& theta,
                        const DensityTensor& rho, const SafetyParams& p,
                        const StateBounds& bounds, int skip_slab = -1);

// Discounted risk accumulated over a predicted density sequence with
// constant-velocity extrapolation of x. Throws on an empty sequence.
double temporal_risk(const VehicleState& x, const DrivingStyle& theta,
                     std::span<const DensityTensor> rho_pred, const SafetyParams& p,
                     const StateBounds& bounds, const NoiseModel& noise, double dt);

}  // namespace mfg
