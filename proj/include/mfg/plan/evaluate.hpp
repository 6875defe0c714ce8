#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfg/field/fokker_planck.hpp"
#include "mfg/plan/path.hpp"
#include "mfg/safety/safety.hpp"

namespace mfg {

struct EvalWeights {
  double w1 = 1.0;  // field
  double w2 = 2.0;  // safety
  double w3 = 1.0;  // dynamics
  double w4 = 0.5;  // style
  double w5 = 1.5;  // mandatory
  double rho_v = 1.0, rho_a = 1.0, rho_j = 1.0, rho_kappa = 1.0;
  double j_max = 10.0;     // m/s^3
  double kappa_max = 0.2;  // 1/m
  double zeta_ttc = 5.0;
  double T_critical = 3.0;
  double w_mandatory = 5.0;
  double w_transition = 1.0;
  double w_smoothness = 0.5;
  double eps_endpoint = 0.3;  // m
};

struct PathEvaluation {
  double field = 0.0;
  double safety = 0.0;
  double dynamics = 0.0;
  double style = 0.0;
  double mandatory = 0.0;
  double total = 0.0;
};

// Predicted surrounding vehicles per time step.
using OthersPrediction = std::vector<std::vector<std::pair<VehicleState, DrivingStyle>>>;

// Constant-velocity extrapolation of every non-ego vehicle.
OthersPrediction predict_others_cv(const ScenarioConfig& sc, int steps);

// Multi-objective path cost against the equilibrium density and the
// predicted vehicles. Throws when the sequences are shorter than the path.
PathEvaluation evaluate_path(const CandidatePath& path,
                             std::span<const DensityTensor> rho_seq,
                             std::span<const VelocityField> vel_seq,
                             const OthersPrediction& others,
                             const DrivingStyle& theta_ego, const EvalWeights& ew,
                             const SafetyParams& p, const StateBounds& bounds,
                             const LaneGeometry& geo);

// Safety-gated selection: candidates that pass within d_min of a
// predicted vehicle or whose smooth-risk mass exceeds eps_coll at any
// step are rejected; among survivors the smallest total wins, ties break
// to the smaller safety term then the first index. Throws when every
// candidate is rejected ("no safe path").
int select_path(std::span<const CandidatePath> candidates,
                std::span<const PathEvaluation> evals,
                std::span<const DensityTensor> rho_seq, const OthersPrediction& others,
                const DrivingStyle& theta_ego, const SafetyParams& p,
                const StateBounds& bounds);

}  // namespace mfg
