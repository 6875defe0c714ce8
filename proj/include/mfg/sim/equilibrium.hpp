#pragma once

#include <optional>

#include "mfg/control/hjb.hpp"
#include "mfg/core/params.hpp"

namespace mfg {

struct SolverParams {
  double gamma_relax = 0.5;  // in (0,1)
  double eps_conv = 1e-3;
  double eps_nash = 1e-2;
  int max_iters = 50;
  std::uint64_t seed = 1;
  bool store_values = true;  // value slices kept (auto-derived by the runner)
};

struct EquilibriumState {
  std::vector<DensityTensor> rho_seq;   // T+1 tensors (relaxed iterate)
  std::vector<VelocityField> vel_seq;   // T transport fields actually used
  std::vector<ValueTable> policies;     // one per density slab
  std::vector<HjbProblem> problems;     // matching solver setups
  std::vector<double> residuals;        // residual per iteration
  double contraction_ratio = 0.0;       // geometric fit of the residuals
  int iterations = 0;
  bool converged = false;
};

// Cellwise blend of the density iterate toward the operator output with
// per-slab mass renormalization, plus value-table blending when both
// sides carry stored slices. Shapes must match.
EquilibriumState relaxed_update(const EquilibriumState& prev,
                                const std::vector<DensityTensor>& rho_new,
                                const std::vector<ValueTable>& tables_new,
                                double gamma);

// Normalized L1 distance between the density sequences plus the mean
// absolute value-table difference.
double convergence_metric(const EquilibriumState& a, const EquilibriumState& b);

// The forward-backward fixed point loop. Perturbed style parameters may
// be supplied for robustness studies; the ego reference follows the
// scenario's target lane.
EquilibriumState run_equilibrium(const ScenarioConfig& sc, const EngineParams& ep,
                                 const SolverParams& sp,
                                 std::span<const DrivingStyle> style_override = {});

struct NashGap {
  double max_gap = 0.0;       // absolute best-response improvement
  double max_relative = 0.0;  // improvement / rollout cost scale
};

// Best-response re-solve against the frozen equilibrium density; samples
// random (time, cell) pairs per style.
NashGap nash_gap(const EquilibriumState& eq, const ScenarioConfig& sc,
                 const EngineParams& ep, int n_samples, std::uint64_t seed);

struct PerturbationRow {
  double delta;
  double distance;
  bool converged;
};

std::vector<PerturbationRow> perturbation_test(const ScenarioConfig& sc,
                                               const EngineParams& ep,
                                               const SolverParams& sp,
                                               std::span<const double> deltas);

}  // namespace mfg
