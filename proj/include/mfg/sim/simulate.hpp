#pragma once

#include <map>
#include <optional>

#include "mfg/plan/evaluate.hpp"
#include "mfg/sim/equilibrium.hpp"

namespace mfg {

struct TrajectoryRow {
  double t = 0.0;
  int vehicle_id = 0;
  VehicleState x;
  ControlInput u;
  bool has_control = true;  // replayed vehicles carry empty control columns
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
};

struct SimMetrics {
  std::vector<double> min_distance;  // per step, ego to nearest tracked vehicle
  std::vector<double> min_ttc;       // per step (inf when nothing closes)
  long safe_count = 0;               // per (step, pair) classification
  long warning_count = 0;
  long danger_count = 0;
  long collision_count = 0;
  double completion_time = -1.0;  // s until the ego settles on the target lane
  double ego_speed_mean = 0.0;
  double ego_speed_variance = 0.0;
};

struct SimResult {
  TrajectoryLog log;
  SimMetrics metrics;
};

// Closed-loop rollout: the ego follows the tracker policy, policy-driven
// vehicles follow their style policies plus process noise, replayed
// vehicles follow their recorded states verbatim. Collisions are
// recorded, never raised.
SimResult simulate(const ScenarioConfig& sc, const EquilibriumState& eq,
                   const EngineParams& ep, const HjbProblem& tracker_prob,
                   const ValueTable& tracker_table,
                   const std::map<int, std::vector<VehicleState>>& replays,
                   std::uint64_t seed);

// Ego tracker: the ego style re-solved against the frozen equilibrium
// density with the reference taken from the selected path (or lane
// keeping when none).
std::pair<HjbProblem, ValueTable> make_tracker(const ScenarioConfig& sc,
                                               const EngineParams& ep,
                                               const EquilibriumState& eq,
                                               const CandidatePath* path);

struct PipelineResult {
  EquilibriumState eq;
  std::vector<CandidatePath> candidates;
  std::vector<PathEvaluation> evaluations;
  int selected = -1;  // -1: no safe path, lane-keep fallback
  SimResult sim;
};

// Full run: equilibrium, candidate generation/evaluation/selection, and
// the closed-loop simulation.
PipelineResult run_pipeline(const ScenarioConfig& sc, const EngineParams& ep,
                            const SolverParams& sp,
                            const std::map<int, std::vector<VehicleState>>& replays = {});

}  // namespace mfg
