#pragma once

#include <cstdint>
#include <string>

#include "mfg/field/fokker_planck.hpp"
#include "mfg/field/interaction.hpp"
#include "mfg/plan/evaluate.hpp"
#include "mfg/safety/safety.hpp"

namespace mfg {

// Every tunable of the engine in one bundle; all fields can be overridden
// from a JSON file without rebuilding.
struct EngineParams {
  int grid_K = 150;
  int grid_J = 15;
  double sigma_s0 = 5.0;   // init bump spread, m
  double sigma_d0 = 0.8;
  NoiseModel noise;
  InteractionParams interaction;
  SafetyParams safety;
  EvalWeights eval;
  CandidateRanges candidates;
  int n_paths = 32;
  int n_ua = 5;
  int n_ud = 5;
  int v_bins = 9;
  double tau_lat = 1.0;
  double collision_dist = 2.0;  // m, vehicle footprint
  // ego lane-change reference window, s
  double lc_ref_t1 = 2.0;
  double lc_ref_t2 = 6.0;
  // equilibrium solver
  double gamma_relax = 0.5;
  double eps_conv = 1e-3;
  double eps_nash = 1e-2;
  int max_iters = 50;
  std::uint64_t seed = 1;
  // value slices are kept while cells*(T+1) stays under this many entries
  std::size_t value_entry_budget = 7'000'000;
};

// Merges fields present in the JSON document over the defaults; unknown
// keys raise an error so typos do not pass silently.
EngineParams load_params_json(const std::string& path, EngineParams base = {});
EngineParams merge_params_json_text(const std::string& text, EngineParams base = {});

}  // namespace mfg
