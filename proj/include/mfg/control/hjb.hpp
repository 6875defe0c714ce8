#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfg/control/cost.hpp"
#include "mfg/control/fields.hpp"
#include "mfg/field/fokker_planck.hpp"

namespace mfg {

// Velocity bins of the reduced HJB state (s cell, d cell, v bin); levels
// are evenly spaced over [0, v_max] inclusive.
struct VBins {
  int B = 9;
  double v_max = 40.0;

  double level(int b) const { return v_max * b / (B - 1); }
  double frac_b(double v) const {
    const double f = v / (v_max / (B - 1));
    return std::clamp(f, 0.0, static_cast<double>(B - 1));
  }
  int nearest(double v) const {
    return std::clamp(static_cast<int>(std::lround(frac_b(v))), 0, B - 1);
  }
};

// Discrete control set: acceleration levels within the style's saturation
// bounds, lateral acceleration levels, and the lane-change decision.
struct ControlGrid {
  std::vector<double> ua;
  std::vector<double> ud;
  static constexpr int kDeltas[3] = {-1, 0, 1};

  int size() const { return static_cast<int>(ua.size() * ud.size()) * 3; }
  ControlInput control(int idx) const {
    const int nd = static_cast<int>(ud.size());
    const int del = idx % 3;
    const int rest = idx / 3;
    ControlInput u;
    u.u_a = ua[static_cast<std::size_t>(rest / nd)];
    u.u_d = ud[static_cast<std::size_t>(rest % nd)];
    u.delta = kDeltas[del];
    return u;
  }
};

ControlGrid make_control_grid(const DrivingStyle& style, const StateBounds& bounds,
                              int n_a = 5, int n_d = 5);

struct HjbProblem {
  DrivingStyle style;
  ReferenceProfile ref;
  CostWeights weights;
  GridSpec grid;
  VBins vbins;
  ControlGrid controls;
  SafetyParams safety;
  InteractionParams interaction;
  StateBounds bounds;
  LaneGeometry geo;
  double dt = 0.1;
  double tau_lat = 1.0;  // s, lateral command integration constant
  int T_steps = 150;
  bool store_values = true;  // keep all value slices (memory permitting)
};

// Cost-to-go slices per time step plus the argmin control index per
// reduced-state cell. Value slices are kept when store_values is set
// (small grids, diagnostics); the slice at t = 0 is always kept.
struct ValueTable {
  int T_steps = 0;
  int K = 0, J = 0, B = 0;
  bool store_values = false;
  std::vector<std::vector<double>> values;   // [t] -> B*J*K (may be empty)
  std::vector<double> value0;                // slice at t = 0
  std::vector<std::vector<std::uint8_t>> policy;  // [t] -> B*J*K control idx

  std::size_t cells() const {
    return static_cast<std::size_t>(B) * J * K;
  }
  std::size_t idx(int b, int j, int k) const {
    return (static_cast<std::size_t>(b) * J + j) * K + k;
  }
  const std::vector<double>& slice(int t) const;
};

// Per-time-step evaluation context shared by the sweep, policy
// extraction, and simulation queries.
struct HjbStage {
  const HjbProblem* prob = nullptr;
  int t = 0;
  CellFields fields;
  const std::vector<double>* v_next = nullptr;

  // Stage cost rate terms (shared formulas for table builds and point
  // queries).
  double cost_cell(int j, int k) const;       // position-dependent terms
  double cost_speed(double v) const;          // speed tracking + centripetal
  double cost_control(const ControlInput& u) const;  // control-only terms
  double cost_delta(int delta, int j, int k) const;  // transition margin term

  // Deterministic reduced successor under one control.
  void successor(double s, double d, double v, int j, int k, const ControlInput& u,
                 double* s_out, double* d_out, double* v_out, double* oob_pen) const;

  // min over the control grid of stage cost * dt + interpolated next
  // value; returns the argmin index through best_idx.
  double best_value(double s, double d, double v, int j, int k,
                    const std::vector<double>& v_next_slice, int* best_idx) const;
  // Same objective evaluated for one control index.
  double value_of(double s, double d, double v, int j, int k, int u_idx,
                  const std::vector<double>& v_next_slice) const;
};

HjbStage make_stage(const HjbProblem& prob, const DensityTensor& rho_t, int t);

// Backward sweep over the density sequence. When prev is non-null its
// value slices damp the backup: V_t = (1-gamma)*prev_t + gamma*fresh_t.
ValueTable hjb_backward_solve(const HjbProblem& prob,
                              std::span<const DensityTensor> rho_seq,
                              const ValueTable* prev = nullptr, double gamma = 1.0);

// Argmin control at a cell, re-derived from the stored next slice; ties
// break toward the smaller control norm, then the smaller index.
ControlInput extract_policy(const ValueTable& vt, const HjbProblem& prob,
                            const DensityTensor& rho_t, int t, int j, int k, int b);

// Cost-to-go of following the stored policy (no minimization); used for
// best-response gap measurements. Requires stored values in vt layout.
ValueTable policy_evaluate(const HjbProblem& prob,
                           std::span<const DensityTensor> rho_seq,
                           const ValueTable& policy_source);

double terminal_value_at(const HjbProblem& prob, int b, int j, int k);

}  // namespace mfg
