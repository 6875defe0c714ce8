#pragma once

#include <string>
#include <vector>

#include "mfg/core/style.hpp"
#include "mfg/core/types.hpp"

namespace mfg {

struct VehicleSpec {
  int id = 0;
  StyleClass style = StyleClass::kNormal;
  int lane = 1;          // index into LaneGeometry::lane_centers
  double rel_s = 0.0;    // m, longitudinal position relative to the ego
  double speed = 0.0;    // m/s initial speed
  bool replayed = false; // driven from recorded data instead of a policy
};

struct ScenarioConfig {
  std::string name;
  std::vector<VehicleSpec> vehicles;
  int ego_id = 1;
  int target_lane = 1;
  double horizon = 15.0;    // s
  double dt = 0.1;          // s
  double ego_anchor_s = 300.0;  // m, absolute position of rel_s = 0
  StateBounds bounds;
  LaneGeometry geometry;

  const VehicleSpec& ego() const;
  double absolute_s(const VehicleSpec& v) const { return ego_anchor_s + v.rel_s; }
  VehicleState initial_state(const VehicleSpec& v) const;
  int steps() const { return static_cast<int>(std::lround(horizon / dt)); }
  // Style classes present, ego's class first, no duplicates.
  std::vector<StyleClass> present_styles() const;
  void validate() const;  // throws on broken invariants
};

// name in {combo1..combo6, scenario7, scenario8, ngsim_replay}
ScenarioConfig build_scenario(const std::string& name);

ScenarioConfig load_scenario_json(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& sc);

}  // namespace mfg
