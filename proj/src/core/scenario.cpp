#include "mfg/core/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mfg {
namespace {

using json = nlohmann::json;

// Lane labels used by the multi-vehicle tables; lane_centers ascend, so
// right = -3.75 (index 0), middle = 0 (index 1), left = +3.75 (index 2).
constexpr int kRightLane = 0;
constexpr int kMiddleLane = 1;
constexpr int kLeftLane = 2;

struct TableRow {
  int id;
  StyleClass style;
  int lane;
  double rel_s;
  double speed;
};

// Scenario 7: middle -> upper(left) lane change among 17 surrounding vehicles.
const std::vector<TableRow>& scenario7_rows() {
  static const std::vector<TableRow> rows = {
      {1, StyleClass::kEgo, kMiddleLane, 0.0, 25.0},
      {2, StyleClass::kSuperAggressive, kLeftLane, -25.0, 36.5},
      {3, StyleClass::kAggressive, kRightLane, -15.0, 32.4},
      {4, StyleClass::kCompetitive, kMiddleLane, -35.0, 27.4},
      {5, StyleClass::kNormal, kLeftLane, 20.0, 22.3},
      {6, StyleClass::kAggressive, kRightLane, 30.0, 32.5},
      {7, StyleClass::kConservative, kMiddleLane, 45.0, 15.2},
      {8, StyleClass::kCompetitive, kLeftLane, -45.0, 29.7},
      {9, StyleClass::kSuperAggressive, kRightLane, -55.0, 33.9},
      {10, StyleClass::kNormal, kLeftLane, 60.0, 25.0},
      {11, StyleClass::kAggressive, kRightLane, 70.0, 33.5},
      {12, StyleClass::kCompetitive, kMiddleLane, -65.0, 30.9},
      {13, StyleClass::kNormal, kMiddleLane, 85.0, 25.9},
      {14, StyleClass::kAggressive, kLeftLane, -80.0, 30.8},
      {15, StyleClass::kConservative, kRightLane, 100.0, 17.4},
      {16, StyleClass::kCompetitive, kRightLane, -90.0, 27.3},
      {17, StyleClass::kSuperAggressive, kLeftLane, 120.0, 34.6},
      {18, StyleClass::kNormal, kMiddleLane, -100.0, 22.3},
  };
  return rows;
}

// Scenario 8: middle -> bottom(right) lane change, short initial headways.
const std::vector<TableRow>& scenario8_rows() {
  static const std::vector<TableRow> rows = {
      {1, StyleClass::kEgo, kMiddleLane, 0.0, 25.0},
      {2, StyleClass::kSuperAggressive, kMiddleLane, -20.0, 24.0},
      {3, StyleClass::kAggressive, kMiddleLane, -10.0, 20.8},
      {4, StyleClass::kCompetitive, kMiddleLane, -30.0, 20.8},
      {5, StyleClass::kNormal, kMiddleLane, 40.0, 18.4},
      {6, StyleClass::kAggressive, kMiddleLane, 15.0, 20.8},
      {7, StyleClass::kConservative, kMiddleLane, 25.0, 14.4},
      {8, StyleClass::kCompetitive, kMiddleLane, 35.0, 20.8},
      {9, StyleClass::kSuperAggressive, kMiddleLane, 45.0, 24.0},
      {10, StyleClass::kNormal, kRightLane, -35.0, 21.9},
      {11, StyleClass::kAggressive, kRightLane, 30.0, 24.7},
      {12, StyleClass::kCompetitive, kRightLane, 60.0, 24.7},
      {13, StyleClass::kNormal, kRightLane, -55.0, 21.9},
      {14, StyleClass::kAggressive, kLeftLane, 50.0, 29.9},
      {15, StyleClass::kConservative, kLeftLane, 90.0, 20.7},
      {16, StyleClass::kCompetitive, kLeftLane, -60.0, 29.9},
      {17, StyleClass::kSuperAggressive, kRightLane, 120.0, 28.5},
      {18, StyleClass::kNormal, kRightLane, -80.0, 21.9},
  };
  return rows;
}

ScenarioConfig from_rows(const std::string& name, const std::vector<TableRow>& rows,
                         int target_lane, double horizon) {
  ScenarioConfig sc;
  sc.name = name;
  sc.target_lane = target_lane;
  sc.horizon = horizon;
  for (const auto& r : rows)
    sc.vehicles.push_back({r.id, r.style, r.lane, r.rel_s, r.speed, false});
  sc.validate();
  return sc;
}

// Front vehicle in the current lane, rear vehicle in the target lane.
ScenarioConfig combo(const std::string& name, StyleClass front, StyleClass rear) {
  ScenarioConfig sc;
  sc.name = name;
  sc.target_lane = kRightLane;  // -3.75 m
  sc.horizon = 15.0;
  sc.vehicles.push_back({1, StyleClass::kEgo, kMiddleLane, 0.0, 25.0, false});
  sc.vehicles.push_back({2, front, kMiddleLane, 30.0, style_catalog(front).v_des, false});
  sc.vehicles.push_back({3, rear, kRightLane, -35.0, style_catalog(rear).v_des, false});
  sc.validate();
  return sc;
}

}  // namespace

const VehicleSpec& ScenarioConfig::ego() const {
  for (const auto& v : vehicles)
    if (v.id == ego_id) return v;
  throw std::logic_error("scenario has no ego vehicle");
}

VehicleState ScenarioConfig::initial_state(const VehicleSpec& v) const {
  VehicleState x;
  x.s = absolute_s(v);
  x.v_s = v.speed;
  x.d = geometry.lane_centers.at(static_cast<std::size_t>(v.lane));
  return clamp_state(x, bounds);
}

std::vector<StyleClass> ScenarioConfig::present_styles() const {
  std::vector<StyleClass> out;
  const auto push_unique = [&out](StyleClass c) {
    for (auto e : out)
      if (e == c) return;
    out.push_back(c);
  };
  push_unique(ego().style);
  for (const auto& v : vehicles) push_unique(v.style);
  return out;
}

void ScenarioConfig::validate() const {
  std::set<int> ids;
  bool ego_found = false;
  for (const auto& v : vehicles) {
    if (!ids.insert(v.id).second)
      throw std::invalid_argument("duplicate vehicle id " + std::to_string(v.id));
    if (v.lane < 0 || v.lane >= static_cast<int>(geometry.lane_centers.size()))
      throw std::invalid_argument("vehicle " + std::to_string(v.id) + " lane out of range");
    if (v.id == ego_id) ego_found = true;
  }
  if (!ego_found) throw std::invalid_argument("ego vehicle missing from scenario");
  if (target_lane < 0 || target_lane >= static_cast<int>(geometry.lane_centers.size()))
    throw std::invalid_argument("target lane out of range");
  if (dt <= 0.0 || horizon <= 0.0) throw std::invalid_argument("nonpositive horizon or dt");
}

ScenarioConfig build_scenario(const std::string& name) {
  if (name == "combo1") return combo(name, StyleClass::kSuperAggressive, StyleClass::kConservative);
  if (name == "combo2") return combo(name, StyleClass::kAggressive, StyleClass::kNormal);
  if (name == "combo3") return combo(name, StyleClass::kCompetitive, StyleClass::kConservative);
  if (name == "combo4") return combo(name, StyleClass::kAggressive, StyleClass::kAggressive);
  if (name == "combo5") return combo(name, StyleClass::kNormal, StyleClass::kConservative);
  if (name == "combo6") return combo(name, StyleClass::kCompetitive, StyleClass::kSuperAggressive);
  if (name == "scenario7") return from_rows(name, scenario7_rows(), kLeftLane, 30.0);
  if (name == "scenario8") return from_rows(name, scenario8_rows(), kRightLane, 45.0);
  if (name == "ngsim_replay") {
    // Base for replay: ego only; recorded vehicles are attached afterwards.
    ScenarioConfig sc;
    sc.name = name;
    sc.target_lane = kLeftLane;
    sc.horizon = 20.0;
    sc.vehicles.push_back({1, StyleClass::kEgo, kMiddleLane, 0.0, 25.0, false});
    sc.validate();
    return sc;
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

ScenarioConfig load_scenario_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json j = json::parse(in);
  ScenarioConfig sc;
  sc.name = j.value("name", path);
  sc.ego_id = j.value("ego_id", 1);
  sc.target_lane = j.at("target_lane").get<int>();
  sc.horizon = j.value("horizon", 15.0);
  sc.dt = j.value("dt", 0.1);
  sc.ego_anchor_s = j.value("ego_anchor_s", 300.0);
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    sc.bounds.s_max = b.value("s_max", sc.bounds.s_max);
    sc.bounds.v_max = b.value("v_max", sc.bounds.v_max);
    sc.bounds.a_max = b.value("a_max", sc.bounds.a_max);
    sc.bounds.d_max = b.value("d_max", sc.bounds.d_max);
    sc.bounds.v_d_max = b.value("v_d_max", sc.bounds.v_d_max);
    sc.bounds.a_d_max = b.value("a_d_max", sc.bounds.a_d_max);
  }
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    sc.geometry.lane_width = g.value("lane_width", sc.geometry.lane_width);
    sc.geometry.road_length = g.value("road_length", sc.geometry.road_length);
    if (g.contains("lane_centers"))
      sc.geometry.lane_centers = g["lane_centers"].get<std::vector<double>>();
    if (g.contains("curvature_radius"))
      sc.geometry.curvature_radius = g["curvature_radius"].get<double>();
  }
  for (const auto& v : j.at("vehicles")) {
    VehicleSpec spec;
    spec.id = v.at("id").get<int>();
    spec.style = style_from_name(v.at("style").get<std::string>());
    spec.lane = v.at("lane").get<int>();
    spec.rel_s = v.at("rel_s").get<double>();
    spec.speed = v.at("speed").get<double>();
    spec.replayed = v.value("replayed", false);
    sc.vehicles.push_back(spec);
  }
  sc.validate();
  return sc;
}

std::string scenario_to_json(const ScenarioConfig& sc) {
  json j;
  j["name"] = sc.name;
  j["ego_id"] = sc.ego_id;
  j["target_lane"] = sc.target_lane;
  j["horizon"] = sc.horizon;
  j["dt"] = sc.dt;
  j["ego_anchor_s"] = sc.ego_anchor_s;
  j["bounds"] = {{"s_max", sc.bounds.s_max},   {"v_max", sc.bounds.v_max},
                 {"a_max", sc.bounds.a_max},   {"d_max", sc.bounds.d_max},
                 {"v_d_max", sc.bounds.v_d_max}, {"a_d_max", sc.bounds.a_d_max}};
  j["geometry"] = {{"lane_width", sc.geometry.lane_width},
                   {"lane_centers", sc.geometry.lane_centers},
                   {"road_length", sc.geometry.road_length}};
  j["vehicles"] = json::array();
  for (const auto& v : sc.vehicles) {
    j["vehicles"].push_back({{"id", v.id},
                             {"style", style_name(v.style)},
                             {"lane", v.lane},
                             {"rel_s", v.rel_s},
                             {"speed", v.speed},
                             {"replayed", v.replayed}});
  }
  return j.dump(2);
}

}  // namespace mfg
