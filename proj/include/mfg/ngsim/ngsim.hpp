#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfg/core/scenario.hpp"

namespace mfg {

struct NgsimRecord {
  long vehicle_id = 0;
  long frame_id = 0;
  double local_x = 0.0;  // m, lateral
  double local_y = 0.0;  // m, longitudinal
  double v_vel = 0.0;    // m/s
  double v_acc = 0.0;    // m/s^2
  int lane_id = 0;
  double space_headway = 0.0;
  double time_headway = 0.0;
};

struct NgsimParseReport {
  std::vector<NgsimRecord> records;
  std::vector<std::string> bad_rows;  // "<line#>: <reason>"
};

struct NgsimOptions {
  bool imperial_units = false;  // source columns in feet
  // header name remapping for schema variants
  std::map<std::string, std::string> header_map;
};

// Parses the public NGSIM column schema. Malformed rows are collected in
// the report, not dropped silently; a missing required column or an empty
// file raises.
NgsimParseReport parse_ngsim_csv(const std::string& path, const NgsimOptions& opt = {});

struct TrajectorySegment {
  long vehicle_id = 0;
  double start_time = 0.0;
  double dt = 0.1;
  std::vector<VehicleState> states;
  int lane = 0;  // modal lane id of the source records

  double span() const { return states.empty() ? 0.0 : (states.size() - 1) * dt; }
};

// Linear resampling of one vehicle's records onto the target clock;
// velocities are rederived from positions when the source column is
// absent (NaN). Throws on duplicate frames or fewer than two records.
TrajectorySegment resample_align(std::vector<NgsimRecord> records, double dt_target,
                                 double frame_dt = 0.1);

// Splits a report by vehicle id, frames sorted.
std::map<long, std::vector<NgsimRecord>> group_by_vehicle(
    const std::vector<NgsimRecord>& records);

struct ReplayRoles {
  long front = 0;  // current-lane leader
  long rear = 0;   // target-lane follower
};

struct ReplayAttachment {
  ScenarioConfig scenario;
  std::map<int, std::vector<VehicleState>> replays;  // vehicle id -> state per step
};

// Attaches the recorded front/rear vehicles to the replay scenario: the
// front leads the ego's lane, the rear follows in the target lane, both
// shifted to the standard initial gaps; the ego stays policy-controlled.
ReplayAttachment attach_replay(const ScenarioConfig& base,
                               const std::vector<TrajectorySegment>& segments,
                               const ReplayRoles& roles);

struct GapStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

// Longitudinal gap statistics between two segments over their overlap.
GapStats segment_gap_stats(const TrajectorySegment& a, const TrajectorySegment& b);

}  // namespace mfg
