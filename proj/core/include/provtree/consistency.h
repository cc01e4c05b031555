// Copyright 2026 The provtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Single-record metadata consistency rules.
//
// Nine rule groups, each reading a small set of related attributes:
//
//   G1 timestamps          original <= digitized <= modified
//   G2 capabilities        settings within the camera model's ranges
//   G3 exposure value      recorded EV vs log2(N^2 / t); shutter APEX vs time
//   G4 exposure triangle   ISO-adjusted EV inside a plausible scene band
//   G5 time of day         bright/dark exposure vs local clock (advisory)
//   G6 GPS / timezone      offset vs longitude, camera vs GPS clock, city vs GPS
//   G7 weather settings    white balance vs reported weather
//   G8 environment         weather label and temperature vs reported weather
//   G9 water depth         recorded depth vs bathymetry
//
// A group with missing inputs is skipped, never guessed. Scores are 0 for a
// consistent finding and in (0.5, 1] or {1} for an inconsistent one.

#ifndef PROVTREE_CONSISTENCY_H_
#define PROVTREE_CONSISTENCY_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "provtree/environment.h"
#include "provtree/model.h"
#include "provtree/sidecar.h"

namespace provtree {

enum class RuleGroup {
  kTimestamps,
  kCapabilities,
  kExposureValue,
  kExposureTriangle,
  kTimeOfDay,
  kGpsTimezone,
  kWeatherSettings,
  kEnvironment,
  kWaterDepth,
};

inline constexpr std::array<RuleGroup, 9> kAllRuleGroups = {
    RuleGroup::kTimestamps,      RuleGroup::kCapabilities,    RuleGroup::kExposureValue,
    RuleGroup::kExposureTriangle, RuleGroup::kTimeOfDay,      RuleGroup::kGpsTimezone,
    RuleGroup::kWeatherSettings, RuleGroup::kEnvironment,     RuleGroup::kWaterDepth,
};

// "G1_timestamps", ..., "G9_water_depth".
std::string_view to_string(RuleGroup g);
std::optional<RuleGroup> parse_rule_group(std::string_view s);
// Model field paths a group reads.
const std::vector<std::string>& required_fields(RuleGroup g);

enum class FindingStatus { kConsistent, kInconsistent, kSkippedMissingInputs };
std::string_view to_string(FindingStatus s);

struct GroupFinding {
  RuleGroup group = RuleGroup::kTimestamps;
  FindingStatus status = FindingStatus::kSkippedMissingInputs;
  std::optional<double> score;  // absent iff skipped
  std::string detail;

  bool operator==(const GroupFinding&) const = default;
};

struct InconsistencyReport {
  std::string record_id;
  std::vector<GroupFinding> findings;  // one per RuleGroup, in enum order
  std::optional<double> aggregate;     // mean score over non-skipped groups

  const GroupFinding& finding(RuleGroup g) const;
  bool operator==(const InconsistencyReport&) const = default;
};

struct ConsistencyTolerances {
  double ev_tolerance = 0.5;           // EV stops, G3 and G4
  double shutter_tolerance = 0.5;      // APEX stops, G3 shutter/time cross-check
  double scene_ev_min = -2.0;          // G4 plausible band, ISO-adjusted EV
  double scene_ev_max = 20.0;
  double day_ev_min = 10.0;            // G5
  double night_ev_max = 4.0;
  int day_start_hour = 6;
  int day_end_hour = 18;
  int timezone_slack_minutes = 120;    // G6
  int gps_clock_slack_seconds = 300;
  double location_slack_km = 150.0;
  double temperature_slack_c = 10.0;   // G8
};

struct CapabilityEntry {
  std::string make;
  std::string model;
  std::pair<double, double> focal_length_range;
  std::pair<double, double> aperture_range;
  std::pair<int, int> iso_range;
  Resolution max_resolution;
};

// Camera capability table, matched on case-insensitive make + model.
//
// File layout: {"cameras": [{"make": "...", "model": "...",
//   "focal_length_range": [24, 105], "aperture_range": [4, 22],
//   "iso_range": [100, 32000], "max_resolution": [6720, 4480]}, ...]}
class CapabilityDb {
 public:
  CapabilityDb() = default;
  explicit CapabilityDb(std::vector<CapabilityEntry> entries);
  static CapabilityDb from_json(const Json& doc);
  static CapabilityDb load(const std::filesystem::path& path);

  const CapabilityEntry* find(std::string_view make, std::string_view model) const;
  const std::vector<CapabilityEntry>& entries() const { return entries_; }

 private:
  std::vector<CapabilityEntry> entries_;
};

// log2(aperture^2 / exposure_time), the ISO 100 exposure value. Throws
// std::domain_error on non-positive input.
double compute_exposure_value(double aperture, double exposure_time);

// EV adjusted for sensor gain: compute_exposure_value - log2(iso / 100).
double iso_adjusted_exposure_value(double aperture, double exposure_time, int iso);

GroupFinding check_timestamp_order(const TemporalAttrs& t);
GroupFinding check_capabilities(const CameraAttrs& c, const CapabilityDb& db);
GroupFinding check_exposure_value(const CameraAttrs& c, double tol_ev,
                                  double shutter_tolerance = 0.5);
GroupFinding check_exposure_triangle(const CameraAttrs& c, double tol_ev,
                                     const ConsistencyTolerances& tol = {});
GroupFinding check_time_of_day(const CameraAttrs& c, const TemporalAttrs& t,
                               const ConsistencyTolerances& tol = {});
GroupFinding check_gps_timezone(const SpatialAttrs& s, const TemporalAttrs& t,
                                const ConsistencyTolerances& tol = {},
                                const EnvironmentProvider* places = nullptr);

// G7, G8 and G9 share one provider lookup.
struct EnvironmentFindings {
  GroupFinding weather_settings;  // G7
  GroupFinding environment;       // G8
  GroupFinding water_depth;       // G9
};
EnvironmentFindings check_environment(const ImageServiceRecord& r, const EnvironmentProvider* env,
                                      const ConsistencyTolerances& tol = {});

// Pure function of its inputs. `env` may be null; G7-G9 are then skipped.
InconsistencyReport evaluate_all(const ImageServiceRecord& r, const CapabilityDb& db,
                                 const EnvironmentProvider* env,
                                 const ConsistencyTolerances& tol = {});

Json report_to_json(const InconsistencyReport& report);

}  // namespace provtree

#endif  // PROVTREE_CONSISTENCY_H_
