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

#include "provtree/consistency.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "provtree/geo.h"
#include "value_parse.h"

namespace provtree {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

GroupFinding skipped(RuleGroup g, std::string why) {
  return {g, FindingStatus::kSkippedMissingInputs, std::nullopt, std::move(why)};
}

GroupFinding judged(RuleGroup g, double score, std::string detail) {
  score = std::clamp(score, 0.0, 1.0);
  return {g, score > 0.0 ? FindingStatus::kInconsistent : FindingStatus::kConsistent, score,
          std::move(detail)};
}

// Tolerance-style sub-check: 0 inside the tolerance, min(1, d / 2tol) outside.
double graded(double deviation, double tolerance) {
  deviation = std::abs(deviation);
  if (deviation <= tolerance) return 0.0;
  return std::min(1.0, deviation / (2.0 * tolerance));
}

std::optional<std::chrono::year_month_day> capture_date(const TemporalAttrs& t) {
  const auto& when = t.datetime_original ? t.datetime_original : t.gps_timestamp;
  if (!when) return std::nullopt;
  return std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(*when)};
}

bool iequals(std::string_view a, std::string_view b) { return detail::lower(a) == detail::lower(b); }

const std::array<std::string_view, 9> kGroupNames = {
    "G1_timestamps",     "G2_capabilities", "G3_exposure_value",
    "G4_exposure_triangle", "G5_time_of_day",  "G6_gps_timezone",
    "G7_weather_settings",  "G8_environment",  "G9_water_depth",
};

}  // namespace

std::string_view to_string(RuleGroup g) { return kGroupNames[static_cast<size_t>(g)]; }

std::optional<RuleGroup> parse_rule_group(std::string_view s) {
  for (size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == s) return kAllRuleGroups[i];
  }
  return std::nullopt;
}

const std::vector<std::string>& required_fields(RuleGroup g) {
  static const std::map<RuleGroup, std::vector<std::string>> kFields = {
      {RuleGroup::kTimestamps,
       {"temporal.datetime_original", "temporal.datetime_digitized", "temporal.datetime_modified"}},
      {RuleGroup::kCapabilities,
       {"camera.make", "camera.model", "camera.focal_length", "camera.aperture", "camera.iso",
        "camera.resolution"}},
      {RuleGroup::kExposureValue,
       {"camera.aperture", "camera.exposure_time", "camera.shutter_speed",
        "camera.exposure_value"}},
      {RuleGroup::kExposureTriangle, {"camera.exposure_time", "camera.aperture", "camera.iso"}},
      {RuleGroup::kTimeOfDay,
       {"camera.aperture", "camera.exposure_time", "camera.iso", "temporal.datetime_original",
        "temporal.timezone_offset"}},
      {RuleGroup::kGpsTimezone,
       {"spatial.latitude", "spatial.longitude", "spatial.city", "temporal.timezone_offset",
        "temporal.datetime_original", "temporal.gps_timestamp"}},
      {RuleGroup::kWeatherSettings,
       {"temporal.datetime_original", "spatial.latitude", "spatial.longitude",
        "camera.white_balance"}},
      {RuleGroup::kEnvironment,
       {"environment.temperature", "environment.humidity", "environment.pressure",
        "environment.weather"}},
      {RuleGroup::kWaterDepth,
       {"environment.water_depth", "spatial.latitude", "spatial.longitude"}},
  };
  return kFields.at(g);
}

std::string_view to_string(FindingStatus s) {
  switch (s) {
    case FindingStatus::kConsistent:
      return "consistent";
    case FindingStatus::kInconsistent:
      return "inconsistent";
    case FindingStatus::kSkippedMissingInputs:
      return "skipped_missing_inputs";
  }
  return "unknown";
}

const GroupFinding& InconsistencyReport::finding(RuleGroup g) const {
  for (const auto& f : findings) {
    if (f.group == g) return f;
  }
  throw std::out_of_range("report has no finding for " + std::string(to_string(g)));
}

// ---------------------------------------------------------------------------
// Capability table.

CapabilityDb::CapabilityDb(std::vector<CapabilityEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.focal_length_range.first > e.focal_length_range.second ||
        e.aperture_range.first > e.aperture_range.second ||
        e.iso_range.first > e.iso_range.second || e.max_resolution.width <= 0 ||
        e.max_resolution.height <= 0) {
      throw std::invalid_argument("capability entry with empty range: " + e.make + " " + e.model);
    }
  }
}

CapabilityDb CapabilityDb::from_json(const Json& doc) {
  std::vector<CapabilityEntry> entries;
  try {
    for (const auto& c : doc.at("cameras")) {
      CapabilityEntry e;
      e.make = c.at("make").get<std::string>();
      e.model = c.at("model").get<std::string>();
      e.focal_length_range = {c.at("focal_length_range").at(0).get<double>(),
                              c.at("focal_length_range").at(1).get<double>()};
      e.aperture_range = {c.at("aperture_range").at(0).get<double>(),
                          c.at("aperture_range").at(1).get<double>()};
      e.iso_range = {c.at("iso_range").at(0).get<int>(), c.at("iso_range").at(1).get<int>()};
      e.max_resolution = {c.at("max_resolution").at(0).get<int>(),
                          c.at("max_resolution").at(1).get<int>()};
      entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed capability table: ") + e.what());
  }
  return CapabilityDb(std::move(entries));
}

CapabilityDb CapabilityDb::load(const std::filesystem::path& path) {
  return from_json(parse_document(read_file(path)));
}

const CapabilityEntry* CapabilityDb::find(std::string_view make, std::string_view model) const {
  for (const auto& e : entries_) {
    if (iequals(e.make, make) && iequals(e.model, model)) return &e;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Exposure arithmetic.

double compute_exposure_value(double aperture, double exposure_time) {
  if (!(aperture > 0.0) || !(exposure_time > 0.0)) {
    throw std::domain_error("exposure value needs aperture > 0 and exposure_time > 0");
  }
  return std::log2(aperture * aperture / exposure_time);
}

double iso_adjusted_exposure_value(double aperture, double exposure_time, int iso) {
  if (iso <= 0) throw std::domain_error("iso must be > 0");
  return compute_exposure_value(aperture, exposure_time) - std::log2(iso / 100.0);
}

// ---------------------------------------------------------------------------
// Rules.

GroupFinding check_timestamp_order(const TemporalAttrs& t) {
  constexpr RuleGroup g = RuleGroup::kTimestamps;
  std::vector<std::pair<const char*, Timestamp>> present;
  if (t.datetime_original) present.emplace_back("original", *t.datetime_original);
  if (t.datetime_digitized) present.emplace_back("digitized", *t.datetime_digitized);
  if (t.datetime_modified) present.emplace_back("modified", *t.datetime_modified);
  if (present.size() < 2) return skipped(g, "fewer than two timestamps");

  std::string broken;
  for (size_t i = 0; i < present.size(); ++i) {
    for (size_t j = i + 1; j < present.size(); ++j) {
      if (present[i].second > present[j].second) {
        if (!broken.empty()) broken += ", ";
        broken += std::string(present[i].first) + " > " + present[j].first;
      }
    }
  }
  if (broken.empty()) return judged(g, 0.0, "timestamps in order");
  return judged(g, 1.0, "timestamp order violated: " + broken);
}

GroupFinding check_capabilities(const CameraAttrs& c, const CapabilityDb& db) {
  constexpr RuleGroup g = RuleGroup::kCapabilities;
  if (!c.make || !c.model) return skipped(g, "make/model absent");
  const CapabilityEntry* e = db.find(*c.make, *c.model);
  if (!e) return skipped(g, "camera '" + *c.make + " " + *c.model + "' not in capability table");

  int checked = 0;
  std::vector<std::string> out;
  auto within = [](double v, auto range) { return v >= range.first && v <= range.second; };
  if (c.focal_length) {
    ++checked;
    if (!within(*c.focal_length, e->focal_length_range)) out.push_back("focal_length");
  }
  if (c.aperture) {
    ++checked;
    if (!within(*c.aperture, e->aperture_range)) out.push_back("aperture");
  }
  if (c.iso) {
    ++checked;
    if (!within(*c.iso, e->iso_range)) out.push_back("iso");
  }
  if (c.resolution) {
    ++checked;
    const auto& r = *c.resolution;
    const auto& m = e->max_resolution;
    const bool fits = (r.width <= m.width && r.height <= m.height) ||
                      (r.width <= m.height && r.height <= m.width);
    if (!fits) out.push_back("resolution");
  }
  if (checked == 0) return skipped(g, "no capability-bound settings recorded");
  if (out.empty()) return judged(g, 0.0, "all settings supported by " + e->model);
  std::string detail = "unsupported by " + e->model + ":";
  for (const auto& f : out) detail += " " + f;
  return judged(g, static_cast<double>(out.size()) / checked, detail);
}

GroupFinding check_exposure_value(const CameraAttrs& c, double tol_ev, double shutter_tolerance) {
  constexpr RuleGroup g = RuleGroup::kExposureValue;
  bool any = false;
  double score = 0.0;
  std::string detail;
  if (c.exposure_value && c.aperture && c.exposure_time) {
    any = true;
    const double ev = compute_exposure_value(*c.aperture, *c.exposure_time);
    const double diff = *c.exposure_value - ev;
    score = std::max(score, graded(diff, tol_ev));
    detail += fmt("recorded EV %.3f vs computed %.3f", *c.exposure_value, ev);
  }
  if (c.shutter_speed && c.exposure_time) {
    any = true;
    const double tv = -std::log2(*c.exposure_time);
    const double diff = *c.shutter_speed - tv;
    score = std::max(score, graded(diff, shutter_tolerance));
    if (!detail.empty()) detail += "; ";
    detail += fmt("shutter APEX %.3f vs exposure time APEX %.3f", *c.shutter_speed, tv);
  }
  if (!any) return skipped(g, "exposure value or its inputs absent");
  return judged(g, score, detail);
}

GroupFinding check_exposure_triangle(const CameraAttrs& c, double tol_ev,
                                     const ConsistencyTolerances& tol) {
  constexpr RuleGroup g = RuleGroup::kExposureTriangle;
  if (!c.aperture || !c.exposure_time || !c.iso) {
    return skipped(g, "aperture, exposure time or ISO absent");
  }
  const double ev100 = iso_adjusted_exposure_value(*c.aperture, *c.exposure_time, *c.iso);
  const double exceed =
      std::max({tol.scene_ev_min - ev100, ev100 - tol.scene_ev_max, 0.0});
  const std::string detail =
      fmt("ISO-adjusted EV %.2f, plausible band [%.1f, %.1f]", ev100, tol.scene_ev_min,
          tol.scene_ev_max);
  if (exceed <= 0.0) return judged(g, 0.0, detail);
  return judged(g, std::min(1.0, (exceed + tol_ev) / (2.0 * tol_ev)), detail);
}

GroupFinding check_time_of_day(const CameraAttrs& c, const TemporalAttrs& t,
                               const ConsistencyTolerances& tol) {
  constexpr RuleGroup g = RuleGroup::kTimeOfDay;
  if (!c.aperture || !c.exposure_time || !c.iso || !t.datetime_original || !t.timezone_offset) {
    return skipped(g, "exposure settings, capture time or timezone offset absent");
  }
  const double ev100 = iso_adjusted_exposure_value(*c.aperture, *c.exposure_time, *c.iso);
  bool exposure_day;
  if (ev100 >= tol.day_ev_min) {
    exposure_day = true;
  } else if (ev100 <= tol.night_ev_max) {
    exposure_day = false;
  } else {
    return skipped(g, fmt("exposure EV %.2f indeterminate between night and day bands", ev100));
  }
  using namespace std::chrono;
  const auto local = *t.datetime_original + minutes(*t.timezone_offset);
  const auto since_midnight = local - floor<days>(local);
  const bool clock_day =
      since_midnight >= hours(tol.day_start_hour) && since_midnight < hours(tol.day_end_hour);
  const double hour = duration<double>(since_midnight).count() / 3600.0;
  std::string detail = fmt("advisory: exposure EV %.2f reads as ", ev100) +
                       (exposure_day ? "day" : "night") + fmt(", local clock %.2fh reads as ", hour) +
                       (clock_day ? "day" : "night") + " (depends on indoor/outdoor shooting)";
  return judged(g, exposure_day == clock_day ? 0.0 : 1.0, detail);
}

GroupFinding check_gps_timezone(const SpatialAttrs& s, const TemporalAttrs& t,
                                const ConsistencyTolerances& tol,
                                const EnvironmentProvider* places) {
  constexpr RuleGroup g = RuleGroup::kGpsTimezone;
  bool any = false;
  double score = 0.0;
  std::string detail;
  auto note = [&detail](const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  };

  if (s.longitude && t.timezone_offset) {
    any = true;
    const int expected = static_cast<int>(std::lround(*s.longitude / 15.0)) * 60;
    const int diff = *t.timezone_offset - expected;
    score = std::max(score, graded(diff, tol.timezone_slack_minutes));
    note(fmt("offset %+.0f min vs %+.0f min expected from longitude", *t.timezone_offset,
             expected));
  }
  if (t.datetime_original && t.gps_timestamp) {
    any = true;
    const double diff = static_cast<double>((*t.datetime_original - *t.gps_timestamp).count());
    score = std::max(score, graded(diff, tol.gps_clock_slack_seconds));
    note(fmt("camera clock %+.0f s from GPS clock", diff));
  }
  if (places && s.city && s.has_gps()) {
    if (auto place = places->find_place(*s.city)) {
      any = true;
      const double km = haversine_km(*s.latitude, *s.longitude, place->latitude, place->longitude);
      score = std::max(score, graded(km, tol.location_slack_km));
      note(fmt("GPS %.0f km from the labelled city", km));
    }
  }
  if (!any) return skipped(g, "no GPS/timezone pair available");
  return judged(g, score, detail);
}

EnvironmentFindings check_environment(const ImageServiceRecord& r, const EnvironmentProvider* env,
                                      const ConsistencyTolerances& tol) {
  EnvironmentFindings out{skipped(RuleGroup::kWeatherSettings, "no environment provider"),
                          skipped(RuleGroup::kEnvironment, "no environment provider"),
                          skipped(RuleGroup::kWaterDepth, "no environment provider")};
  if (!env) return out;
  if (!r.spatial || !r.spatial->has_gps()) {
    out.weather_settings.detail = out.environment.detail = out.water_depth.detail = "no GPS";
    return out;
  }
  const TemporalAttrs temporal = r.temporal.value_or(TemporalAttrs{});
  const auto date = capture_date(temporal);
  if (!date) {
    out.weather_settings.detail = out.environment.detail = out.water_depth.detail =
        "no capture date";
    return out;
  }

  std::optional<EnvironmentObservation> obs;
  try {
    obs = env->observe(*r.spatial->latitude, *r.spatial->longitude, *date);
  } catch (const std::exception& e) {
    const std::string why = std::string("environment provider failed: ") + e.what();
    out.weather_settings.detail = out.environment.detail = out.water_depth.detail = why;
    return out;
  }
  if (!obs) {
    out.weather_settings.detail = out.environment.detail = out.water_depth.detail =
        "provider has no entry for this location and date";
    return out;
  }

  const EnvironmentAttrs recorded = r.environment.value_or(EnvironmentAttrs{});
  const CameraAttrs camera = r.camera.value_or(CameraAttrs{});

  // G7: white balance against the reported weather.
  {
    constexpr RuleGroup g = RuleGroup::kWeatherSettings;
    if (!camera.white_balance || !obs->weather) {
      out.weather_settings = skipped(g, "white balance or reported weather absent");
    } else if (*camera.white_balance == WhiteBalance::kAuto) {
      out.weather_settings = judged(g, 0.0, "auto white balance");
    } else if (auto ok = env->white_balance_for(*obs->weather)) {
      const bool fits =
          std::find(ok->begin(), ok->end(), *camera.white_balance) != ok->end();
      out.weather_settings =
          judged(g, fits ? 0.0 : 1.0,
                 "white balance " + std::string(to_string(*camera.white_balance)) +
                     (fits ? " fits " : " does not fit ") + "reported weather '" + *obs->weather +
                     "'");
    } else {
      out.weather_settings =
          skipped(g, "advisory: no white-balance pairing known for weather '" + *obs->weather +
                         "' (recorded " + std::string(to_string(*camera.white_balance)) + ")");
    }
  }

  // G8: weather label and temperature.
  {
    constexpr RuleGroup g = RuleGroup::kEnvironment;
    int checked = 0;
    int failed = 0;
    std::string detail;
    auto note = [&detail](const std::string& s) {
      if (!detail.empty()) detail += "; ";
      detail += s;
    };
    if (recorded.weather && obs->weather) {
      ++checked;
      const bool same = iequals(*recorded.weather, *obs->weather);
      if (!same) ++failed;
      note("weather '" + *recorded.weather + "' vs reported '" + *obs->weather + "'");
    }
    if (recorded.temperature && obs->temperature) {
      ++checked;
      const double diff = *recorded.temperature - *obs->temperature;
      if (std::abs(diff) > tol.temperature_slack_c) ++failed;
      note(fmt("temperature off by %.1f C", diff));
    }
    out.environment = checked == 0 ? skipped(g, "no comparable environment readings")
                                   : judged(g, static_cast<double>(failed) / checked, detail);
  }

  // G9: water depth against bathymetry.
  {
    constexpr RuleGroup g = RuleGroup::kWaterDepth;
    if (!recorded.water_depth || !obs->bathymetry_m) {
      out.water_depth = skipped(g, "water depth or bathymetry absent");
    } else {
      const bool ok = *recorded.water_depth <= *obs->bathymetry_m;
      out.water_depth = judged(g, ok ? 0.0 : 1.0,
                               fmt("recorded depth %.1f m, deepest water here %.1f m",
                                   *recorded.water_depth, *obs->bathymetry_m));
    }
  }
  return out;
}

InconsistencyReport evaluate_all(const ImageServiceRecord& r, const CapabilityDb& db,
                                 const EnvironmentProvider* env,
                                 const ConsistencyTolerances& tol) {
  const TemporalAttrs temporal = r.temporal.value_or(TemporalAttrs{});
  const CameraAttrs camera = r.camera.value_or(CameraAttrs{});
  const SpatialAttrs spatial = r.spatial.value_or(SpatialAttrs{});

  InconsistencyReport report;
  report.record_id = r.id;
  report.findings.push_back(check_timestamp_order(temporal));
  report.findings.push_back(check_capabilities(camera, db));
  report.findings.push_back(check_exposure_value(camera, tol.ev_tolerance, tol.shutter_tolerance));
  report.findings.push_back(check_exposure_triangle(camera, tol.ev_tolerance, tol));
  report.findings.push_back(check_time_of_day(camera, temporal, tol));
  report.findings.push_back(check_gps_timezone(spatial, temporal, tol, env));
  auto envf = check_environment(r, env, tol);
  report.findings.push_back(std::move(envf.weather_settings));
  report.findings.push_back(std::move(envf.environment));
  report.findings.push_back(std::move(envf.water_depth));

  double sum = 0.0;
  int n = 0;
  for (const auto& f : report.findings) {
    if (f.score) {
      sum += *f.score;
      ++n;
    }
  }
  if (n > 0) report.aggregate = sum / n;
  return report;
}

Json report_to_json(const InconsistencyReport& report) {
  Json doc = Json::object();
  doc["record_id"] = report.record_id;
  doc["aggregate"] = report.aggregate ? Json(*report.aggregate) : Json(nullptr);
  Json findings = Json::array();
  for (const auto& f : report.findings) {
    Json j = Json::object();
    j["group_id"] = std::string(to_string(f.group));
    j["status"] = std::string(to_string(f.status));
    if (f.score) j["score"] = *f.score;
    j["detail"] = f.detail;
    findings.push_back(std::move(j));
  }
  doc["findings"] = std::move(findings);
  return doc;
}

}  // namespace provtree
