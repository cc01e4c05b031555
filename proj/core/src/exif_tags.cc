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

#include "provtree/exif_tags.h"

#include <cmath>
#include <optional>
#include <set>
#include <utility>

#include "value_parse.h"

namespace provtree {
namespace {

using detail::parse_coordinate;
using detail::parse_f_number;
using detail::parse_int;
using detail::parse_real;
using detail::trim;

const std::vector<std::pair<std::string_view, std::string_view>> kTagTable = {
    {"Make", "camera.make"},
    {"Model", "camera.model"},
    {"FNumber", "camera.aperture"},
    {"ApertureValue", "camera.aperture"},  // APEX Av, used when FNumber is absent
    {"ExposureTime", "camera.exposure_time"},
    {"ShutterSpeedValue", "camera.shutter_speed"},
    {"ISO", "camera.iso"},
    {"ISOSpeedRatings", "camera.iso"},
    {"PhotographicSensitivity", "camera.iso"},
    {"FocalLength", "camera.focal_length"},
    {"ExposureValue", "camera.exposure_value"},
    {"LightValue", "camera.exposure_value"},
    {"WhiteBalance", "camera.white_balance"},
    {"LightSource", "camera.white_balance"},
    {"ExifImageWidth", "camera.resolution.width"},
    {"ImageWidth", "camera.resolution.width"},
    {"ExifImageHeight", "camera.resolution.height"},
    {"ImageHeight", "camera.resolution.height"},
    {"DateTimeOriginal", "temporal.datetime_original"},
    {"DateTimeDigitized", "temporal.datetime_digitized"},
    {"CreateDate", "temporal.datetime_digitized"},
    {"DateTime", "temporal.datetime_modified"},
    {"ModifyDate", "temporal.datetime_modified"},
    {"OffsetTimeOriginal", "temporal.timezone_offset"},
    {"OffsetTime", "temporal.timezone_offset"},
    {"TimeZoneOffset", "temporal.timezone_offset"},
    {"GPSDateTime", "temporal.gps_timestamp"},
    {"GPSDateStamp", "temporal.gps_timestamp"},
    {"GPSTimeStamp", "temporal.gps_timestamp"},
    {"GPSLatitude", "spatial.latitude"},
    {"GPSLatitudeRef", "spatial.latitude"},
    {"GPSLongitude", "spatial.longitude"},
    {"GPSLongitudeRef", "spatial.longitude"},
    {"City", "spatial.city"},
    {"State", "spatial.state"},
    {"Province-State", "spatial.state"},
    {"Country", "spatial.country"},
    {"Country-PrimaryLocationName", "spatial.country"},
    {"Title", "contextual.title"},
    {"ObjectName", "contextual.title"},
    {"XPTitle", "contextual.title"},
    {"Caption-Abstract", "contextual.caption"},
    {"ImageDescription", "contextual.caption"},
    {"Description", "contextual.caption"},
    {"Headline", "contextual.headline"},
    {"AmbientTemperature", "environment.temperature"},
    {"Humidity", "environment.humidity"},
    {"Pressure", "environment.pressure"},
    {"Weather", "environment.weather"},
    {"WaterDepth", "environment.water_depth"},
};

class TagReader {
 public:
  TagReader(const TagMap& raw, const std::string& id, std::vector<ValidationViolation>* out)
      : raw_(raw), id_(id), out_(out) {}

  // First present tag among `names`.
  std::optional<std::string> get(std::initializer_list<const char*> names) {
    for (const char* n : names) {
      used_.insert(n);
    }
    for (const char* n : names) {
      auto it = raw_.find(n);
      if (it != raw_.end() && !trim(it->second).empty()) return std::string(trim(it->second));
    }
    return std::nullopt;
  }

  template <typename T, typename Parse>
  std::optional<T> value(std::initializer_list<const char*> names, const char* field, Parse parse) {
    auto s = get(names);
    if (!s) return std::nullopt;
    std::optional<T> v = parse(*s);
    if (!v) out_->push_back({id_, field, "cannot read '" + *s + "'"});
    return v;
  }

  void leftovers(std::map<std::string, std::string>* extras) const {
    for (const auto& [k, v] : raw_) {
      if (!used_.count(k)) (*extras)["tag." + k] = v;
    }
  }

 private:
  const TagMap& raw_;
  const std::string& id_;
  std::vector<ValidationViolation>* out_;
  std::set<std::string> used_;
};

std::optional<double> real(const std::string& s) { return parse_real(s); }

}  // namespace

const std::vector<std::pair<std::string_view, std::string_view>>& tag_mapping_table() {
  return kTagTable;
}

CanonicalizeResult canonicalize_tags(const TagMap& raw, std::string id, Timestamp upload_time) {
  CanonicalizeResult out;
  auto& rec = out.record;
  rec.id = std::move(id);
  rec.upload_time = upload_time;
  TagReader tags(raw, rec.id, &out.violations);

  // Camera.
  CameraAttrs cam;
  cam.make = tags.get({"Make"});
  cam.model = tags.get({"Model"});
  cam.aperture = tags.value<double>({"FNumber"}, "camera.aperture",
                                    [](const std::string& s) { return parse_f_number(s); });
  if (auto av = tags.value<double>({"ApertureValue"}, "camera.aperture", real); av && !cam.aperture) {
    cam.aperture = std::pow(2.0, *av / 2.0);
  }
  cam.exposure_time = tags.value<double>({"ExposureTime"}, "camera.exposure_time", real);
  // Extractors print ShutterSpeedValue either as APEX Tv or already converted
  // to "1/125"; the latter is seconds and is converted back to Tv.
  cam.shutter_speed = tags.value<double>(
      {"ShutterSpeedValue"}, "camera.shutter_speed", [](const std::string& s) -> std::optional<double> {
        if (s.find('/') != std::string::npos || s.find("sec") != std::string::npos) {
          auto t = parse_real(s);
          if (!t || *t <= 0) return std::nullopt;
          return -std::log2(*t);
        }
        return parse_real(s);
      });
  cam.iso = tags.value<int>({"ISO", "ISOSpeedRatings", "PhotographicSensitivity"}, "camera.iso",
                            [](const std::string& s) { return parse_int(s); });
  cam.focal_length = tags.value<double>({"FocalLength"}, "camera.focal_length", real);
  cam.exposure_value =
      tags.value<double>({"ExposureValue", "LightValue"}, "camera.exposure_value", real);
  {
    auto wb = tags.get({"WhiteBalance"});
    auto light = tags.get({"LightSource"});
    if (wb && detail::lower(*wb) == "manual" && light) wb = light;
    if (!wb) wb = light;
    if (wb) {
      cam.white_balance = detail::parse_white_balance_loose(*wb);
      if (!cam.white_balance) {
        out.violations.push_back({rec.id, "camera.white_balance", "cannot read '" + *wb + "'"});
      }
    }
  }
  {
    auto w = tags.value<int>({"ExifImageWidth", "ImageWidth"}, "camera.resolution.width",
                             [](const std::string& s) { return parse_int(s); });
    auto h = tags.value<int>({"ExifImageHeight", "ImageHeight"}, "camera.resolution.height",
                             [](const std::string& s) { return parse_int(s); });
    if (w && h) cam.resolution = Resolution{*w, *h};
  }
  if (cam != CameraAttrs{}) rec.camera = cam;

  // Temporal. The offset is read first because local clock readings need it.
  TemporalAttrs tmp;
  tmp.timezone_offset =
      tags.value<int>({"OffsetTimeOriginal", "OffsetTime", "TimeZoneOffset"},
                      "temporal.timezone_offset", [](const std::string& s) -> std::optional<int> {
                        if (auto o = parse_offset(s)) return o;
                        // Bare hours, as in the EXIF TimeZoneOffset tag.
                        if (auto h = parse_int(s)) return *h * 60;
                        return std::nullopt;
                      });
  auto local = [&](std::initializer_list<const char*> names,
                   const char* field) -> std::optional<Timestamp> {
    auto p = tags.value<ParsedTime>(names, field, [](const std::string& s) { return parse_time(s); });
    if (!p) return std::nullopt;
    return p->to_utc(tmp.timezone_offset);
  };
  tmp.datetime_original = local({"DateTimeOriginal"}, "temporal.datetime_original");
  tmp.datetime_digitized = local({"DateTimeDigitized", "CreateDate"}, "temporal.datetime_digitized");
  tmp.datetime_modified = local({"DateTime", "ModifyDate"}, "temporal.datetime_modified");
  {
    // GPS time is UTC by definition.
    std::optional<std::string> gps = tags.get({"GPSDateTime"});
    auto date = tags.get({"GPSDateStamp"});
    auto time = tags.get({"GPSTimeStamp"});
    if (!gps && date && time) gps = *date + " " + *time;
    if (gps) {
      if (auto p = parse_time(*gps)) {
        tmp.gps_timestamp = p->to_utc(std::nullopt);
      } else {
        out.violations.push_back({rec.id, "temporal.gps_timestamp", "cannot read '" + *gps + "'"});
      }
    }
  }
  if (tmp != TemporalAttrs{}) rec.temporal = tmp;

  // Spatial.
  SpatialAttrs sp;
  {
    const std::string lat_ref = tags.get({"GPSLatitudeRef"}).value_or("");
    const std::string lon_ref = tags.get({"GPSLongitudeRef"}).value_or("");
    sp.latitude = tags.value<double>({"GPSLatitude"}, "spatial.latitude", [&](const std::string& s) {
      return parse_coordinate(s, lat_ref);
    });
    sp.longitude = tags.value<double>({"GPSLongitude"}, "spatial.longitude",
                                      [&](const std::string& s) { return parse_coordinate(s, lon_ref); });
  }
  sp.city = tags.get({"City"});
  sp.state = tags.get({"State", "Province-State"});
  sp.country = tags.get({"Country", "Country-PrimaryLocationName"});
  if (sp != SpatialAttrs{}) rec.spatial = sp;

  ContextualAttrs ctx;
  ctx.title = tags.get({"Title", "ObjectName", "XPTitle"});
  ctx.caption = tags.get({"Caption-Abstract", "ImageDescription", "Description"});
  ctx.headline = tags.get({"Headline"});
  if (ctx != ContextualAttrs{}) rec.contextual = ctx;

  EnvironmentAttrs env;
  env.temperature = tags.value<double>({"AmbientTemperature"}, "environment.temperature", real);
  env.humidity = tags.value<double>({"Humidity"}, "environment.humidity", real);
  env.pressure = tags.value<double>({"Pressure"}, "environment.pressure", real);
  env.weather = tags.get({"Weather"});
  env.water_depth = tags.value<double>({"WaterDepth"}, "environment.water_depth", real);
  if (!env.empty()) rec.environment = env;

  tags.leftovers(&rec.extras);

  for (const auto& v : validate(rec)) {
    if (v.field_path == "id") continue;  // caller-supplied
    detail::clear_field(rec, v.field_path);
    out.violations.push_back(v);
  }
  return out;
}

}  // namespace provtree
