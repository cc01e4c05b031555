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

// Canonical data model for one version of an image service.
//
// A record carries the functional capture attributes (stored only) and the
// non-functional metadata, split into spatial, temporal, contextual and
// intrinsic (camera + environment) groups. All timestamps are canonical UTC
// with one-second precision.

#ifndef PROVTREE_MODEL_H_
#define PROVTREE_MODEL_H_

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace provtree {

using Timestamp = std::chrono::sys_seconds;

enum class CaptureAction { kShutterPress, kTimed, kPanoramic };
enum class ModeSwitch { kPhoto, kVideo };
enum class WhiteBalance { kAuto, kDaylight, kCloudy, kTungsten, kFluorescent, kFlash };

struct FunctionalAttrs {
  CaptureAction capture_action = CaptureAction::kShutterPress;
  ModeSwitch mode_switch = ModeSwitch::kPhoto;
  double capture_delay = 0.0;  // seconds

  bool operator==(const FunctionalAttrs&) const = default;
};

struct SpatialAttrs {
  std::optional<double> latitude;   // degrees
  std::optional<double> longitude;  // degrees
  std::optional<std::string> city;
  std::optional<std::string> state;
  std::optional<std::string> country;

  bool has_gps() const { return latitude.has_value() && longitude.has_value(); }
  bool operator==(const SpatialAttrs&) const = default;
};

struct TemporalAttrs {
  std::optional<Timestamp> datetime_original;
  std::optional<Timestamp> datetime_digitized;
  std::optional<Timestamp> datetime_modified;
  std::optional<int> timezone_offset;  // signed minutes east of UTC
  std::optional<Timestamp> gps_timestamp;

  bool operator==(const TemporalAttrs&) const = default;
};

struct ContextualAttrs {
  std::optional<std::string> title;
  std::optional<std::string> caption;
  std::optional<std::string> headline;

  // Title, headline and caption joined with single spaces; empty if none.
  std::string joined() const;
  bool operator==(const ContextualAttrs&) const = default;
};

struct Resolution {
  int width = 0;
  int height = 0;

  bool operator==(const Resolution&) const = default;
};

struct CameraAttrs {
  std::optional<std::string> make;
  std::optional<std::string> model;
  std::optional<double> focal_length;   // mm
  std::optional<double> aperture;       // f-number
  std::optional<double> exposure_time;  // seconds, unit of record
  std::optional<double> shutter_speed;  // APEX Tv, cross-checked against exposure_time
  std::optional<int> iso;
  std::optional<double> exposure_value;
  std::optional<WhiteBalance> white_balance;
  std::optional<Resolution> resolution;

  bool operator==(const CameraAttrs&) const = default;
};

struct EnvironmentAttrs {
  std::optional<double> temperature;  // degrees Celsius
  std::optional<double> humidity;     // percent
  std::optional<double> pressure;     // hPa
  std::optional<std::string> weather;
  std::optional<double> water_depth;  // meters

  bool empty() const {
    return !temperature && !humidity && !pressure && !weather && !water_depth;
  }
  bool operator==(const EnvironmentAttrs&) const = default;
};

struct ImageServiceRecord {
  std::string id;
  Timestamp upload_time{};
  std::optional<FunctionalAttrs> functional;
  std::optional<SpatialAttrs> spatial;
  std::optional<TemporalAttrs> temporal;
  std::optional<ContextualAttrs> contextual;
  std::optional<CameraAttrs> camera;
  std::optional<EnvironmentAttrs> environment;
  // Fields the parser did not recognise, keyed by dotted path. Never dropped.
  std::map<std::string, std::string> extras;

  bool operator==(const ImageServiceRecord&) const = default;
};

struct ValidationViolation {
  std::string record_id;
  std::string field_path;
  std::string message;

  bool operator==(const ValidationViolation&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationViolation> violations);

  const std::vector<ValidationViolation>& violations() const { return violations_; }

 private:
  std::vector<ValidationViolation> violations_;
};

// Checks every type invariant of the model. Empty result iff the record is
// valid. Total: never throws.
std::vector<ValidationViolation> validate(const ImageServiceRecord& record);

// Corpus-level checks on top of validate(): non-empty, unique ids.
std::vector<ValidationViolation> validate_corpus(
    const std::vector<ImageServiceRecord>& records);

// Enum <-> canonical lowercase label used by the sidecar format.
std::string_view to_string(CaptureAction v);
std::string_view to_string(ModeSwitch v);
std::string_view to_string(WhiteBalance v);
std::optional<CaptureAction> parse_capture_action(std::string_view s);
std::optional<ModeSwitch> parse_mode_switch(std::string_view s);
std::optional<WhiteBalance> parse_white_balance(std::string_view s);

// Timestamps.
//
// Accepts ISO-8601 ("2020-01-01T12:00:00", optional fraction, optional "Z" or
// "+hh:mm" / "+hhmm" zone) and the EXIF layout ("2020:01:01 12:00:00").
struct ParsedTime {
  Timestamp wall;                   // the clock reading as written
  std::optional<int> zone_minutes;  // explicit zone designator, if any

  // UTC instant: explicit zone wins, else `fallback_offset`, else UTC.
  Timestamp to_utc(std::optional<int> fallback_offset) const;
};
std::optional<ParsedTime> parse_time(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(Timestamp t);

// "+hh:mm" style offset, e.g. -300 -> "-05:00".
std::string format_offset(int minutes);
std::optional<int> parse_offset(std::string_view text);

}  // namespace provtree

#endif  // PROVTREE_MODEL_H_
