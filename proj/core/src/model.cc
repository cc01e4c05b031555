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

#include "provtree/model.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace provtree {
namespace {

constexpr int kMaxOffsetMinutes = 14 * 60;

std::string summarize(const std::vector<ValidationViolation>& violations) {
  std::string msg = "validation failed:";
  for (const auto& v : violations) {
    msg += " [" + (v.record_id.empty() ? std::string("?") : v.record_id) + "] " +
           v.field_path + ": " + v.message + ";";
  }
  return msg;
}

class Checker {
 public:
  explicit Checker(const std::string& id) : id_(id) {}

  void require(bool ok, std::string path, std::string message) {
    if (!ok) out_.push_back({id_, std::move(path), std::move(message)});
  }

  template <typename T>
  void finite(const std::optional<T>& v, const std::string& path) {
    if (v) require(std::isfinite(static_cast<double>(*v)), path, "must be finite");
  }

  std::vector<ValidationViolation> take() { return std::move(out_); }

 private:
  std::string id_;
  std::vector<ValidationViolation> out_;
};

bool in_range(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Reads exactly `n` decimal digits starting at `pos`.
std::optional<int> digits(std::string_view s, size_t pos, size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int value = 0;
  for (size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

}  // namespace

std::string ContextualAttrs::joined() const {
  std::string out;
  for (const auto* part : {&title, &headline, &caption}) {
    if (!*part || (*part)->empty()) continue;
    if (!out.empty()) out += ' ';
    out += **part;
  }
  return out;
}

ValidationError::ValidationError(std::vector<ValidationViolation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

std::vector<ValidationViolation> validate(const ImageServiceRecord& r) {
  Checker c(r.id);
  c.require(!r.id.empty(), "id", "must be non-empty");

  if (r.functional) {
    c.require(std::isfinite(r.functional->capture_delay) && r.functional->capture_delay >= 0.0,
              "functional.capture_delay", "must be >= 0");
  }
  if (r.spatial) {
    const auto& s = *r.spatial;
    if (s.latitude) {
      c.require(in_range(*s.latitude, -90.0, 90.0), "spatial.latitude", "must be in [-90, 90]");
    }
    if (s.longitude) {
      c.require(in_range(*s.longitude, -180.0, 180.0), "spatial.longitude",
                "must be in [-180, 180]");
    }
  }
  if (r.temporal && r.temporal->timezone_offset) {
    const int off = *r.temporal->timezone_offset;
    c.require(off >= -kMaxOffsetMinutes && off <= kMaxOffsetMinutes, "temporal.timezone_offset",
              "must be within +/-14h");
  }
  if (r.camera) {
    const auto& cam = *r.camera;
    if (cam.focal_length) {
      c.require(positive(*cam.focal_length), "camera.focal_length", "must be > 0");
    }
    if (cam.aperture) c.require(positive(*cam.aperture), "camera.aperture", "must be > 0");
    if (cam.exposure_time) {
      c.require(positive(*cam.exposure_time), "camera.exposure_time", "must be > 0");
    }
    if (cam.iso) c.require(*cam.iso > 0, "camera.iso", "must be > 0");
    c.finite(cam.shutter_speed, "camera.shutter_speed");
    c.finite(cam.exposure_value, "camera.exposure_value");
    if (cam.resolution) {
      c.require(cam.resolution->width > 0, "camera.resolution.width", "must be > 0");
      c.require(cam.resolution->height > 0, "camera.resolution.height", "must be > 0");
    }
  }
  if (r.environment) {
    const auto& env = *r.environment;
    c.finite(env.temperature, "environment.temperature");
    if (env.humidity) {
      c.require(in_range(*env.humidity, 0.0, 100.0), "environment.humidity",
                "must be in [0, 100]");
    }
    if (env.pressure) c.require(positive(*env.pressure), "environment.pressure", "must be > 0");
    if (env.water_depth) {
      c.require(std::isfinite(*env.water_depth) && *env.water_depth >= 0.0,
                "environment.water_depth", "must be >= 0");
    }
  }
  return c.take();
}

std::vector<ValidationViolation> validate_corpus(const std::vector<ImageServiceRecord>& records) {
  std::vector<ValidationViolation> out;
  if (records.empty()) out.push_back({"", "versions", "corpus has no records"});
  std::set<std::string> seen;
  for (const auto& r : records) {
    auto v = validate(r);
    out.insert(out.end(), v.begin(), v.end());
    if (!r.id.empty() && !seen.insert(r.id).second) {
      out.push_back({r.id, "id", "duplicate id '" + r.id + "'"});
    }
  }
  return out;
}

namespace {

constexpr std::array<std::pair<CaptureAction, std::string_view>, 3> kCaptureActions{{
    {CaptureAction::kShutterPress, "shutter_press"},
    {CaptureAction::kTimed, "timed"},
    {CaptureAction::kPanoramic, "panoramic"},
}};
constexpr std::array<std::pair<ModeSwitch, std::string_view>, 2> kModeSwitches{{
    {ModeSwitch::kPhoto, "photo"},
    {ModeSwitch::kVideo, "video"},
}};
constexpr std::array<std::pair<WhiteBalance, std::string_view>, 6> kWhiteBalances{{
    {WhiteBalance::kAuto, "auto"},
    {WhiteBalance::kDaylight, "daylight"},
    {WhiteBalance::kCloudy, "cloudy"},
    {WhiteBalance::kTungsten, "tungsten"},
    {WhiteBalance::kFluorescent, "fluorescent"},
    {WhiteBalance::kFlash, "flash"},
}};

template <typename E, size_t N>
std::string_view label_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [e, s] : table) {
    if (e == v) return s;
  }
  return "unknown";
}

template <typename E, size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view s) {
  for (const auto& [e, label] : table) {
    if (label == s) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(CaptureAction v) { return label_of(kCaptureActions, v); }
std::string_view to_string(ModeSwitch v) { return label_of(kModeSwitches, v); }
std::string_view to_string(WhiteBalance v) { return label_of(kWhiteBalances, v); }
std::optional<CaptureAction> parse_capture_action(std::string_view s) {
  return value_of(kCaptureActions, s);
}
std::optional<ModeSwitch> parse_mode_switch(std::string_view s) {
  return value_of(kModeSwitches, s);
}
std::optional<WhiteBalance> parse_white_balance(std::string_view s) {
  return value_of(kWhiteBalances, s);
}

Timestamp ParsedTime::to_utc(std::optional<int> fallback_offset) const {
  const int offset = zone_minutes ? *zone_minutes : fallback_offset.value_or(0);
  return wall - std::chrono::minutes(offset);
}

std::optional<int> parse_offset(std::string_view s) {
  if (s == "Z" || s == "z") return 0;
  if (s.size() < 3 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  const int sign = s[0] == '-' ? -1 : 1;
  auto hh = digits(s, 1, 2);
  if (!hh) return std::nullopt;
  int mm = 0;
  if (s.size() == 6 && s[3] == ':') {
    auto m = digits(s, 4, 2);
    if (!m) return std::nullopt;
    mm = *m;
  } else if (s.size() == 5) {
    auto m = digits(s, 3, 2);
    if (!m) return std::nullopt;
    mm = *m;
  } else if (s.size() != 3) {
    return std::nullopt;
  }
  if (*hh > 14 || mm > 59) return std::nullopt;
  return sign * (*hh * 60 + mm);
}

std::optional<ParsedTime> parse_time(std::string_view s) {
  using namespace std::chrono;
  // Date part: YYYY-MM-DD or YYYY:MM:DD.
  if (s.size() < 19) return std::nullopt;
  const char dsep = s[4];
  if ((dsep != '-' && dsep != ':') || s[7] != dsep) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ' && s[10] != 't') return std::nullopt;
  if (s[13] != ':' || s[16] != ':') return std::nullopt;
  auto y = digits(s, 0, 4), mo = digits(s, 5, 2), d = digits(s, 8, 2);
  auto h = digits(s, 11, 2), mi = digits(s, 14, 2), se = digits(s, 17, 2);
  if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
  if (*h > 23 || *mi > 59 || *se > 60) return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;

  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  ParsedTime out;
  out.wall = sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*se};
  if (pos < s.size()) {
    auto zone = parse_offset(s.substr(pos));
    if (!zone) return std::nullopt;
    out.zone_minutes = zone;
  }
  return out;
}

std::string format_utc(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_offset(int minutes) {
  const char sign = minutes < 0 ? '-' : '+';
  const int m = std::abs(minutes);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", sign, m / 60, m % 60);
  return buf;
}

}  // namespace provtree
