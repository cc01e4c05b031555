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

#include "provtree/sidecar.h"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "value_parse.h"

namespace provtree {
namespace {

using detail::parse_coordinate;
using detail::parse_f_number;
using detail::parse_real;

// Reads typed fields out of one JSON object. Every key that is looked at is
// marked consumed; leftovers go to the record's extras.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string prefix, const std::string& record_id,
               std::vector<ValidationViolation>* violations)
      : obj_(obj), prefix_(std::move(prefix)), id_(record_id), violations_(violations) {}

  const Json* find(const char* key) {
    consumed_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  void fail(const char* key, const std::string& message) {
    violations_->push_back({id_, path(key), message});
  }

  std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  std::optional<std::string> string(const char* key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  // Numbers may be written as JSON numbers or as strings understood by `parse`.
  template <typename Parse>
  std::optional<double> real(const char* key, Parse parse) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (v->is_number()) return v->get<double>();
    if (v->is_string()) {
      if (auto d = parse(v->get<std::string>())) return d;
      fail(key, "cannot read a number from '" + v->get<std::string>() + "'");
      return std::nullopt;
    }
    fail(key, "expected a number");
    return std::nullopt;
  }

  std::optional<double> real(const char* key) {
    return real(key, [](std::string_view s) { return parse_real(s); });
  }

  std::optional<int> integer(const char* key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (v->is_number_integer()) return v->get<int>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (d == static_cast<double>(static_cast<int>(d))) return static_cast<int>(d);
    } else if (v->is_string()) {
      if (auto i = detail::parse_int(v->get<std::string>())) return i;
    }
    fail(key, "expected an integer");
    return std::nullopt;
  }

  std::optional<ParsedTime> time(const char* key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (v->is_string()) {
      if (auto t = parse_time(v->get<std::string>())) return t;
    }
    fail(key, "expected an ISO-8601 timestamp");
    return std::nullopt;
  }

  template <typename E>
  std::optional<E> label(const char* key, std::optional<E> (*parse)(std::string_view)) {
    auto s = string(key);
    if (!s) return std::nullopt;
    if (auto e = parse(*s)) return e;
    fail(key, "unknown value '" + *s + "'");
    return std::nullopt;
  }

  void collect_extras(std::map<std::string, std::string>* extras) const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (consumed_.count(it.key())) continue;
      (*extras)[prefix_.empty() ? it.key() : prefix_ + "." + it.key()] =
          it->is_string() ? it->get<std::string>() : it->dump();
    }
  }

 private:
  const Json& obj_;
  std::string prefix_;
  const std::string& id_;
  std::vector<ValidationViolation>* violations_;
  std::set<std::string> consumed_;
};

const Json* sub_object(ObjectReader& top, const char* key) {
  const Json* v = top.find(key);
  if (!v) return nullptr;
  if (!v->is_object()) {
    top.fail(key, "expected an object");
    return nullptr;
  }
  return v;
}

std::optional<double> coordinate(ObjectReader& r, const char* key, const char* ref_key) {
  auto ref = r.string(ref_key);
  const std::string ref_text = ref.value_or("");
  return r.real(key, [&](std::string_view s) { return parse_coordinate(s, ref_text); });
}

// Rebuilds a record from JSON, collecting problems instead of throwing.
LenientRecord read_record(const Json& doc) {
  LenientRecord out;
  auto& rec = out.record;
  auto* violations = &out.violations;
  if (!doc.is_object()) {
    violations->push_back({"", "", "record must be an object"});
    return out;
  }

  if (auto it = doc.find("id"); it != doc.end() && it->is_string()) rec.id = it->get<std::string>();
  ObjectReader top(doc, "", rec.id, violations);
  top.string("id");

  if (auto t = top.time("upload_time")) {
    rec.upload_time = t->to_utc(std::nullopt);
  } else if (!doc.contains("upload_time") || doc["upload_time"].is_null()) {
    top.fail("upload_time", "missing");
  }

  if (const Json* f = sub_object(top, "functional")) {
    ObjectReader r(*f, "functional", rec.id, violations);
    FunctionalAttrs fa;
    if (auto v = r.label<CaptureAction>("capture_action", &parse_capture_action)) {
      fa.capture_action = *v;
    }
    if (auto v = r.label<ModeSwitch>("mode_switch", &parse_mode_switch)) fa.mode_switch = *v;
    if (auto v = r.real("capture_delay")) fa.capture_delay = *v;
    rec.functional = fa;
    r.collect_extras(&rec.extras);
  }

  if (const Json* s = sub_object(top, "spatial")) {
    ObjectReader r(*s, "spatial", rec.id, violations);
    SpatialAttrs sa;
    sa.latitude = coordinate(r, "latitude", "latitude_ref");
    sa.longitude = coordinate(r, "longitude", "longitude_ref");
    sa.city = r.string("city");
    sa.state = r.string("state");
    sa.country = r.string("country");
    rec.spatial = sa;
    r.collect_extras(&rec.extras);
  }

  if (const Json* t = sub_object(top, "temporal")) {
    ObjectReader r(*t, "temporal", rec.id, violations);
    TemporalAttrs ta;
    {
      const Json* off = r.find("timezone_offset");
      if (off && off->is_string()) {
        ta.timezone_offset = parse_offset(off->get<std::string>());
        if (!ta.timezone_offset) r.fail("timezone_offset", "expected minutes or +hh:mm");
      } else if (off) {
        ta.timezone_offset = r.integer("timezone_offset");
      }
    }
    auto local = [&](const char* key) -> std::optional<Timestamp> {
      auto p = r.time(key);
      if (!p) return std::nullopt;
      return p->to_utc(ta.timezone_offset);
    };
    ta.datetime_original = local("datetime_original");
    ta.datetime_digitized = local("datetime_digitized");
    ta.datetime_modified = local("datetime_modified");
    if (auto p = r.time("gps_timestamp")) ta.gps_timestamp = p->to_utc(std::nullopt);
    rec.temporal = ta;
    r.collect_extras(&rec.extras);
  }

  if (const Json* c = sub_object(top, "contextual")) {
    ObjectReader r(*c, "contextual", rec.id, violations);
    ContextualAttrs ca;
    ca.title = r.string("title");
    ca.caption = r.string("caption");
    ca.headline = r.string("headline");
    rec.contextual = ca;
    r.collect_extras(&rec.extras);
  }

  if (const Json* c = sub_object(top, "camera")) {
    ObjectReader r(*c, "camera", rec.id, violations);
    CameraAttrs ca;
    ca.make = r.string("make");
    ca.model = r.string("model");
    ca.focal_length = r.real("focal_length");
    ca.aperture = r.real("aperture", [](std::string_view s) { return parse_f_number(s); });
    ca.exposure_time = r.real("exposure_time");
    ca.shutter_speed = r.real("shutter_speed");
    ca.iso = r.integer("iso");
    ca.exposure_value = r.real("exposure_value");
    {
      auto wb = r.string("white_balance");
      if (wb) {
        ca.white_balance = detail::parse_white_balance_loose(*wb);
        if (!ca.white_balance) r.fail("white_balance", "unknown value '" + *wb + "'");
      }
    }
    if (const Json* res = r.find("resolution")) {
      if (res->is_object()) {
        ObjectReader rr(*res, "camera.resolution", rec.id, violations);
        auto w = rr.integer("width");
        auto h = rr.integer("height");
        if (w && h) {
          ca.resolution = Resolution{*w, *h};
        } else {
          r.fail("resolution", "expected width and height");
        }
        rr.collect_extras(&rec.extras);
      } else if (res->is_string()) {
        ca.resolution = detail::parse_resolution(res->get<std::string>());
        if (!ca.resolution) r.fail("resolution", "expected WIDTHxHEIGHT");
      } else {
        r.fail("resolution", "expected an object");
      }
    }
    rec.camera = ca;
    r.collect_extras(&rec.extras);
  }

  if (const Json* e = sub_object(top, "environment")) {
    ObjectReader r(*e, "environment", rec.id, violations);
    EnvironmentAttrs ea;
    ea.temperature = r.real("temperature");
    ea.humidity = r.real("humidity");
    ea.pressure = r.real("pressure");
    ea.weather = r.string("weather");
    ea.water_depth = r.real("water_depth");
    rec.environment = ea;
    r.collect_extras(&rec.extras);
  }

  if (const Json* x = top.find("extras")) {
    if (x->is_object()) {
      for (auto it = x->begin(); it != x->end(); ++it) {
        rec.extras[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
      }
    } else {
      top.fail("extras", "expected an object");
    }
  }
  top.collect_extras(&rec.extras);
  return out;
}

template <typename T>
void put(Json& obj, const char* key, const std::optional<T>& v) {
  if (v) obj[key] = *v;
}

void put_time(Json& obj, const char* key, const std::optional<Timestamp>& v) {
  if (v) obj[key] = format_utc(*v);
}

}  // namespace

namespace detail {

void clear_field(ImageServiceRecord& r, std::string_view path) {
  const auto dot = path.find('.');
  const auto group = path.substr(0, dot);
  const auto field = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  if (group == "spatial" && r.spatial) {
    if (field == "latitude") r.spatial->latitude.reset();
    if (field == "longitude") r.spatial->longitude.reset();
  } else if (group == "temporal" && r.temporal) {
    if (field == "timezone_offset") r.temporal->timezone_offset.reset();
  } else if (group == "camera" && r.camera) {
    auto& c = *r.camera;
    if (field == "focal_length") c.focal_length.reset();
    if (field == "aperture") c.aperture.reset();
    if (field == "exposure_time") c.exposure_time.reset();
    if (field == "shutter_speed") c.shutter_speed.reset();
    if (field == "iso") c.iso.reset();
    if (field == "exposure_value") c.exposure_value.reset();
    if (field.starts_with("resolution")) c.resolution.reset();
  } else if (group == "environment" && r.environment) {
    auto& e = *r.environment;
    if (field == "temperature") e.temperature.reset();
    if (field == "humidity") e.humidity.reset();
    if (field == "pressure") e.pressure.reset();
    if (field == "water_depth") e.water_depth.reset();
  } else if (group == "functional" && r.functional) {
    if (field == "capture_delay") r.functional->capture_delay = 0.0;
  }
}

}  // namespace detail

Json parse_document(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

LenientRecord record_from_json_lenient(const Json& doc) {
  LenientRecord out = read_record(doc);
  for (const auto& v : validate(out.record)) {
    if (v.field_path == "id") {
      out.violations.push_back(v);
      continue;
    }
    detail::clear_field(out.record, v.field_path);
    out.violations.push_back(v);
  }
  return out;
}

ImageServiceRecord record_from_json(const Json& doc) {
  LenientRecord out = read_record(doc);
  auto invariants = validate(out.record);
  out.violations.insert(out.violations.end(), invariants.begin(), invariants.end());
  if (!out.violations.empty()) throw ValidationError(std::move(out.violations));
  return std::move(out.record);
}

ImageServiceRecord parse_record(std::string_view bytes) {
  return record_from_json(parse_document(bytes));
}

Json record_to_json(const ImageServiceRecord& r) {
  Json doc = Json::object();
  doc["id"] = r.id;
  doc["upload_time"] = format_utc(r.upload_time);
  if (r.spatial) {
    Json s = Json::object();
    put(s, "latitude", r.spatial->latitude);
    put(s, "longitude", r.spatial->longitude);
    put(s, "city", r.spatial->city);
    put(s, "state", r.spatial->state);
    put(s, "country", r.spatial->country);
    doc["spatial"] = std::move(s);
  }
  if (r.temporal) {
    Json t = Json::object();
    put_time(t, "datetime_original", r.temporal->datetime_original);
    put_time(t, "datetime_digitized", r.temporal->datetime_digitized);
    put_time(t, "datetime_modified", r.temporal->datetime_modified);
    put(t, "timezone_offset", r.temporal->timezone_offset);
    put_time(t, "gps_timestamp", r.temporal->gps_timestamp);
    doc["temporal"] = std::move(t);
  }
  if (r.contextual) {
    Json c = Json::object();
    put(c, "title", r.contextual->title);
    put(c, "caption", r.contextual->caption);
    put(c, "headline", r.contextual->headline);
    doc["contextual"] = std::move(c);
  }
  if (r.camera) {
    const auto& cam = *r.camera;
    Json c = Json::object();
    put(c, "make", cam.make);
    put(c, "model", cam.model);
    put(c, "focal_length", cam.focal_length);
    put(c, "aperture", cam.aperture);
    put(c, "exposure_time", cam.exposure_time);
    put(c, "shutter_speed", cam.shutter_speed);
    put(c, "iso", cam.iso);
    put(c, "exposure_value", cam.exposure_value);
    if (cam.white_balance) c["white_balance"] = std::string(to_string(*cam.white_balance));
    if (cam.resolution) {
      c["resolution"] = Json{{"width", cam.resolution->width}, {"height", cam.resolution->height}};
    }
    doc["camera"] = std::move(c);
  }
  if (r.environment) {
    const auto& env = *r.environment;
    Json e = Json::object();
    put(e, "temperature", env.temperature);
    put(e, "humidity", env.humidity);
    put(e, "pressure", env.pressure);
    put(e, "weather", env.weather);
    put(e, "water_depth", env.water_depth);
    doc["environment"] = std::move(e);
  }
  if (r.functional) {
    doc["functional"] = Json{
        {"capture_action", std::string(to_string(r.functional->capture_action))},
        {"mode_switch", std::string(to_string(r.functional->mode_switch))},
        {"capture_delay", r.functional->capture_delay},
    };
  }
  if (!r.extras.empty()) {
    Json x = Json::object();
    for (const auto& [k, v] : r.extras) x[k] = v;
    doc["extras"] = std::move(x);
  }
  return doc;
}

std::string serialize_record(const ImageServiceRecord& r) { return record_to_json(r).dump(2); }

Corpus parse_corpus(std::string_view bytes) {
  const Json doc = parse_document(bytes);
  if (!doc.is_object() || !doc.contains("versions") || !doc["versions"].is_array()) {
    throw ValidationError({{"", "versions", "corpus must be an object with a 'versions' array"}});
  }
  Corpus corpus;
  std::vector<ValidationViolation> violations;
  for (const auto& item : doc["versions"]) {
    LenientRecord lr = read_record(item);
    auto inv = validate(lr.record);
    violations.insert(violations.end(), lr.violations.begin(), lr.violations.end());
    violations.insert(violations.end(), inv.begin(), inv.end());
    corpus.versions.push_back(std::move(lr.record));
  }
  std::set<std::string> ids;
  for (const auto& r : corpus.versions) {
    if (!r.id.empty() && !ids.insert(r.id).second) {
      violations.push_back({r.id, "id", "duplicate id '" + r.id + "'"});
    }
  }
  if (doc.contains("ground_truth_tree") && !doc["ground_truth_tree"].is_null()) {
    const Json& gt = doc["ground_truth_tree"];
    if (!gt.is_object()) {
      violations.push_back({"", "ground_truth_tree", "expected an object"});
    } else {
      ParentMap parents;
      for (auto it = gt.begin(); it != gt.end(); ++it) {
        if (!ids.count(it.key())) {
          violations.push_back({it.key(), "ground_truth_tree", "unknown version id"});
        }
        if (it->is_null()) {
          parents[it.key()] = std::nullopt;
        } else if (it->is_string()) {
          if (!ids.count(it->get<std::string>())) {
            violations.push_back({it.key(), "ground_truth_tree", "unknown parent id"});
          }
          parents[it.key()] = it->get<std::string>();
        } else {
          violations.push_back({it.key(), "ground_truth_tree", "parent must be a string or null"});
        }
      }
      corpus.ground_truth_tree = std::move(parents);
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }

Json corpus_to_json(const Corpus& corpus) {
  Json doc = Json::object();
  Json versions = Json::array();
  for (const auto& r : corpus.versions) versions.push_back(record_to_json(r));
  doc["versions"] = std::move(versions);
  if (corpus.ground_truth_tree) {
    Json gt = Json::object();
    for (const auto& [child, parent] : *corpus.ground_truth_tree) {
      gt[child] = parent ? Json(*parent) : Json(nullptr);
    }
    doc["ground_truth_tree"] = std::move(gt);
  }
  return doc;
}

std::string serialize_corpus(const Corpus& corpus) { return corpus_to_json(corpus).dump(2); }

}  // namespace provtree
