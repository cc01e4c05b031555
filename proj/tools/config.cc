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

#include "config.h"

#include <cstdlib>
#include <set>

namespace provtree::cli {
namespace {

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const Json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
    if (!obj_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config field '" + path(key) + "' has the wrong type");
    }
  }

  void read_path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    read(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_absolute() || base.empty() ? p : base / p;
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError("unknown config field '" + path(it.key()) + "'");
    }
  }

 private:
  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  const Json& obj_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::kDot:
      return "dot";
    case OutputFormat::kDocument:
      return "document";
    case OutputFormat::kCsv:
      return "csv";
  }
  return "document";
}

std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "dot") return OutputFormat::kDot;
  if (s == "document") return OutputFormat::kDocument;
  if (s == "csv") return OutputFormat::kCsv;
  return std::nullopt;
}

TreeOptions CliConfig::tree_options() const {
  TreeOptions o;
  o.embedding.text_dims = text_dims;
  o.transform.missing_group_penalty = missing_group_penalty;
  o.heuristic = heuristic;
  o.n_max = n_max;
  return o;
}

CliConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  CliConfig c;
  Section top(doc, "");
  if (const Json* t = top.child("tolerances")) {
    Section s(*t, "tolerances");
    auto& tol = c.tolerances;
    s.read("ev_tolerance", tol.ev_tolerance);
    s.read("shutter_tolerance", tol.shutter_tolerance);
    s.read("scene_ev_min", tol.scene_ev_min);
    s.read("scene_ev_max", tol.scene_ev_max);
    s.read("day_ev_min", tol.day_ev_min);
    s.read("night_ev_max", tol.night_ev_max);
    s.read("day_start_hour", tol.day_start_hour);
    s.read("day_end_hour", tol.day_end_hour);
    s.read("timezone_slack_minutes", tol.timezone_slack_minutes);
    s.read("gps_clock_slack_seconds", tol.gps_clock_slack_seconds);
    s.read("location_slack_km", tol.location_slack_km);
    s.read("temperature_slack_c", tol.temperature_slack_c);
    s.finish();
  }
  if (const Json* h = top.child("heuristic")) {
    Section s(*h, "heuristic");
    auto& p = c.heuristic;
    s.read("epsilon", p.epsilon);
    s.read("threshold0", p.threshold0);
    s.read("growth", p.growth);
    s.read("gain", p.gain);
    s.read("max_passes", p.max_passes);
    s.read("accept_complexity", p.accept_complexity);
    s.read("candidate_k", p.candidate_k);
    s.finish();
  }
  if (const Json* g = top.child("sampler")) {
    Section s(*g, "sampler");
    s.read("chain_bias", c.sampler.chain_bias);
    s.read("upload_swap", c.sampler.upload_swap);
    s.read("min_ops", c.sampler.min_ops);
    s.read("max_ops", c.sampler.max_ops);
    s.finish();
  }
  top.read("n_max", c.n_max);
  top.read("text_dims", c.text_dims);
  top.read("missing_group_penalty", c.missing_group_penalty);
  top.read("fail_over", c.fail_over);
  top.read("seed", c.seed);
  std::string format;
  top.read("format", format);
  if (!format.empty()) {
    auto f = parse_output_format(format);
    if (!f) throw ConfigError("config field 'format' must be dot, document or csv");
    c.format = *f;
  }
  top.read_path("capabilities", c.capabilities, base_dir);
  top.read_path("environment", c.environment, base_dir);
  top.read_path("group_schemas", c.group_schemas, base_dir);
  top.read_path("seed_record", c.seed_record, base_dir);
  top.finish();
  validate(c);
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = parse_document(read_file(path));
  } catch (const ParseError& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

Json config_to_json(const CliConfig& c) {
  const auto& t = c.tolerances;
  const auto& h = c.heuristic;
  Json doc = {
      {"tolerances",
       {{"ev_tolerance", t.ev_tolerance},
        {"shutter_tolerance", t.shutter_tolerance},
        {"scene_ev_min", t.scene_ev_min},
        {"scene_ev_max", t.scene_ev_max},
        {"day_ev_min", t.day_ev_min},
        {"night_ev_max", t.night_ev_max},
        {"day_start_hour", t.day_start_hour},
        {"day_end_hour", t.day_end_hour},
        {"timezone_slack_minutes", t.timezone_slack_minutes},
        {"gps_clock_slack_seconds", t.gps_clock_slack_seconds},
        {"location_slack_km", t.location_slack_km},
        {"temperature_slack_c", t.temperature_slack_c}}},
      {"heuristic",
       {{"epsilon", h.epsilon},
        {"threshold0", h.threshold0},
        {"growth", h.growth},
        {"gain", h.gain},
        {"max_passes", h.max_passes},
        {"accept_complexity", h.accept_complexity},
        {"candidate_k", h.candidate_k}}},
      {"sampler",
       {{"chain_bias", c.sampler.chain_bias},
        {"upload_swap", c.sampler.upload_swap},
        {"min_ops", c.sampler.min_ops},
        {"max_ops", c.sampler.max_ops}}},
      {"n_max", c.n_max},
      {"text_dims", c.text_dims},
      {"missing_group_penalty", c.missing_group_penalty},
      {"fail_over", c.fail_over},
      {"seed", c.seed},
      {"format", std::string(to_string(c.format))},
  };
  auto put_path = [&doc](const char* key, const std::filesystem::path& p) {
    if (!p.empty()) doc[key] = p.string();
  };
  put_path("capabilities", c.capabilities);
  put_path("environment", c.environment);
  put_path("group_schemas", c.group_schemas);
  put_path("seed_record", c.seed_record);
  return doc;
}

void validate(const CliConfig& c) {
  const auto& t = c.tolerances;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  require(t.ev_tolerance > 0, "tolerances.ev_tolerance must be > 0");
  require(t.shutter_tolerance > 0, "tolerances.shutter_tolerance must be > 0");
  require(t.scene_ev_min < t.scene_ev_max, "tolerances.scene_ev_min must be < scene_ev_max");
  require(t.night_ev_max < t.day_ev_min, "tolerances.night_ev_max must be < day_ev_min");
  require(t.day_start_hour >= 0 && t.day_start_hour < t.day_end_hour && t.day_end_hour <= 24,
          "tolerances day hours must satisfy 0 <= start < end <= 24");
  require(t.timezone_slack_minutes > 0, "tolerances.timezone_slack_minutes must be > 0");
  require(t.gps_clock_slack_seconds > 0, "tolerances.gps_clock_slack_seconds must be > 0");
  require(t.location_slack_km > 0, "tolerances.location_slack_km must be > 0");
  require(t.temperature_slack_c > 0, "tolerances.temperature_slack_c must be > 0");
  try {
    provtree::validate(c.heuristic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(c.n_max >= 1 && c.n_max <= 9, "n_max must be in [1, 9]");
  require(c.text_dims >= 1 && c.text_dims <= 4096, "text_dims must be in [1, 4096]");
  require(c.missing_group_penalty >= 0, "missing_group_penalty must be >= 0");
  require(c.fail_over >= 0 && c.fail_over <= 1, "fail_over must be in [0, 1]");
  require(c.sampler.chain_bias >= 0 && c.sampler.chain_bias <= 1,
          "sampler.chain_bias must be in [0, 1]");
  require(c.sampler.upload_swap >= 0 && c.sampler.upload_swap <= 1,
          "sampler.upload_swap must be in [0, 1]");
  require(c.sampler.min_ops >= 0 && c.sampler.min_ops <= c.sampler.max_ops,
          "sampler ops must satisfy 0 <= min_ops <= max_ops");
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("PROVTREE_DATA_DIR"); env && *env) return env;
#ifdef PROVTREE_SOURCE_DATA_DIR
  if (std::filesystem::exists(PROVTREE_SOURCE_DATA_DIR)) return PROVTREE_SOURCE_DATA_DIR;
#endif
#ifdef PROVTREE_INSTALL_DATA_DIR
  return PROVTREE_INSTALL_DATA_DIR;
#else
  return "data";
#endif
}

std::filesystem::path resolve_data(const std::filesystem::path& configured,
                                   std::string_view default_name) {
  if (!configured.empty()) return configured;
  return data_dir() / default_name;
}

}  // namespace provtree::cli
