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

#include "provtree/embedding.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace provtree {
namespace {

using Seconds = std::chrono::seconds;

std::optional<double> as_seconds(const std::optional<Timestamp>& t) {
  if (!t) return std::nullopt;
  return static_cast<double>(t->time_since_epoch().count());
}

template <typename T>
std::optional<double> as_double(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

constexpr std::string_view kNumericFields[] = {
    "spatial.latitude",          "spatial.longitude",           "temporal.datetime_original",
    "temporal.datetime_digitized", "temporal.datetime_modified", "temporal.timezone_offset",
    "temporal.gps_timestamp",    "camera.focal_length",         "camera.aperture",
    "camera.exposure_time",      "camera.shutter_speed",        "camera.iso",
    "camera.exposure_value",     "camera.white_balance",        "camera.resolution.width",
    "camera.resolution.height",  "environment.temperature",     "environment.humidity",
    "environment.pressure",      "environment.water_depth",
};

constexpr std::string_view kTextFields[] = {
    "spatial.city",     "spatial.state",  "spatial.country",     "contextual.title",
    "contextual.caption", "contextual.headline", "camera.make", "camera.model",
    "environment.weather",
};

std::string_view kind_label(DimKind k) {
  switch (k) {
    case DimKind::kNumeric:
      return "numeric";
    case DimKind::kAngularDegrees:
      return "angular";
    case DimKind::kText:
      return "text";
  }
  return "numeric";
}

std::optional<DimKind> parse_kind(std::string_view s) {
  if (s == "numeric") return DimKind::kNumeric;
  if (s == "angular" || s == "angular-degrees") return DimKind::kAngularDegrees;
  if (s == "text") return DimKind::kText;
  return std::nullopt;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

int GroupSchema::dimension(int default_text_dims) const {
  int d = 0;
  for (const auto& dim : dims) {
    d += dim.kind == DimKind::kText ? (dim.text_dims > 0 ? dim.text_dims : default_text_dims) : 1;
  }
  return d;
}

std::vector<GroupSchema> default_group_schemas() {
  using K = DimKind;
  return {
      {"G1_timestamps",
       {{"temporal.datetime_original", K::kNumeric},
        {"temporal.datetime_digitized", K::kNumeric},
        {"temporal.datetime_modified", K::kNumeric}}},
      {"G2_capabilities",
       {{"camera.make", K::kText, 8},
        {"camera.model", K::kText, 8},
        {"camera.focal_length", K::kNumeric},
        {"camera.aperture", K::kNumeric},
        {"camera.resolution.width", K::kNumeric},
        {"camera.resolution.height", K::kNumeric}}},
      {"G3_exposure_value",
       {{"camera.aperture", K::kNumeric},
        {"camera.exposure_time", K::kNumeric},
        {"camera.shutter_speed", K::kNumeric},
        {"camera.exposure_value", K::kNumeric}}},
      {"G4_exposure_triangle",
       {{"camera.exposure_time", K::kNumeric},
        {"camera.aperture", K::kNumeric},
        {"camera.iso", K::kNumeric}}},
      {"G5_time_of_day",
       {{"camera.aperture", K::kNumeric},
        {"camera.exposure_time", K::kNumeric},
        {"temporal.datetime_original", K::kNumeric}}},
      {"G6_gps_timezone",
       {{"spatial.latitude", K::kAngularDegrees},
        {"spatial.longitude", K::kAngularDegrees},
        {"temporal.timezone_offset", K::kNumeric},
        {"temporal.gps_timestamp", K::kNumeric},
        {"spatial.city", K::kText, 8},
        {"spatial.country", K::kText, 8}}},
      {"G7_weather_settings",
       {{"camera.white_balance", K::kNumeric},
        {"camera.iso", K::kNumeric},
        {"temporal.datetime_original", K::kNumeric}}},
      {"G8_environment",
       {{"environment.temperature", K::kNumeric},
        {"environment.humidity", K::kNumeric},
        {"environment.pressure", K::kNumeric},
        {"environment.weather", K::kText, 8}}},
      {"G9_water_depth",
       {{"environment.water_depth", K::kNumeric},
        {"spatial.latitude", K::kAngularDegrees},
        {"spatial.longitude", K::kAngularDegrees}}},
      {"context",
       {{"contextual.title", K::kText},
        {"contextual.headline", K::kText},
        {"contextual.caption", K::kText}}},
  };
}

bool is_known_field(std::string_view path, DimKind kind) {
  if (kind == DimKind::kText) {
    return std::find(std::begin(kTextFields), std::end(kTextFields), path) != std::end(kTextFields);
  }
  return std::find(std::begin(kNumericFields), std::end(kNumericFields), path) !=
         std::end(kNumericFields);
}

std::vector<GroupSchema> group_schemas_from_json(const Json& doc) {
  std::vector<GroupSchema> out;
  try {
    for (const auto& g : doc.at("groups")) {
      GroupSchema schema;
      schema.group_id = g.at("group_id").get<std::string>();
      for (const auto& d : g.at("dims")) {
        DimSpec dim;
        dim.field = d.at("field").get<std::string>();
        auto kind = parse_kind(d.value("kind", std::string("numeric")));
        if (!kind) throw std::invalid_argument("unknown dimension kind for " + dim.field);
        dim.kind = *kind;
        dim.text_dims = d.value("text_dims", 0);
        if (!is_known_field(dim.field, dim.kind)) {
          throw std::invalid_argument("field '" + dim.field + "' is not a " +
                                      std::string(kind_label(dim.kind)) + " model field");
        }
        schema.dims.push_back(std::move(dim));
      }
      if (schema.dims.empty()) {
        throw std::invalid_argument("group '" + schema.group_id + "' has no dimensions");
      }
      out.push_back(std::move(schema));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed group schema table: ") + e.what());
  }
  return out;
}

std::vector<GroupSchema> load_group_schemas(const std::filesystem::path& path) {
  return group_schemas_from_json(parse_document(read_file(path)));
}

Json group_schemas_to_json(const std::vector<GroupSchema>& schemas) {
  Json groups = Json::array();
  for (const auto& s : schemas) {
    Json dims = Json::array();
    for (const auto& d : s.dims) {
      Json j = {{"field", d.field}, {"kind", std::string(kind_label(d.kind))}};
      if (d.kind == DimKind::kText && d.text_dims > 0) j["text_dims"] = d.text_dims;
      dims.push_back(std::move(j));
    }
    groups.push_back({{"group_id", s.group_id}, {"dims", std::move(dims)}});
  }
  return Json{{"groups", std::move(groups)}};
}

std::optional<double> numeric_field(const ImageServiceRecord& r, std::string_view path) {
  if (path.starts_with("spatial.")) {
    if (!r.spatial) return std::nullopt;
    if (path == "spatial.latitude") return r.spatial->latitude;
    if (path == "spatial.longitude") return r.spatial->longitude;
  } else if (path.starts_with("temporal.")) {
    if (!r.temporal) return std::nullopt;
    const auto& t = *r.temporal;
    if (path == "temporal.datetime_original") return as_seconds(t.datetime_original);
    if (path == "temporal.datetime_digitized") return as_seconds(t.datetime_digitized);
    if (path == "temporal.datetime_modified") return as_seconds(t.datetime_modified);
    if (path == "temporal.gps_timestamp") return as_seconds(t.gps_timestamp);
    if (path == "temporal.timezone_offset") return as_double(t.timezone_offset);
  } else if (path.starts_with("camera.")) {
    if (!r.camera) return std::nullopt;
    const auto& c = *r.camera;
    if (path == "camera.focal_length") return c.focal_length;
    if (path == "camera.aperture") return c.aperture;
    if (path == "camera.exposure_time") return c.exposure_time;
    if (path == "camera.shutter_speed") return c.shutter_speed;
    if (path == "camera.iso") return as_double(c.iso);
    if (path == "camera.exposure_value") return c.exposure_value;
    if (path == "camera.white_balance") {
      if (!c.white_balance) return std::nullopt;
      return static_cast<double>(*c.white_balance);
    }
    if (path == "camera.resolution.width") {
      if (!c.resolution) return std::nullopt;
      return static_cast<double>(c.resolution->width);
    }
    if (path == "camera.resolution.height") {
      if (!c.resolution) return std::nullopt;
      return static_cast<double>(c.resolution->height);
    }
  } else if (path.starts_with("environment.")) {
    if (!r.environment) return std::nullopt;
    const auto& e = *r.environment;
    if (path == "environment.temperature") return e.temperature;
    if (path == "environment.humidity") return e.humidity;
    if (path == "environment.pressure") return e.pressure;
    if (path == "environment.water_depth") return e.water_depth;
  }
  return std::nullopt;
}

std::optional<std::string> text_field(const ImageServiceRecord& r, std::string_view path) {
  if (path == "spatial.city" && r.spatial) return r.spatial->city;
  if (path == "spatial.state" && r.spatial) return r.spatial->state;
  if (path == "spatial.country" && r.spatial) return r.spatial->country;
  if (path == "contextual.title" && r.contextual) return r.contextual->title;
  if (path == "contextual.caption" && r.contextual) return r.contextual->caption;
  if (path == "contextual.headline" && r.contextual) return r.contextual->headline;
  if (path == "camera.make" && r.camera) return r.camera->make;
  if (path == "camera.model" && r.camera) return r.camera->model;
  if (path == "environment.weather" && r.environment) return r.environment->weather;
  return std::nullopt;
}

std::vector<double> normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - *lo) / range, 0.0, 1.0);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isspace(c) || (c < 0x80 && std::ispunct(c))) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Eigen::VectorXd embed_text(std::string_view text, int dims) {
  if (dims < 1) throw std::invalid_argument("text embedding needs at least one dimension");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dims);
  for (const auto& tok : tokenize(text)) {
    v[static_cast<Eigen::Index>(fnv1a(tok) % static_cast<uint64_t>(dims))] += 1.0;
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::vector<Cluster> build_clusters(const std::vector<ImageServiceRecord>& versions,
                                    const std::vector<GroupSchema>& schemas,
                                    const EmbeddingConfig& config) {
  const size_t n = versions.size();
  std::vector<Cluster> clusters(n);
  for (size_t i = 0; i < n; ++i) clusters[i].version_id = versions[i].id;

  {
    std::vector<double> t(n);
    for (size_t i = 0; i < n; ++i) {
      t[i] = static_cast<double>(versions[i].upload_time.time_since_epoch().count());
    }
    const auto tn = normalize(t);
    for (size_t i = 0; i < n; ++i) clusters[i].t_upload = tn[i];
  }

  for (const auto& schema : schemas) {
    const int d = schema.dimension(config.text_dims);
    // raw(i, k): value of dimension k for version i; present(i, k) marks data.
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d);
    std::vector<std::vector<bool>> present(n, std::vector<bool>(d, false));
    std::vector<bool> has_group(n, false);

    int col = 0;
    for (const auto& dim : schema.dims) {
      if (dim.kind == DimKind::kText) {
        const int td = dim.text_dims > 0 ? dim.text_dims : config.text_dims;
        for (size_t i = 0; i < n; ++i) {
          auto s = text_field(versions[i], dim.field);
          // Absent text embeds as the zero vector, which is still a reading.
          const Eigen::VectorXd e = embed_text(s.value_or(""), td);
          raw.block(static_cast<Eigen::Index>(i), col, 1, td) = e.transpose();
          for (int k = 0; k < td; ++k) present[i][col + k] = true;
          if (s && !s->empty()) has_group[i] = true;
        }
        col += td;
      } else {
        for (size_t i = 0; i < n; ++i) {
          if (auto v = numeric_field(versions[i], dim.field)) {
            raw(static_cast<Eigen::Index>(i), col) = *v;
            present[i][col] = true;
            has_group[i] = true;
          }
        }
        ++col;
      }
    }

    Eigen::MatrixXd norm = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), d, 0.5);
    for (int k = 0; k < d; ++k) {
      std::vector<double> vals;
      std::vector<size_t> rows;
      for (size_t i = 0; i < n; ++i) {
        if (present[i][k] && has_group[i]) {
          vals.push_back(raw(static_cast<Eigen::Index>(i), k));
          rows.push_back(i);
        }
      }
      const auto nv = normalize(vals);
      for (size_t j = 0; j < rows.size(); ++j) norm(static_cast<Eigen::Index>(rows[j]), k) = nv[j];
    }

    for (size_t i = 0; i < n; ++i) {
      if (!has_group[i]) continue;
      AttributeVector av;
      av.version_id = versions[i].id;
      av.group_id = schema.group_id;
      av.values = norm.row(static_cast<Eigen::Index>(i)).transpose();
      clusters[i].points.emplace(schema.group_id, std::move(av));
    }
  }
  return clusters;
}

double intersection_score(const Cluster& a, const Cluster& b, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  int shared = 0;
  int close = 0;
  for (const auto& [gid, pa] : a.points) {
    auto it = b.points.find(gid);
    if (it == b.points.end()) continue;
    ++shared;
    if ((pa.values - it->second.values).norm() <= epsilon) ++close;
  }
  return shared == 0 ? 0.0 : static_cast<double>(close) / shared;
}

Json clusters_to_json(const std::vector<Cluster>& clusters) {
  Json out = Json::array();
  for (const auto& c : clusters) {
    Json points = Json::object();
    for (const auto& [gid, p] : c.points) {
      points[gid] = std::vector<double>(p.values.data(), p.values.data() + p.values.size());
    }
    out.push_back({{"version_id", c.version_id}, {"t_upload", c.t_upload}, {"points", points}});
  }
  return out;
}

}  // namespace provtree
