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

#include "provtree/environment.h"

#include <cmath>
#include <cstdio>

#include "value_parse.h"

namespace provtree {
namespace {

std::string date_key(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

template <typename T>
std::optional<T> opt(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

void merge_into(EnvironmentObservation& dst, const EnvironmentObservation& src) {
  if (src.weather) dst.weather = src.weather;
  if (src.temperature) dst.temperature = src.temperature;
  if (src.bathymetry_m) dst.bathymetry_m = src.bathymetry_m;
}

}  // namespace

FixtureEnvironmentProvider::FixtureEnvironmentProvider(const Json& doc) {
  try {
    cell_degrees_ = doc.value("cell_degrees", 1.0);
    if (!(cell_degrees_ > 0.0)) throw ProviderError("cell_degrees must be > 0");
    for (const auto& o : doc.value("observations", Json::array())) {
      CellKey key{o.at("lat_cell").get<int>(), o.at("lon_cell").get<int>(),
                  o.value("date", std::string())};
      EnvironmentObservation obs;
      obs.weather = opt<std::string>(o, "weather");
      obs.temperature = opt<double>(o, "temperature");
      obs.bathymetry_m = opt<double>(o, "bathymetry");
      merge_into(observations_[key], obs);
    }
    if (auto it = doc.find("white_balance_pairs"); it != doc.end()) {
      for (auto p = it->begin(); p != it->end(); ++p) {
        std::vector<WhiteBalance> wbs;
        for (const auto& label : *p) {
          auto wb = parse_white_balance(label.get<std::string>());
          if (!wb) throw ProviderError("unknown white balance '" + label.get<std::string>() + "'");
          wbs.push_back(*wb);
        }
        white_balance_pairs_[detail::lower(p.key())] = std::move(wbs);
      }
    }
    for (const auto& p : doc.value("places", Json::array())) {
      GeoPlace place{p.at("city").get<std::string>(), p.at("latitude").get<double>(),
                     p.at("longitude").get<double>()};
      places_[detail::lower(place.city)] = place;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed environment fixture: ") + e.what());
  }
}

FixtureEnvironmentProvider FixtureEnvironmentProvider::load(const std::filesystem::path& path) {
  return FixtureEnvironmentProvider(parse_document(read_file(path)));
}

std::pair<int, int> FixtureEnvironmentProvider::cell_of(double latitude, double longitude) const {
  return {static_cast<int>(std::floor(latitude / cell_degrees_)),
          static_cast<int>(std::floor(longitude / cell_degrees_))};
}

std::optional<EnvironmentObservation> FixtureEnvironmentProvider::observe(
    double latitude, double longitude, std::chrono::year_month_day date) const {
  const auto [lat, lon] = cell_of(latitude, longitude);
  std::optional<EnvironmentObservation> out;
  if (auto it = observations_.find({lat, lon, ""}); it != observations_.end()) out = it->second;
  if (auto it = observations_.find({lat, lon, date_key(date)}); it != observations_.end()) {
    if (!out) out.emplace();
    merge_into(*out, it->second);
  }
  return out;
}

std::optional<GeoPlace> FixtureEnvironmentProvider::find_place(std::string_view city) const {
  auto it = places_.find(detail::lower(city));
  if (it == places_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<WhiteBalance>> FixtureEnvironmentProvider::white_balance_for(
    std::string_view weather) const {
  auto it = white_balance_pairs_.find(detail::lower(weather));
  if (it == white_balance_pairs_.end()) return std::nullopt;
  return it->second;
}

}  // namespace provtree
