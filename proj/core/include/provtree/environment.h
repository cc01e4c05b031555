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

// Environment lookups used by the weather, environment, water-depth and
// location checks. The shipped implementation reads an offline fixture file;
// live weather or bathymetry services would implement the same interface.

#ifndef PROVTREE_ENVIRONMENT_H_
#define PROVTREE_ENVIRONMENT_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "provtree/model.h"
#include "provtree/sidecar.h"

namespace provtree {

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvironmentObservation {
  std::optional<std::string> weather;
  std::optional<double> temperature;   // degrees Celsius
  std::optional<double> bathymetry_m;  // deepest water in the cell; 0 on land
};

struct GeoPlace {
  std::string city;
  double latitude = 0.0;
  double longitude = 0.0;
};

class EnvironmentProvider {
 public:
  virtual ~EnvironmentProvider() = default;

  // Conditions at a location on a UTC date. nullopt when nothing is known.
  // May throw ProviderError.
  virtual std::optional<EnvironmentObservation> observe(
      double latitude, double longitude, std::chrono::year_month_day date) const = 0;

  // Reference coordinates for a city label, for checking location labels
  // against GPS.
  virtual std::optional<GeoPlace> find_place(std::string_view city) const = 0;

  // White-balance presets compatible with a weather label, when the provider
  // knows the pairing.
  virtual std::optional<std::vector<WhiteBalance>> white_balance_for(
      std::string_view weather) const = 0;
};

// Fixture file layout:
//
//   {
//     "cell_degrees": 1.0,
//     "observations": [
//       {"lat_cell": 40, "lon_cell": -75, "date": "2020-06-15",
//        "weather": "sunny", "temperature": 26.0},
//       {"lat_cell": 40, "lon_cell": -75, "bathymetry": 0.0}   // any date
//     ],
//     "white_balance_pairs": {"sunny": ["daylight"], "overcast": ["cloudy"]},
//     "places": [{"city": "New York", "latitude": 40.7128, "longitude": -74.006}]
//   }
//
// Cells are floor(coordinate / cell_degrees). Dated entries override the
// undated entry of the same cell field by field.
class FixtureEnvironmentProvider : public EnvironmentProvider {
 public:
  FixtureEnvironmentProvider() = default;
  explicit FixtureEnvironmentProvider(const Json& doc);
  static FixtureEnvironmentProvider load(const std::filesystem::path& path);

  std::optional<EnvironmentObservation> observe(double latitude, double longitude,
                                                std::chrono::year_month_day date) const override;
  std::optional<GeoPlace> find_place(std::string_view city) const override;
  std::optional<std::vector<WhiteBalance>> white_balance_for(
      std::string_view weather) const override;

  std::pair<int, int> cell_of(double latitude, double longitude) const;

 private:
  struct CellKey {
    int lat = 0;
    int lon = 0;
    std::string date;  // "" = any date
    auto operator<=>(const CellKey&) const = default;
  };

  double cell_degrees_ = 1.0;
  std::map<CellKey, EnvironmentObservation> observations_;
  std::map<std::string, std::vector<WhiteBalance>> white_balance_pairs_;
  std::map<std::string, GeoPlace> places_;  // keyed by lowercase city
};

}  // namespace provtree

#endif  // PROVTREE_ENVIRONMENT_H_
