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

// Lenient scalar parsers shared by the sidecar reader and the EXIF tag mapper.

#ifndef PROVTREE_SRC_VALUE_PARSE_H_
#define PROVTREE_SRC_VALUE_PARSE_H_

#include <optional>
#include <string>
#include <string_view>

#include "provtree/model.h"

namespace provtree::detail {

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);

// "12.5", "-3", "1/60", "28/10". Trailing units ("mm", "s", "%", "°C") are ignored.
std::optional<double> parse_real(std::string_view s);

// "4", "f/4", "F4.0", "40/10".
std::optional<double> parse_f_number(std::string_view s);

// Decimal degrees, or degree/minute/second rationals separated by spaces or
// commas ("40/1 42/1 46/1", "40 deg 42' 46.08\""), with an optional trailing
// hemisphere letter. `ref` (N/S/E/W, or the words) applies a sign when given.
std::optional<double> parse_coordinate(std::string_view s, std::string_view ref = {});

std::optional<int> parse_int(std::string_view s);

// "6720x4480".
std::optional<Resolution> parse_resolution(std::string_view s);

// Case-insensitive match against canonical labels plus common EXIF spellings
// ("Auto", "Daylight", "Cloudy weather", "Tungsten", "Fluorescent", "Flash").
std::optional<WhiteBalance> parse_white_balance_loose(std::string_view s);

// Resets the field named by a validation path so the record satisfies its
// invariants again. Unknown paths are ignored.
void clear_field(ImageServiceRecord& record, std::string_view path);

}  // namespace provtree::detail

#endif  // PROVTREE_SRC_VALUE_PARSE_H_
