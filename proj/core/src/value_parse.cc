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

#include "value_parse.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace provtree::detail {
namespace {

std::optional<double> parse_plain(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "a/b" or a plain number.
std::optional<double> parse_rational(std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain(s);
  auto num = parse_plain(s.substr(0, slash));
  auto den = parse_plain(s.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

std::string_view strip_unit(std::string_view s) {
  s = trim(s);
  size_t end = s.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(s[end - 1])) && s[end - 1] != '.') {
    --end;
  }
  return trim(s.substr(0, end));
}

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (auto v = parse_rational(s)) return v;
  const auto stripped = strip_unit(s);
  if (stripped.empty() || stripped.size() == s.size()) return std::nullopt;
  return parse_rational(stripped);
}

std::optional<double> parse_f_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && (s.front() == 'f' || s.front() == 'F')) {
    s.remove_prefix(1);
    if (!s.empty() && s.front() == '/') s.remove_prefix(1);
  }
  return parse_rational(s);
}

std::optional<double> parse_coordinate(std::string_view s, std::string_view ref) {
  s = trim(s);
  int sign = 1;
  auto apply_ref = [&sign](std::string_view r) -> bool {
    const std::string l = lower(trim(r));
    if (l.empty()) return true;
    if (l == "n" || l == "e" || l == "north" || l == "east") return true;
    if (l == "s" || l == "w" || l == "south" || l == "west") {
      sign = -1;
      return true;
    }
    return false;
  };
  if (!s.empty() && std::isalpha(static_cast<unsigned char>(s.back()))) {
    size_t start = s.size();
    while (start > 0 && std::isalpha(static_cast<unsigned char>(s[start - 1]))) --start;
    const auto word = s.substr(start);
    // "deg" is a unit, not a hemisphere.
    if (lower(word) != "deg") {
      if (!apply_ref(word)) return std::nullopt;
      s = trim(s.substr(0, start));
    }
  }
  if (!ref.empty() && !apply_ref(ref)) return std::nullopt;

  // Split into numeric components, tolerating "deg", ', " markers and commas.
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(cur);
    cur.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '\'' || c == '"') {
      flush();
    } else if (s.substr(i, 3) == "deg") {
      flush();
      i += 2;
    } else {
      cur += c;
    }
  }
  flush();
  if (parts.empty() || parts.size() > 3) return std::nullopt;

  double deg = 0.0;
  const double scale[3] = {1.0, 60.0, 3600.0};
  bool negative = false;
  for (size_t i = 0; i < parts.size(); ++i) {
    auto v = parse_rational(parts[i]);
    if (!v) return std::nullopt;
    if (i == 0 && *v < 0) negative = true;
    if (i > 0 && *v < 0) return std::nullopt;
    deg += std::abs(*v) / scale[i];
  }
  if (negative) deg = -deg;
  return sign * deg;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Resolution> parse_resolution(std::string_view s) {
  s = trim(s);
  const auto x = s.find_first_of("xX");
  if (x == std::string_view::npos) return std::nullopt;
  auto w = parse_int(s.substr(0, x));
  auto h = parse_int(s.substr(x + 1));
  if (!w || !h) return std::nullopt;
  return Resolution{*w, *h};
}

std::optional<WhiteBalance> parse_white_balance_loose(std::string_view s) {
  const std::string l = lower(trim(s));
  if (auto wb = parse_white_balance(l)) return wb;
  if (l.starts_with("auto")) return WhiteBalance::kAuto;
  if (l.starts_with("daylight") || l == "fine weather" || l == "sunny") return WhiteBalance::kDaylight;
  if (l.starts_with("cloudy") || l == "shade") return WhiteBalance::kCloudy;
  if (l.starts_with("tungsten") || l.starts_with("incandescent")) return WhiteBalance::kTungsten;
  if (l.find("fluorescent") != std::string::npos) return WhiteBalance::kFluorescent;
  if (l.starts_with("flash")) return WhiteBalance::kFlash;
  return std::nullopt;
}

}  // namespace provtree::detail
