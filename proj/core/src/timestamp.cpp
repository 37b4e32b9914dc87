// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "poolrank/timestamp.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "poolrank/error.hpp"

namespace poolrank {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view text) {
  if (pos + n > s.size()) throw InputError("truncated timestamp: '" + std::string(text) + "'");
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, v);
  if (ec != std::errc() || ptr != s.data() + pos + n) {
    throw InputError("malformed timestamp: '" + std::string(text) + "'");
  }
  return v;
}

void expect(std::string_view s, std::size_t pos, std::string_view chars, std::string_view text) {
  if (pos >= s.size() || chars.find(s[pos]) == std::string_view::npos) {
    throw InputError("malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const std::string_view s = text;
  const int yr = digits(s, 0, 4, text);
  expect(s, 4, "-", text);
  const int mo = digits(s, 5, 2, text);
  expect(s, 7, "-", text);
  const int dy = digits(s, 8, 2, text);
  expect(s, 10, "Tt ", text);
  const int hh = digits(s, 11, 2, text);
  expect(s, 13, ":", text);
  const int mm = digits(s, 14, 2, text);
  expect(s, 16, ":", text);
  const int ss = digits(s, 17, 2, text);
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  long offset = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = digits(s, pos + 1, 2, text);
    expect(s, pos + 3, ":", text);
    const int om = digits(s, pos + 4, 2, text);
    offset = sign * (oh * 3600L + om * 60L);
    pos += 6;
  } else {
    throw InputError("timestamp lacks a UTC offset: '" + std::string(text) + "'");
  }
  if (pos != s.size()) throw InputError("trailing characters in timestamp: '" + std::string(text) + "'");
  const year_month_day ymd{year{yr}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(dy)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw InputError("invalid calendar timestamp: '" + std::string(text) + "'");
  }
  const auto days_since = sys_days(ymd).time_since_epoch().count();
  return static_cast<Timestamp>(days_since) * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day_count = static_cast<int>((t >= 0 ? t : t - 86399) / 86400);
  const year_month_day ymd{sys_days{days{day_count}}};
  const long secs = static_cast<long>(t - static_cast<Timestamp>(day_count) * 86400);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), secs / 3600,
                (secs / 60) % 60, secs % 60);
  return buf;
}

}  // namespace poolrank
