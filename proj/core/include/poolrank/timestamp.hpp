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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace poolrank {

//! Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

//! Parses an RFC 3339 timestamp ("2015-03-01T08:00:00Z",
//! "2015-03-01T09:00:00.5+01:00"). Fractional seconds are truncated.
//! Throws InputError on malformed input.
Timestamp parse_rfc3339(std::string_view text);

//! Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp t);

constexpr double seconds_to_hours(std::int64_t s) { return static_cast<double>(s) / 3600.0; }

}  // namespace poolrank
