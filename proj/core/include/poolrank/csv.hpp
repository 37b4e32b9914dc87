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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poolrank::csv {

//! A parsed CSV file with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::filesystem::path source;

  //! Column index by name; throws InputError naming the column and file.
  std::size_t require(std::string_view column) const;
  std::optional<std::size_t> find(std::string_view column) const;
};

Table read(const std::filesystem::path& path);
Table parse(std::string_view text, const std::filesystem::path& source = {});

//! Parses a double; empty, "NA" and "nan" map to NaN. Throws InputError
//! with file/line context on garbage.
double to_double(std::string_view field, const Table& table, std::size_t row);
long long to_int(std::string_view field, const Table& table, std::size_t row);

//! Shortest round-trip decimal representation; NaN is written empty.
std::string format_double(double v);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string escape(std::string_view field);

}  // namespace poolrank::csv
