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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/timestamp.hpp"

using namespace poolrank;

namespace {

TEST(Csv, ParsesQuotedFieldsAndNames) {
  const auto t = csv::parse("a,b,c\n1,\"x,y\",\"say \"\"hi\"\"\"\r\n2,,NA\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x,y");
  EXPECT_EQ(t.rows[0][2], "say \"hi\"");
  EXPECT_EQ(t.require("c"), 2u);
  EXPECT_FALSE(t.find("d").has_value());
  EXPECT_TRUE(std::isnan(csv::to_double(t.rows[1][1], t, 1)));
  EXPECT_TRUE(std::isnan(csv::to_double(t.rows[1][2], t, 1)));
}

TEST(Csv, MissingColumnErrorNamesIt) {
  const auto t = csv::parse("id,lon\n1,2\n", "stations.csv");
  try {
    t.require("lat");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("lat"), std::string::npos);
  }
}

TEST(Csv, GarbageNumbersReportTheLine) {
  const auto t = csv::parse("v\n1\nabc\n", "f.csv");
  try {
    csv::to_double(t.rows[1][0], t, 1);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
  EXPECT_THROW(csv::to_int("2.5", t, 0), InputError);
}

TEST(Csv, WrongFieldCountIsRejected) { EXPECT_THROW(csv::parse("a,b\n1,2,3\n"), InputError); }

TEST(Csv, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.0}) {
    const auto t = csv::parse("v\n" + csv::format_double(v) + "\n");
    EXPECT_EQ(csv::to_double(t.rows[0][0], t, 0), v);
  }
  EXPECT_EQ(csv::format_double(std::nan("")), "");
}

TEST(Csv, WriterEscapes) {
  std::ostringstream out;
  csv::Writer w(out);
  w.row({"a", "b,c", "d\"e"});
  EXPECT_EQ(out.str(), "a,\"b,c\",\"d\"\"e\"\n");
}

TEST(Timestamp, ParsesOffsetsAndFractions) {
  EXPECT_EQ(parse_rfc3339("1970-01-01T00:00:00Z"), 0);
  EXPECT_EQ(parse_rfc3339("2015-01-01T00:00:00Z"), 1420070400);
  EXPECT_EQ(parse_rfc3339("2015-01-01T01:00:00.75+01:00"), 1420070400);
  EXPECT_EQ(parse_rfc3339("2014-12-31T19:00:00-05:00"), 1420070400);
  EXPECT_EQ(format_rfc3339(1420070400), "2015-01-01T00:00:00Z");
  EXPECT_EQ(parse_rfc3339(format_rfc3339(1456704000)), 1456704000);  // leap day 2016
  EXPECT_THROW(parse_rfc3339("2015-13-01T00:00:00Z"), InputError);
  EXPECT_THROW(parse_rfc3339("yesterday"), InputError);
}

}  // namespace
