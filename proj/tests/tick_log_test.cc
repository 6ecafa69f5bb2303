// Copyright 2026 The minpace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "minpace/errors.hpp"
#include "minpace/tick_log.hpp"

namespace {

using namespace minpace;

std::vector<TickRecord> random_records(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TickRecord> out;
  for (int i = 0; i < n; ++i) {
    TickRecord r;
    r.t = 1 + i % 48;
    r.alpha = 0.01 + 3.0 * u(rng);
    r.opportunities = 1 + static_cast<std::int64_t>(5000 * u(rng));
    r.cost = 1e3 * u(rng);
    r.value = 50 * u(rng);
    if (i % 7 == 0) r.extra["campaign"] = "c" + std::to_string(i);
    out.push_back(r);
  }
  return out;
}

TEST(TickLog, RoundTripIsExact) {
  const auto records = random_records(1000, 17);
  std::stringstream ss;
  write_tick_log(ss, records);
  const auto back = read_tick_log(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(back[i], records[i]) << i;
}

TEST(TickLog, EmptyStreamGivesNoRecords) {
  std::istringstream in("");
  EXPECT_TRUE(read_tick_log(in).empty());
  std::istringstream blanks("\n\n");
  EXPECT_TRUE(read_tick_log(blanks).empty());
}

TEST(TickLog, BadLineReportsLineNumber) {
  std::istringstream in(
      "{\"t\":1,\"alpha\":0.5,\"I\":10,\"cost\":1.0,\"value\":0.5}\n"
      "{\"t\":2,\"alpha\":0.5,\"I\":0,\"cost\":1.0,\"value\":0.5}\n");
  try {
    read_tick_log(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream garbage("{\"t\":1,\"alpha\":0.5,\"I\":10,\"cost\":1.0,\"value\":0.5}\nnot json\n");
  try {
    read_tick_log(garbage);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(TickLog, ExtraKeysSurvive) {
  std::istringstream in(
      "{\"t\":3,\"alpha\":1.25,\"I\":42,\"cost\":7.5,\"value\":2,\"note\":\"x\",\"k\":[1,2]}\n");
  const auto recs = read_tick_log(in);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].extra["note"], "x");
  std::ostringstream out;
  write_tick_log(out, recs);
  std::istringstream again(out.str());
  EXPECT_EQ(read_tick_log(again), recs);
}

TEST(TickRecord, Validation) {
  TickRecord r;
  r.cost = -1;
  EXPECT_THROW(validate(r), ValidationError);
  EXPECT_THROW(tick_record_from_json(nlohmann::json::array()), ValidationError);
  EXPECT_THROW(tick_record_from_json({{"t", 1}, {"alpha", 0.5}}), ValidationError);
}

}  // namespace
