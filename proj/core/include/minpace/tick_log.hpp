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

// Logged per-tick observations and their JSONL representation.
//
// One JSON object per line with at least the fields t, alpha, I, cost and
// value. Any other fields on a line are carried through a read/write cycle
// unchanged.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

namespace minpace {

struct TickRecord {
  int t = 1;                    ///< 1-based tick index
  double alpha = 0.0;           ///< executed multiplier
  std::int64_t opportunities = 1;  ///< I_k
  double cost = 0.0;            ///< Cost_k
  double value = 0.0;           ///< Val_k
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// Throws ValidationError when I < 1, cost or value negative, or fields are
/// not finite.
void validate(const TickRecord& record);

nlohmann::json to_json(const TickRecord& record);
/// Throws ValidationError on missing or mistyped fields.
TickRecord tick_record_from_json(const nlohmann::json& j);

/// Reads JSONL. Blank lines are skipped; an empty stream yields no records.
/// Throws ParseError carrying the 1-based line number of the first bad line.
std::vector<TickRecord> read_tick_log(std::istream& in);
std::vector<TickRecord> read_tick_log(const std::filesystem::path& path);

void write_tick_log(std::ostream& out, const std::vector<TickRecord>& records);
void write_tick_log(const std::filesystem::path& path,
                    const std::vector<TickRecord>& records);

}  // namespace minpace
