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

#include "minpace/tick_log.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace {
namespace {

constexpr const char* kCoreFields[] = {"t", "alpha", "I", "cost", "value"};

bool is_core_field(const std::string& key) {
  for (const char* f : kCoreFields) {
    if (key == f) return true;
  }
  return false;
}

}  // namespace

void validate(const TickRecord& r) {
  if (r.t < 1) throw ValidationError(fmt::format("tick index must be >= 1, got {}", r.t));
  if (r.opportunities < 1) {
    throw ValidationError(fmt::format("I must be >= 1, got {}", r.opportunities));
  }
  if (!std::isfinite(r.alpha) || r.alpha < 0.0) {
    throw ValidationError(fmt::format("alpha must be finite and >= 0, got {}", r.alpha));
  }
  if (!std::isfinite(r.cost) || r.cost < 0.0) {
    throw ValidationError(fmt::format("cost must be finite and >= 0, got {}", r.cost));
  }
  if (!std::isfinite(r.value) || r.value < 0.0) {
    throw ValidationError(fmt::format("value must be finite and >= 0, got {}", r.value));
  }
}

nlohmann::json to_json(const TickRecord& r) {
  nlohmann::json j = r.extra.is_object() ? r.extra : nlohmann::json::object();
  j["t"] = r.t;
  j["alpha"] = r.alpha;
  j["I"] = r.opportunities;
  j["cost"] = r.cost;
  j["value"] = r.value;
  return j;
}

TickRecord tick_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("tick record must be a JSON object");
  TickRecord r;
  try {
    r.t = j.at("t").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.opportunities = j.at("I").get<std::int64_t>();
    r.cost = j.at("cost").get<double>();
    r.value = j.at("value").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed tick record: {}", e.what()));
  }
  for (const auto& [key, val] : j.items()) {
    if (!is_core_field(key)) r.extra[key] = val;
  }
  return r;
}

std::vector<TickRecord> read_tick_log(std::istream& in) {
  std::vector<TickRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto record = tick_record_from_json(nlohmann::json::parse(line));
      validate(record);
      records.push_back(std::move(record));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    }
  }
  return records;
}

std::vector<TickRecord> read_tick_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()), 0);
  return read_tick_log(in);
}

void write_tick_log(std::ostream& out, const std::vector<TickRecord>& records) {
  for (const auto& r : records) {
    validate(r);
    out << to_json(r).dump() << '\n';
  }
}

void write_tick_log(const std::filesystem::path& path,
                    const std::vector<TickRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  write_tick_log(out, records);
}

}  // namespace minpace
