// Copyright 2026 the Nahida Authors
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

#include "nahida/report.hpp"

#include <stdexcept>

#include <json.hpp>

namespace nahida {

std::string report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["seed"] = report.seed;
  j["drop_probability"] = report.drop_probability;
  j["requests"] = report.requests;
  j["events_total"] = report.events_total;
  j["events_delivered"] = report.events_delivered;
  j["spans"] = report.spans;
  j["traces"] = report.traces;
  j["complete_traces"] = report.complete_traces;
  j["precision"] = report.precision;
  nlohmann::ordered_json c;
  c["orphan_sends"] = report.counters.orphan_sends;
  c["stray_responses"] = report.counters.stray_responses;
  c["buffer_drops"] = report.counters.buffer_drops;
  c["malformed_contexts"] = report.counters.malformed_contexts;
  c["gated_duplicates"] = report.counters.gated_duplicates;
  c["unknown_parents"] = report.counters.unknown_parents;
  c["unknown_exits"] = report.counters.unknown_exits;
  j["counters"] = std::move(c);
  j["config"] = nlohmann::ordered_json::parse(engine_config_to_json(report.config));
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report is not valid JSON: ") +
                             e.what());
  }
  try {
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.drop_probability = j.at("drop_probability").get<double>();
    r.requests = j.at("requests").get<std::uint64_t>();
    r.events_total = j.at("events_total").get<std::uint64_t>();
    r.events_delivered = j.at("events_delivered").get<std::uint64_t>();
    r.spans = j.at("spans").get<std::uint64_t>();
    r.traces = j.at("traces").get<std::uint64_t>();
    r.complete_traces = j.at("complete_traces").get<std::uint64_t>();
    r.precision = j.at("precision").get<double>();
    const auto& c = j.at("counters");
    r.counters.orphan_sends = c.at("orphan_sends").get<std::uint64_t>();
    r.counters.stray_responses = c.at("stray_responses").get<std::uint64_t>();
    r.counters.buffer_drops = c.at("buffer_drops").get<std::uint64_t>();
    r.counters.malformed_contexts =
        c.at("malformed_contexts").get<std::uint64_t>();
    r.counters.gated_duplicates =
        c.at("gated_duplicates").get<std::uint64_t>();
    r.counters.unknown_parents = c.at("unknown_parents").get<std::uint64_t>();
    r.counters.unknown_exits = c.at("unknown_exits").get<std::uint64_t>();
    if (j.contains("config")) {
      r.config = engine_config_from_json(j.at("config").dump());
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report field has wrong shape: ") +
                             e.what());
  }
}

}  // namespace nahida
