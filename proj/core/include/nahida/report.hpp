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

#pragma once

#include <cstdint>
#include <string>

#include "nahida/engine.hpp"

// Machine-readable summary of one pipeline run, emitted by the CLI next to
// the trace export. The JSON field order is fixed so identical runs produce
// byte-identical reports.

namespace nahida {

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  double drop_probability = 0.0;
  std::uint64_t requests = 0;        // ground-truth requests issued
  std::uint64_t events_total = 0;    // events the simulator produced
  std::uint64_t events_delivered = 0;  // events fed after fault deletion
  std::uint64_t spans = 0;
  std::uint64_t traces = 0;          // assembled trace trees
  std::uint64_t complete_traces = 0;
  double precision = 0.0;
  EngineCounters counters;
  EngineConfig config;  // engine configuration echo

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);  // throws std::runtime_error

}  // namespace nahida
