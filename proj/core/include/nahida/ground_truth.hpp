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
#include <memory>
#include <string>
#include <vector>

// Ground truth: what actually happened per end-to-end request, recorded by
// the simulator outside the traced path. The call tree is labeled with
// service names; child order is the issue order of the downstream calls.

namespace nahida {

struct CallNode {
  std::string service;
  std::vector<CallNode> children;
};

struct GroundTruth {
  // Shared by all requests of a run: the workload repeats one shape.
  std::shared_ptr<const CallNode> call_tree;
  // One id per generated end-to-end request, in issue order.
  std::vector<std::uint64_t> request_ids;

  std::size_t request_count() const { return request_ids.size(); }
};

std::size_t call_node_count(const CallNode& node);

// Spans a faithful trace of one request holds: one Server span per node
// plus one Client span per call edge, so 2 * nodes - 1.
std::size_t expected_span_count(const CallNode& node);

// Send/Recv events one request contributes to the stream: the entry edge
// is observed twice (recv request, send response) and every internal call
// edge four times.
std::size_t message_event_count(const CallNode& node);

}  // namespace nahida
