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

#include "nahida/ground_truth.hpp"

namespace nahida {

std::size_t call_node_count(const CallNode& node) {
  std::size_t total = 1;
  for (const CallNode& child : node.children) {
    total += call_node_count(child);
  }
  return total;
}

std::size_t expected_span_count(const CallNode& node) {
  return 2 * call_node_count(node) - 1;
}

std::size_t message_event_count(const CallNode& node) {
  return 2 + 4 * (call_node_count(node) - 1);
}

}  // namespace nahida
