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

#include <cstddef>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "nahida/engine.hpp"

// Couples the propagation engine to a kernel event stream and models the
// in-band wire. When the engine rewrites an outgoing request (the header is
// added or replaced at send time), the rewritten bytes are what actually
// travel; the paired receive must observe them. The pipeline keeps a
// message-id -> rewritten-payload map and substitutes the stored bytes into
// the matching Recv before the engine sees it. A send that was never
// observed (dropped probe) leaves no wire entry, so its receive naturally
// carries the unannotated original payload.

namespace nahida {

struct PipelineOptions {
  // Completed spans are pulled out of the engine ring every this many events,
  // so a bounded ring only overflows when draining is deliberately disabled.
  std::size_t drain_interval = 256;
  // In-flight wire entries beyond this are evicted oldest-first. Entries
  // whose receive was dropped are the only ones that can linger.
  std::size_t wire_capacity = 65536;
};

class StreamPipeline {
 public:
  explicit StreamPipeline(EngineConfig config, PipelineOptions options = {});

  // Feeds one event through wire substitution and the engine.
  void feed(const KernelEvent& event);

  // Drains any remaining spans and returns everything collected; the
  // pipeline is left empty and can keep consuming events.
  std::vector<Span> finish();

  const std::vector<Span>& spans() const { return spans_; }
  PropagationEngine& engine() { return engine_; }
  const PropagationEngine& engine() const { return engine_; }

 private:
  void drain();

  PropagationEngine engine_;
  PipelineOptions options_;
  std::vector<Span> spans_;
  std::unordered_map<std::uint64_t, std::string> wire_;
  std::deque<std::uint64_t> wire_order_;
  std::size_t fed_since_drain_ = 0;
};

// One-shot helper: feeds the whole stream and returns the completed spans.
// counters_out, when non-null, receives the engine's final counters.
std::vector<Span> run_events(const EngineConfig& config,
                             const std::vector<KernelEvent>& events,
                             PipelineOptions options = {},
                             EngineCounters* counters_out = nullptr);

}  // namespace nahida
