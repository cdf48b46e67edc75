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

#include "nahida/pipeline.hpp"

#include <utility>

namespace nahida {

StreamPipeline::StreamPipeline(EngineConfig config, PipelineOptions options)
    : engine_(std::move(config)), options_(options) {}

void StreamPipeline::feed(const KernelEvent& event) {
  EventOutcome outcome;
  const auto* recv = std::get_if<RecvEvent>(&event.body);
  if (recv != nullptr) {
    auto wired = wire_.find(recv->message_id);
    if (wired != wire_.end()) {
      KernelEvent delivered = event;
      std::get<RecvEvent>(delivered.body).payload = std::move(wired->second);
      wire_.erase(wired);
      outcome = engine_.on_event(delivered);
    } else {
      outcome = engine_.on_event(event);
    }
  } else {
    outcome = engine_.on_event(event);
  }

  if (outcome.payload_out) {
    const auto* send = std::get_if<SendEvent>(&event.body);
    if (send != nullptr) {
      wire_[send->message_id] = std::move(*outcome.payload_out);
      wire_order_.push_back(send->message_id);
      while (wire_.size() > options_.wire_capacity && !wire_order_.empty()) {
        wire_.erase(wire_order_.front());
        wire_order_.pop_front();
      }
    }
  }
  // Spans are collected from the engine ring only; outcome.completed is the
  // caller-facing copy and consuming both would duplicate every span.
  if (++fed_since_drain_ >= options_.drain_interval) drain();
}

void StreamPipeline::drain() {
  fed_since_drain_ = 0;
  for (auto& span : engine_.drain_spans()) spans_.push_back(std::move(span));
}

std::vector<Span> StreamPipeline::finish() {
  drain();
  std::vector<Span> out = std::move(spans_);
  spans_.clear();
  return out;
}

std::vector<Span> run_events(const EngineConfig& config,
                             const std::vector<KernelEvent>& events,
                             PipelineOptions options,
                             EngineCounters* counters_out) {
  StreamPipeline pipeline(config, options);
  for (const auto& event : events) pipeline.feed(event);
  std::vector<Span> spans = pipeline.finish();
  if (counters_out != nullptr) *counters_out = pipeline.engine().counters();
  return spans;
}

}  // namespace nahida
