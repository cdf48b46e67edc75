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
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "nahida/events.hpp"
#include "nahida/http_inband.hpp"
#include "nahida/ids.hpp"
#include "nahida/thread_genealogy.hpp"

// Propagation engine: a single-consumer state machine over a totally ordered
// kernel event stream. It mirrors what an in-kernel tracer plus user-space
// agent would do:
//
//  * recv(request)  opens a Server span. A carried context makes the span a
//    child of the sender's Client span; no context starts a fresh trace
//    whose root Server span has no parent.
//  * send(request)  walks the sender's thread ancestry (self, parent, ...)
//    for the serving context, mints a child context, injects it into the
//    outgoing bytes and opens a Client span whose parent is the serving
//    Server span.
//  * send(response) closes the thread's Server span and evicts its context.
//  * recv(response) closes the Client span matched by (thread, peer).
//
// Span identity: every span id is generate_span_id(caller ip, callee ip,
// order) where order comes from a per-trace counter the engine keeps, so
// ids are unique within a trace (the counter holds "order in the whole
// trace"; it seeds from the carried span_order when the engine first sees a
// trace mid-flight). Completed spans land in a bounded ring buffer drained
// by the caller; overflow drops the oldest span and counts it.

namespace nahida {

struct EngineConfig {
  std::string header_name = std::string(http::kDefaultContextHeader);
  // Ancestor hops examined above the sending thread itself; 0 means the
  // sender's own context only.
  std::uint32_t walk_depth = 32;
  std::size_t ring_capacity = 65536;
  std::uint64_t context_ttl_ns = 60'000'000'000;  // 60 s of simulated time
  std::uint8_t debug_tag = 0;
  // Peer addresses the engine traces. Empty disables filtering; otherwise
  // Send/Recv events whose peer (dst for send, src for recv) is absent from
  // the set are ignored entirely.
  std::set<Ipv4> service_filter;
  // Optional address-to-name map used to label spans.
  std::map<Ipv4, std::string> service_names;

  bool operator==(const EngineConfig&) const = default;
};

// JSON form of the config document; schema documented in the README.
EngineConfig engine_config_from_json(std::string_view text);
std::string engine_config_to_json(const EngineConfig& config);

enum class SpanKind { Client, Server };

struct Span {
  TraceId trace_id;
  SpanId span_id;
  std::optional<SpanId> parent_span_id;
  SpanKind kind = SpanKind::Server;
  Ipv4 local_ip;  // the traced endpoint's own address
  Ipv4 peer_ip;
  std::uint64_t start_ns = 0;
  std::uint64_t end_ns = 0;
  std::string service_name;  // empty when the address has no configured name

  bool operator==(const Span&) const = default;
};

struct EngineCounters {
  std::uint64_t orphan_sends = 0;        // request sends with no ancestor context
  std::uint64_t stray_responses = 0;     // responses with no matching open span
  std::uint64_t buffer_drops = 0;        // ring overflow evictions
  std::uint64_t malformed_contexts = 0;  // undecodable header values seen
  std::uint64_t gated_duplicates = 0;    // re-deliveries absorbed by the
                                         // first-receive gate
  std::uint64_t unknown_parents = 0;     // registrations naming unseen parents
  std::uint64_t unknown_exits = 0;       // exits of unregistered threads

  friend bool operator==(const EngineCounters&, const EngineCounters&) =
      default;
};

struct EventOutcome {
  // Spans completed by this event (also pushed to the ring buffer).
  std::vector<Span> completed;
  // Present for a send(request) the engine injected into: the bytes the
  // wire must deliver to the paired receive.
  std::optional<std::string> payload_out;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PropagationEngine {
 public:
  explicit PropagationEngine(EngineConfig config = {});

  // Consumes the next event. Throws EngineError if (timestamp, sequence)
  // does not advance; the stream contract is strict total order.
  EventOutcome on_event(const KernelEvent& event);

  // Removes and returns buffered spans, oldest first.
  std::vector<Span> drain_spans();

  void set_service_filter(std::set<Ipv4> addresses);

  const EngineConfig& config() const { return config_; }
  EngineCounters counters() const;

  // Inspection hooks for tests and reporting; call from the event thread.
  bool has_context(ThreadId thread) const;
  std::size_t context_count() const { return contexts_.size(); }
  std::size_t open_span_count() const;
  std::size_t trace_order_count() const { return trace_orders_.size(); }
  const ThreadRegistry& registry() const { return registry_; }

 private:
  struct ContextEntry {
    TraceContext ctx;  // span_id is the active Server span of this thread
    std::uint64_t created_ns = 0;
    Ipv4 origin_src;
    std::optional<TraceContext> origin_ctx;  // as carried by the request
  };

  struct OrderSlot {
    std::uint32_t next = 1;
    std::uint64_t last_touch_ns = 0;
  };

  EventOutcome handle_send(const KernelEvent& event, const SendEvent& m);
  EventOutcome handle_recv(const KernelEvent& event, const RecvEvent& m);
  EventOutcome handle_send_request(std::uint64_t ts, const MessageEvent& m);
  EventOutcome handle_send_response(std::uint64_t ts, const MessageEvent& m);
  EventOutcome handle_recv_request(std::uint64_t ts, const MessageEvent& m);
  EventOutcome handle_recv_response(std::uint64_t ts, const MessageEvent& m);

  std::uint16_t next_order(const TraceId& trace, std::uint64_t ts,
                           std::uint16_t seed_hint);
  bool expired(std::uint64_t created_ns, std::uint64_t now_ns) const;
  std::string service_name(Ipv4 address) const;
  void emit(Span span, EventOutcome& outcome);
  void sweep(std::uint64_t now_ns);

  EngineConfig config_;
  http::HeaderCodec codec_;
  ThreadRegistry registry_;
  TraceIdGenerator trace_ids_;

  std::unordered_map<ThreadId, ContextEntry> contexts_;
  std::unordered_map<ThreadId, Span> open_servers_;
  std::map<std::pair<ThreadId, std::uint32_t>, Span> open_clients_;
  std::unordered_map<TraceId, OrderSlot> trace_orders_;

  std::mutex ring_mutex_;
  std::deque<Span> ring_;

  std::uint64_t orphan_sends_ = 0;
  std::uint64_t stray_responses_ = 0;
  std::uint64_t buffer_drops_ = 0;
  std::uint64_t gated_duplicates_ = 0;

  bool saw_event_ = false;
  std::uint64_t last_ts_ = 0;
  std::uint64_t last_seq_ = 0;
  std::uint64_t events_seen_ = 0;
  std::uint64_t last_sweep_ns_ = 0;
};

}  // namespace nahida
