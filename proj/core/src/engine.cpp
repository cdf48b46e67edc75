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

#include "nahida/engine.hpp"

#include <json.hpp>

namespace nahida {

namespace {
// Periodic housekeeping interval, in events. Sweeps are driven by the event
// count so identical streams always sweep at identical points.
constexpr std::uint64_t kSweepEveryEvents = 65536;
}  // namespace

PropagationEngine::PropagationEngine(EngineConfig config)
    : config_(std::move(config)), codec_(config_.header_name) {}

EventOutcome PropagationEngine::on_event(const KernelEvent& event) {
  if (saw_event_ &&
      (event.timestamp_ns < last_ts_ ||
       (event.timestamp_ns == last_ts_ && event.sequence <= last_seq_))) {
    throw EngineError("kernel event stream went backwards at t=" +
                      std::to_string(event.timestamp_ns) +
                      " seq=" + std::to_string(event.sequence));
  }
  saw_event_ = true;
  last_ts_ = event.timestamp_ns;
  last_seq_ = event.sequence;

  EventOutcome outcome;
  if (const auto* create = std::get_if<ThreadCreateEvent>(&event.body)) {
    registry_.register_thread(create->record);
  } else if (const auto* exit = std::get_if<ThreadExitEvent>(&event.body)) {
    registry_.mark_exit(exit->root_tid);
    if (!contexts_.contains(exit->root_tid)) {
      registry_.collect(exit->root_tid);
    }
  } else if (const auto* send = std::get_if<SendEvent>(&event.body)) {
    outcome = handle_send(event, *send);
  } else if (const auto* recv = std::get_if<RecvEvent>(&event.body)) {
    outcome = handle_recv(event, *recv);
  }

  if (++events_seen_ % kSweepEveryEvents == 0) {
    sweep(event.timestamp_ns);
  }
  return outcome;
}

EventOutcome PropagationEngine::handle_send(const KernelEvent& event,
                                            const SendEvent& m) {
  if (!config_.service_filter.empty() &&
      !config_.service_filter.contains(m.dst_ip)) {
    return {};
  }
  return m.direction == Direction::Request
             ? handle_send_request(event.timestamp_ns, m)
             : handle_send_response(event.timestamp_ns, m);
}

EventOutcome PropagationEngine::handle_recv(const KernelEvent& event,
                                            const RecvEvent& m) {
  if (!config_.service_filter.empty() &&
      !config_.service_filter.contains(m.src_ip)) {
    return {};
  }
  return m.direction == Direction::Request
             ? handle_recv_request(event.timestamp_ns, m)
             : handle_recv_response(event.timestamp_ns, m);
}

EventOutcome PropagationEngine::handle_send_request(std::uint64_t ts,
                                                    const MessageEvent& m) {
  if (http::classify(m.payload).kind != http::MessageKind::Request) {
    return {};
  }

  // Ancestor walk: the serving context may live on this thread or on the
  // thread that forked it (and so on, up to the configured depth).
  const ContextEntry* entry = nullptr;
  ThreadId cursor = m.thread;
  for (std::uint32_t depth = 0;; ++depth) {
    auto it = contexts_.find(cursor);
    if (it != contexts_.end()) {
      if (expired(it->second.created_ns, ts)) {
        ThreadId owner = it->first;
        contexts_.erase(it);
        if (!registry_.is_alive(owner)) registry_.collect(owner);
      } else {
        entry = &it->second;
        break;
      }
    }
    if (depth == config_.walk_depth) break;
    auto parent = registry_.parent_of(cursor);
    if (!parent) break;
    cursor = *parent;
  }

  if (entry == nullptr) {
    ++orphan_sends_;
    return {};  // message leaves unmodified
  }

  std::uint16_t order =
      next_order(entry->ctx.trace_id, ts, entry->ctx.span_order);
  TraceContext child;
  child.trace_id = entry->ctx.trace_id;
  child.span_id = generate_span_id(m.src_ip, m.dst_ip, order);
  child.parent_span_id = entry->ctx.span_id;
  child.span_order = order;

  auto injected = codec_.inject(m.payload, child);

  Span span;
  span.trace_id = child.trace_id;
  span.span_id = child.span_id;
  span.parent_span_id = entry->ctx.span_id;
  span.kind = SpanKind::Client;
  span.local_ip = m.src_ip;
  span.peer_ip = m.dst_ip;
  span.start_ns = ts;
  span.service_name = service_name(m.src_ip);
  open_clients_[{m.thread, m.dst_ip.value}] = std::move(span);

  EventOutcome outcome;
  outcome.payload_out = std::move(injected);
  return outcome;
}

EventOutcome PropagationEngine::handle_recv_request(std::uint64_t ts,
                                                    const MessageEvent& m) {
  auto extraction = codec_.extract(m.payload);
  if (extraction.classification.kind != http::MessageKind::Request) {
    return {};
  }

  auto it = contexts_.find(m.thread);
  if (extraction.context && it != contexts_.end() &&
      !expired(it->second.created_ns, ts) &&
      open_servers_.contains(m.thread) && it->second.origin_src == m.src_ip &&
      it->second.origin_ctx == extraction.context) {
    // First-receive gate: another delivery of a request already being served
    // opens nothing. Sameness is proven by the carried context; a receive
    // without one is always a new request and takes the overwrite path
    // below, even when the previous response send went unobserved.
    ++gated_duplicates_;
    return {};
  }

  TraceId trace;
  std::optional<SpanId> parent;
  std::uint16_t seed_hint = 0;
  if (extraction.context) {
    trace = extraction.context->trace_id;
    parent = extraction.context->span_id;
    seed_hint = extraction.context->span_order;
  } else {
    trace = trace_ids_.generate(m.dst_ip, ts / 1'000'000, m.thread,
                                config_.debug_tag);
  }
  std::uint16_t order = next_order(trace, ts, seed_hint);
  SpanId span_id = generate_span_id(m.src_ip, m.dst_ip, order);

  Span span;
  span.trace_id = trace;
  span.span_id = span_id;
  span.parent_span_id = parent;
  span.kind = SpanKind::Server;
  span.local_ip = m.dst_ip;
  span.peer_ip = m.src_ip;
  span.start_ns = ts;
  span.service_name = service_name(m.dst_ip);
  open_servers_[m.thread] = std::move(span);  // latest request wins

  ContextEntry entry;
  entry.ctx = TraceContext{trace, span_id, parent, order};
  entry.created_ns = ts;
  entry.origin_src = m.src_ip;
  entry.origin_ctx = extraction.context;
  contexts_[m.thread] = std::move(entry);
  return {};
}

EventOutcome PropagationEngine::handle_send_response(std::uint64_t ts,
                                                     const MessageEvent& m) {
  if (http::classify(m.payload).kind != http::MessageKind::Response) {
    return {};
  }
  EventOutcome outcome;
  auto it = open_servers_.find(m.thread);
  if (it == open_servers_.end()) {
    ++stray_responses_;
    return outcome;
  }
  Span span = std::move(it->second);
  open_servers_.erase(it);
  span.end_ns = ts;

  auto entry = contexts_.find(m.thread);
  if (entry != contexts_.end()) {
    // A root context closing means the whole trace is finished; its order
    // counter has no further customers.
    if (!entry->second.ctx.parent_span_id) {
      trace_orders_.erase(entry->second.ctx.trace_id);
    }
    contexts_.erase(entry);
  }
  emit(std::move(span), outcome);
  return outcome;
}

EventOutcome PropagationEngine::handle_recv_response(std::uint64_t ts,
                                                     const MessageEvent& m) {
  if (http::classify(m.payload).kind != http::MessageKind::Response) {
    return {};
  }
  EventOutcome outcome;
  auto it = open_clients_.find({m.thread, m.src_ip.value});
  if (it == open_clients_.end()) {
    ++stray_responses_;
    return outcome;
  }
  Span span = std::move(it->second);
  open_clients_.erase(it);
  span.end_ns = ts;
  emit(std::move(span), outcome);
  return outcome;
}

std::uint16_t PropagationEngine::next_order(const TraceId& trace,
                                            std::uint64_t ts,
                                            std::uint16_t seed_hint) {
  auto [it, inserted] = trace_orders_.try_emplace(trace);
  if (inserted) {
    // First sight of this trace. For a carried context the counter resumes
    // past the highest order the context reports; a fresh trace starts at 1.
    it->second.next = static_cast<std::uint32_t>(seed_hint) + 1;
  }
  std::uint32_t order = it->second.next;
  if (order > kSpanOrderMax) order = 1;  // wrap skips the reserved zero
  it->second.next = order + 1;
  it->second.last_touch_ns = ts;
  return static_cast<std::uint16_t>(order);
}

bool PropagationEngine::expired(std::uint64_t created_ns,
                                std::uint64_t now_ns) const {
  return now_ns - created_ns > config_.context_ttl_ns;
}

std::string PropagationEngine::service_name(Ipv4 address) const {
  auto it = config_.service_names.find(address);
  return it == config_.service_names.end() ? std::string() : it->second;
}

void PropagationEngine::emit(Span span, EventOutcome& outcome) {
  outcome.completed.push_back(span);
  std::lock_guard lock(ring_mutex_);
  ring_.push_back(std::move(span));
  if (ring_.size() > config_.ring_capacity) {
    ring_.pop_front();
    ++buffer_drops_;
  }
}

void PropagationEngine::sweep(std::uint64_t now_ns) {
  for (auto it = contexts_.begin(); it != contexts_.end();) {
    if (expired(it->second.created_ns, now_ns)) {
      ThreadId owner = it->first;
      it = contexts_.erase(it);
      if (!registry_.is_alive(owner)) registry_.collect(owner);
    } else {
      ++it;
    }
  }
  for (auto it = trace_orders_.begin(); it != trace_orders_.end();) {
    if (now_ns - it->second.last_touch_ns > config_.context_ttl_ns) {
      it = trace_orders_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = open_servers_.begin(); it != open_servers_.end();) {
    if (expired(it->second.start_ns, now_ns)) {
      it = open_servers_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = open_clients_.begin(); it != open_clients_.end();) {
    if (expired(it->second.start_ns, now_ns)) {
      it = open_clients_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<Span> PropagationEngine::drain_spans() {
  std::lock_guard lock(ring_mutex_);
  std::vector<Span> out(std::make_move_iterator(ring_.begin()),
                        std::make_move_iterator(ring_.end()));
  ring_.clear();
  return out;
}

void PropagationEngine::set_service_filter(std::set<Ipv4> addresses) {
  config_.service_filter = std::move(addresses);
}

EngineCounters PropagationEngine::counters() const {
  EngineCounters out;
  out.orphan_sends = orphan_sends_;
  out.stray_responses = stray_responses_;
  out.buffer_drops = buffer_drops_;
  out.malformed_contexts = codec_.malformed_count();
  out.gated_duplicates = gated_duplicates_;
  auto registry = registry_.counters();
  out.unknown_parents = registry.unknown_parents;
  out.unknown_exits = registry.unknown_exits;
  return out;
}

bool PropagationEngine::has_context(ThreadId thread) const {
  return contexts_.contains(thread);
}

std::size_t PropagationEngine::open_span_count() const {
  return open_servers_.size() + open_clients_.size();
}

EngineConfig engine_config_from_json(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  EngineConfig config;
  if (doc.contains("header_name")) {
    config.header_name = doc.at("header_name").get<std::string>();
  }
  if (doc.contains("walk_depth")) {
    config.walk_depth = doc.at("walk_depth").get<std::uint32_t>();
  }
  if (doc.contains("ring_capacity")) {
    config.ring_capacity = doc.at("ring_capacity").get<std::size_t>();
  }
  if (doc.contains("context_ttl_ns")) {
    config.context_ttl_ns = doc.at("context_ttl_ns").get<std::uint64_t>();
  }
  if (doc.contains("debug_tag")) {
    config.debug_tag = doc.at("debug_tag").get<std::uint8_t>();
  }
  if (doc.contains("service_filter")) {
    for (const auto& item : doc.at("service_filter")) {
      auto ip = Ipv4::parse(item.get<std::string>());
      if (!ip) throw std::invalid_argument("bad address in service_filter");
      config.service_filter.insert(*ip);
    }
  }
  if (doc.contains("service_names")) {
    for (const auto& [address, name] : doc.at("service_names").items()) {
      auto ip = Ipv4::parse(address);
      if (!ip) throw std::invalid_argument("bad address in service_names");
      config.service_names[*ip] = name.get<std::string>();
    }
  }
  return config;
}

std::string engine_config_to_json(const EngineConfig& config) {
  nlohmann::ordered_json doc;
  doc["header_name"] = config.header_name;
  doc["walk_depth"] = config.walk_depth;
  doc["ring_capacity"] = config.ring_capacity;
  doc["context_ttl_ns"] = config.context_ttl_ns;
  doc["debug_tag"] = config.debug_tag;
  auto filter = nlohmann::ordered_json::array();
  for (const Ipv4& ip : config.service_filter) filter.push_back(ip.to_string());
  doc["service_filter"] = std::move(filter);
  auto names = nlohmann::ordered_json::object();
  for (const auto& [ip, name] : config.service_names) {
    names[ip.to_string()] = name;
  }
  doc["service_names"] = std::move(names);
  return doc.dump();
}

}  // namespace nahida
