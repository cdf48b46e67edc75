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
#include <variant>

#include "nahida/ids.hpp"
#include "nahida/thread_genealogy.hpp"

// Abstract kernel observations driving the propagation engine. A stream is
// totally ordered by (timestamp_ns, sequence); the engine rejects anything
// that goes backwards.
//
// Send and Recv carry the message payload as observed at the syscall
// boundary plus a message_id that pairs a send with the matching receive.
// The id models the network in this artifact: whatever bytes the engine
// hands back at the send side are the bytes the wire delivers, so the
// pipeline substitutes them into the paired Recv before the engine sees it.

namespace nahida {

enum class Direction { Request, Response };

struct ThreadCreateEvent {
  ThreadRecord record;
};

struct ThreadExitEvent {
  ThreadId root_tid = 0;
};

struct MessageEvent {
  ThreadId thread = 0;  // thread performing the syscall
  Ipv4 src_ip;
  Ipv4 dst_ip;
  Direction direction = Direction::Request;
  std::uint64_t message_id = 0;
  std::string payload;
};

struct SendEvent : MessageEvent {};
struct RecvEvent : MessageEvent {};

struct KernelEvent {
  std::uint64_t timestamp_ns = 0;
  std::uint64_t sequence = 0;
  std::variant<ThreadCreateEvent, ThreadExitEvent, SendEvent, RecvEvent> body;
};

// One-line rendering used by golden stream files and diagnostics. Payload
// bytes are folded into a 64-bit FNV-1a digest so the line stays readable
// while remaining sensitive to every payload byte.
std::string to_line(const KernelEvent& event);

}  // namespace nahida
