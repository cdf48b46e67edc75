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

#include "nahida/events.hpp"

#include <cstdio>

namespace nahida {
namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

void append_message(std::string& out, const char* verb, const MessageEvent& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s tid=%llu %s->%s %s msg=%llu len=%zu payload=%016llx",
                verb, static_cast<unsigned long long>(m.thread),
                m.src_ip.to_string().c_str(), m.dst_ip.to_string().c_str(),
                m.direction == Direction::Request ? "REQ" : "RESP",
                static_cast<unsigned long long>(m.message_id), m.payload.size(),
                static_cast<unsigned long long>(fnv1a(m.payload)));
  out += buf;
}

}  // namespace

std::string to_line(const KernelEvent& event) {
  std::string out;
  char head[64];
  std::snprintf(head, sizeof(head), "t=%llu seq=%llu ",
                static_cast<unsigned long long>(event.timestamp_ns),
                static_cast<unsigned long long>(event.sequence));
  out += head;
  std::visit(
      [&out](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, ThreadCreateEvent>) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "CREATE tid=%llu level=%u parent=",
                        static_cast<unsigned long long>(body.record.root_tid),
                        body.record.level);
          out += buf;
          if (body.record.parent_root_tid) {
            out += std::to_string(*body.record.parent_root_tid);
          } else {
            out += "none";
          }
          out += " ns=[";
          bool first = true;
          for (const NamespaceTid& id : body.record.ns_ids) {
            if (!first) out += ',';
            first = false;
            out += std::to_string(id.ns);
            out += ':';
            out += std::to_string(id.local_tid);
          }
          out += ']';
        } else if constexpr (std::is_same_v<T, ThreadExitEvent>) {
          out += "EXIT tid=";
          out += std::to_string(body.root_tid);
        } else if constexpr (std::is_same_v<T, SendEvent>) {
          append_message(out, "SEND", body);
        } else {
          append_message(out, "RECV", body);
        }
      },
      event.body);
  return out;
}

}  // namespace nahida
