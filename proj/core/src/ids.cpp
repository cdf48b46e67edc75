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

#include "nahida/ids.hpp"

#include <cstdio>
#include <stdexcept>

namespace nahida {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

// Appends `width_bytes` big-endian bytes of `value` as lowercase hex.
void append_hex(std::string& out, std::uint64_t value, int width_bytes) {
  for (int byte = width_bytes - 1; byte >= 0; --byte) {
    const auto octet = static_cast<std::uint8_t>(value >> (byte * 8));
    out.push_back(kHexDigits[octet >> 4]);
    out.push_back(kHexDigits[octet & 0xf]);
  }
}

// Parses exactly `text.size()/2` big-endian bytes of lowercase hex.
// Returns false on any character outside [0-9a-f].
bool parse_hex(std::string_view text, std::uint64_t& out) {
  out = 0;
  for (char c : text) {
    std::uint64_t nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      return false;
    }
    out = (out << 4) | nibble;
  }
  return true;
}

}  // namespace

std::optional<Ipv4> Ipv4::parse(std::string_view dotted) {
  std::uint32_t value = 0;
  int octets = 0;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    std::size_t dot = dotted.find('.', pos);
    std::string_view part = dotted.substr(pos, dot == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : dot - pos);
    if (part.empty() || part.size() > 3) return std::nullopt;
    std::uint32_t octet = 0;
    for (char c : part) {
      if (c < '0' || c > '9') return std::nullopt;
      octet = octet * 10 + static_cast<std::uint32_t>(c - '0');
    }
    if (octet > 255) return std::nullopt;
    value = (value << 8) | octet;
    ++octets;
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
    if (pos == dotted.size()) return std::nullopt;  // trailing dot
  }
  if (octets != 4) return std::nullopt;
  return Ipv4{value};
}

std::string Ipv4::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (value >> 24) & 0xff,
                (value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff);
  return buf;
}

std::array<std::uint8_t, TraceId::kEncodedBytes> TraceId::bytes() const {
  std::array<std::uint8_t, kEncodedBytes> out{};
  auto put = [&out](std::size_t at, std::uint64_t value, int width_bytes) {
    for (int i = 0; i < width_bytes; ++i) {
      out[at + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(value >> ((width_bytes - 1 - i) * 8));
    }
  };
  put(0, host_ip.value, 4);
  put(4, entry_timestamp_ms & kTimestampMsMax, 6);
  put(10, sequence, 2);
  put(12, debug_tag, 1);
  put(13, entry_pid_low & 0xff'ffff, 3);
  return out;
}

std::string TraceId::hex() const {
  std::string out;
  out.reserve(kEncodedBytes * 2);
  append_hex(out, host_ip.value, 4);
  append_hex(out, entry_timestamp_ms & kTimestampMsMax, 6);
  append_hex(out, sequence, 2);
  append_hex(out, debug_tag, 1);
  append_hex(out, entry_pid_low & 0xff'ffff, 3);
  return out;
}

std::optional<TraceId> TraceId::from_hex(std::string_view text) {
  if (text.size() != kEncodedBytes * 2) return std::nullopt;
  std::uint64_t ip = 0, ts = 0, seq = 0, tag = 0, pid = 0;
  if (!parse_hex(text.substr(0, 8), ip) || !parse_hex(text.substr(8, 12), ts) ||
      !parse_hex(text.substr(20, 4), seq) ||
      !parse_hex(text.substr(24, 2), tag) ||
      !parse_hex(text.substr(26, 6), pid)) {
    return std::nullopt;
  }
  TraceId id;
  id.host_ip = Ipv4{static_cast<std::uint32_t>(ip)};
  id.entry_timestamp_ms = ts;
  id.sequence = static_cast<std::uint16_t>(seq);
  id.debug_tag = static_cast<std::uint8_t>(tag);
  id.entry_pid_low = static_cast<std::uint32_t>(pid);
  return id;
}

bool SpanId::is_zero() const {
  return client_ip_low == 0 && server_ip_low == 0 && span_order == 0;
}

std::string SpanId::hex() const {
  std::string out;
  out.reserve(kEncodedBytes * 2);
  append_hex(out, client_ip_low & 0xff'ffff, 3);
  append_hex(out, server_ip_low & 0xff'ffff, 3);
  append_hex(out, span_order, 2);
  return out;
}

std::optional<SpanId> SpanId::from_hex(std::string_view text) {
  if (text.size() != kEncodedBytes * 2) return std::nullopt;
  std::uint64_t client = 0, server = 0, order = 0;
  if (!parse_hex(text.substr(0, 6), client) ||
      !parse_hex(text.substr(6, 6), server) ||
      !parse_hex(text.substr(12, 4), order)) {
    return std::nullopt;
  }
  return SpanId{static_cast<std::uint32_t>(client),
                static_cast<std::uint32_t>(server),
                static_cast<std::uint16_t>(order)};
}

std::string encode_context(const TraceContext& ctx) {
  std::string out;
  out.reserve(kEncodedContextChars);
  out += ctx.trace_id.hex();
  out += ctx.span_id.hex();
  out += ctx.parent_span_id.value_or(SpanId{}).hex();
  append_hex(out, ctx.span_order, 2);
  return out;
}

std::optional<TraceContext> decode_context(std::string_view text) {
  if (text.size() != kEncodedContextChars) return std::nullopt;
  auto trace = TraceId::from_hex(text.substr(0, 32));
  auto span = SpanId::from_hex(text.substr(32, 16));
  auto parent = SpanId::from_hex(text.substr(48, 16));
  std::uint64_t order = 0;
  if (!trace || !span || !parent || !parse_hex(text.substr(64, 4), order)) {
    return std::nullopt;
  }
  if (span->is_zero()) return std::nullopt;  // reserved
  TraceContext ctx;
  ctx.trace_id = *trace;
  ctx.span_id = *span;
  if (!parent->is_zero()) {
    if (*parent == *span) return std::nullopt;
    ctx.parent_span_id = *parent;
  }
  ctx.span_order = static_cast<std::uint16_t>(order);
  return ctx;
}

SpanId generate_span_id(Ipv4 client_ip, Ipv4 server_ip,
                        std::uint32_t span_order) {
  if (span_order > kSpanOrderMax) {
    throw std::out_of_range("span_order exceeds 16 bits");
  }
  return SpanId{client_ip.low24(), server_ip.low24(),
                static_cast<std::uint16_t>(span_order)};
}

TraceId TraceIdGenerator::generate(Ipv4 host_ip, std::uint64_t now_ms,
                                   std::uint64_t pid, std::uint8_t debug_tag) {
  if (now_ms > kTimestampMsMax) {
    throw std::out_of_range("entry timestamp exceeds 48 bits");
  }
  TraceId id;
  id.host_ip = host_ip;
  id.entry_timestamp_ms = now_ms;
  id.sequence = static_cast<std::uint16_t>(
      sequence_.fetch_add(1, std::memory_order_relaxed) + 1);
  id.debug_tag = debug_tag;
  id.entry_pid_low = static_cast<std::uint32_t>(pid & 0xff'ffff);
  return id;
}

}  // namespace nahida

std::size_t std::hash<nahida::TraceId>::operator()(
    const nahida::TraceId& id) const noexcept {
  // FNV-1a over the encoded bytes.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : id.bytes()) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}
