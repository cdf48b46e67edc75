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

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

// Trace identity types and the fixed-width wire codec.
//
// Canonical byte layouts (all fields big-endian, most significant byte
// first):
//
//   TraceId, 16 bytes:
//     [0..3]   host_ip             IPv4 of the entry host
//     [4..9]   entry_timestamp_ms  low 48 bits of unix milliseconds
//     [10..11] sequence            per-generator counter, wraps mod 2^16
//     [12]     debug_tag
//     [13..15] entry_pid_low       low 24 bits of the entry process id
//
//   SpanId, 8 bytes:
//     [0..2]   client_ip_low       low 24 bits of the caller IPv4
//     [3..5]   server_ip_low       low 24 bits of the callee IPv4
//     [6..7]   span_order          per-trace order, real spans start at 1
//
//   Context string, 68 lowercase hex characters:
//     trace_id(32) | span_id(16) | parent_span_id(16) | span_order(4)
//   An all-zero parent_span_id field encodes "no parent" (root context).
//   The all-zero SpanId is reserved and never identifies a real span.

namespace nahida {

// IPv4 address; the first dotted octet occupies the most significant byte.
struct Ipv4 {
  std::uint32_t value = 0;

  static std::optional<Ipv4> parse(std::string_view dotted);
  std::string to_string() const;

  constexpr std::uint32_t low24() const { return value & 0xff'ffff; }

  auto operator<=>(const Ipv4&) const = default;
};

inline constexpr std::uint64_t kTimestampMsMax = (std::uint64_t{1} << 48) - 1;
inline constexpr std::uint32_t kSpanOrderMax = 0xffff;

struct TraceId {
  Ipv4 host_ip;
  std::uint64_t entry_timestamp_ms = 0;  // must fit in 48 bits
  std::uint16_t sequence = 0;
  std::uint8_t debug_tag = 0;
  std::uint32_t entry_pid_low = 0;  // must fit in 24 bits

  static constexpr std::size_t kEncodedBytes = 16;

  std::array<std::uint8_t, kEncodedBytes> bytes() const;
  std::string hex() const;  // 32 lowercase hex characters
  static std::optional<TraceId> from_hex(std::string_view text);

  auto operator<=>(const TraceId&) const = default;
};

struct SpanId {
  std::uint32_t client_ip_low = 0;  // low 24 bits of the caller address
  std::uint32_t server_ip_low = 0;  // low 24 bits of the callee address
  std::uint16_t span_order = 0;

  static constexpr std::size_t kEncodedBytes = 8;

  bool is_zero() const;
  std::string hex() const;  // 16 lowercase hex characters
  static std::optional<SpanId> from_hex(std::string_view text);

  auto operator<=>(const SpanId&) const = default;
};

// In-band trace context. A root context has no parent_span_id; span_id never
// equals parent_span_id and is never the reserved all-zero SpanId.
struct TraceContext {
  TraceId trace_id;
  SpanId span_id;
  std::optional<SpanId> parent_span_id;
  std::uint16_t span_order = 0;

  bool operator==(const TraceContext&) const = default;
};

inline constexpr std::size_t kEncodedContextChars = 68;

// Renders the 68-character lowercase-hex wire form.
std::string encode_context(const TraceContext& ctx);

// Inverse of encode_context on its image. Rejects anything else: wrong
// length, non-hex or uppercase characters, a reserved all-zero span_id, or
// parent_span_id equal to span_id.
std::optional<TraceContext> decode_context(std::string_view text);

// Deterministic SpanId construction from the communicating addresses and the
// span order. Throws std::out_of_range if span_order exceeds 16 bits.
SpanId generate_span_id(Ipv4 client_ip, Ipv4 server_ip, std::uint32_t span_order);

// Mints TraceIds. The sequence counter makes ids from identical arguments
// distinct; it is atomic and wraps modulo 2^16.
class TraceIdGenerator {
 public:
  // Throws std::out_of_range if now_ms does not fit in 48 bits. pid is
  // truncated to its low 24 bits per the TraceId layout.
  TraceId generate(Ipv4 host_ip, std::uint64_t now_ms, std::uint64_t pid,
                   std::uint8_t debug_tag);

 private:
  std::atomic<std::uint16_t> sequence_{0};
};

}  // namespace nahida

template <>
struct std::hash<nahida::TraceId> {
  std::size_t operator()(const nahida::TraceId& id) const noexcept;
};
