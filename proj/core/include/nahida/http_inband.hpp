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

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nahida/ids.hpp"

// HTTP/1.x in-band context transport.
//
// Classification reads at most the first line (up to the first 0x0d 0x0a
// pair) of a message. A Request first line is `<METHOD> <target> HTTP/1.x`
// with METHOD one of GET POST PUT DELETE HEAD OPTIONS PATCH; a Response
// first line starts `HTTP/1.x <3-digit status>`. Everything else, including
// messages with no complete first line, is NotHttp.
//
// Injection splices one header line immediately after the first CRLF:
//
//   <header-name>: <68 lowercase hex chars>\r\n
//
// Content-Length is deliberately left untouched; the header line is
// transport metadata added and removed below the application.

namespace nahida::http {

enum class MessageKind { Request, Response, NotHttp };

struct Classification {
  MessageKind kind = MessageKind::NotHttp;
  // Byte index immediately after the first CRLF; 0 when NotHttp.
  std::size_t injection_offset = 0;

  bool operator==(const Classification&) const = default;
};

Classification classify(std::string_view bytes);

inline constexpr std::string_view kDefaultContextHeader = "x-nahida-ctx";

// Injects and extracts the context header. Stateless apart from the
// malformed-value diagnostic counter, which is atomic; one codec instance
// may serve concurrent extract calls.
class HeaderCodec {
 public:
  explicit HeaderCodec(std::string header_name = std::string(kDefaultContextHeader));

  const std::string& header_name() const { return header_name_; }

  // Returns the message with the context header spliced in, or std::nullopt
  // for NotHttp input (the caller keeps the original bytes). If the header
  // is already present its value is replaced in place; the output carries
  // exactly one context header.
  std::optional<std::string> inject(std::string_view bytes,
                                    const TraceContext& ctx) const;

  struct Extraction {
    std::optional<TraceContext> context;
    Classification classification;
  };

  // Read-only scan of the header block. A present but undecodable value
  // yields an absent context and bumps malformed_count.
  Extraction extract(std::string_view bytes) const;

  std::uint64_t malformed_count() const {
    return malformed_count_.load(std::memory_order_relaxed);
  }

 private:
  std::string header_name_;
  mutable std::atomic<std::uint64_t> malformed_count_{0};
};

}  // namespace nahida::http
