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

#include "nahida/http_inband.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace nahida::http {
namespace {

constexpr std::string_view kCrlf = "\r\n";

constexpr std::array<std::string_view, 7> kMethods = {
    "GET", "POST", "PUT", "DELETE", "HEAD", "OPTIONS", "PATCH"};

bool is_http1_version(std::string_view token) {
  // Exactly "HTTP/1." followed by one digit.
  return token.size() == 8 && token.substr(0, 7) == "HTTP/1." &&
         token[7] >= '0' && token[7] <= '9';
}

bool is_request_line(std::string_view line) {
  std::size_t sp1 = line.find(' ');
  if (sp1 == std::string_view::npos) return false;
  std::size_t sp2 = line.find(' ', sp1 + 1);
  if (sp2 == std::string_view::npos) return false;
  std::string_view method = line.substr(0, sp1);
  std::string_view target = line.substr(sp1 + 1, sp2 - sp1 - 1);
  std::string_view version = line.substr(sp2 + 1);
  if (target.empty() || version.find(' ') != std::string_view::npos) {
    return false;
  }
  return is_http1_version(version) &&
         std::find(kMethods.begin(), kMethods.end(), method) != kMethods.end();
}

bool is_response_line(std::string_view line) {
  std::size_t sp1 = line.find(' ');
  if (sp1 == std::string_view::npos) return false;
  if (!is_http1_version(line.substr(0, sp1))) return false;
  std::string_view rest = line.substr(sp1 + 1);
  if (rest.size() < 3) return false;
  for (int i = 0; i < 3; ++i) {
    if (rest[static_cast<std::size_t>(i)] < '0' ||
        rest[static_cast<std::size_t>(i)] > '9') {
      return false;
    }
  }
  // A reason phrase, when present, is separated by a space.
  return rest.size() == 3 || rest[3] == ' ';
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  }
  return true;
}

struct HeaderLine {
  std::size_t line_begin = 0;
  std::size_t value_begin = 0;
  std::size_t value_end = 0;  // excludes the CRLF
};

// Scans header lines starting at `offset` (just past the first line) until
// the blank line or end of buffer. Returns the first line whose field name
// matches `name` case-insensitively.
std::optional<HeaderLine> find_header(std::string_view bytes,
                                      std::size_t offset,
                                      std::string_view name) {
  std::size_t pos = offset;
  while (pos < bytes.size()) {
    std::size_t eol = bytes.find(kCrlf, pos);
    std::size_t line_end = (eol == std::string_view::npos) ? bytes.size() : eol;
    std::string_view line = bytes.substr(pos, line_end - pos);
    if (line.empty()) break;  // blank line: end of header block
    std::size_t colon = line.find(':');
    if (colon != std::string_view::npos && iequals(line.substr(0, colon), name)) {
      std::size_t value = colon + 1;
      while (value < line.size() && (line[value] == ' ' || line[value] == '\t')) {
        ++value;
      }
      return HeaderLine{pos, pos + value, pos + line.size()};
    }
    if (eol == std::string_view::npos) break;
    pos = eol + kCrlf.size();
  }
  return std::nullopt;
}

}  // namespace

Classification classify(std::string_view bytes) {
  std::size_t eol = bytes.find(kCrlf);
  if (eol == std::string_view::npos) return {};
  std::string_view line = bytes.substr(0, eol);
  std::size_t offset = eol + kCrlf.size();
  if (is_request_line(line)) return {MessageKind::Request, offset};
  if (is_response_line(line)) return {MessageKind::Response, offset};
  return {};
}

HeaderCodec::HeaderCodec(std::string header_name)
    : header_name_(std::move(header_name)) {}

std::optional<std::string> HeaderCodec::inject(std::string_view bytes,
                                               const TraceContext& ctx) const {
  Classification cls = classify(bytes);
  if (cls.kind == MessageKind::NotHttp) return std::nullopt;
  std::string value = encode_context(ctx);
  std::string out;
  if (auto existing = find_header(bytes, cls.injection_offset, header_name_)) {
    out.reserve(bytes.size() - (existing->value_end - existing->value_begin) +
                value.size());
    out.append(bytes.substr(0, existing->value_begin));
    out.append(value);
    out.append(bytes.substr(existing->value_end));
    return out;
  }
  out.reserve(bytes.size() + header_name_.size() + 2 + value.size() + 2);
  out.append(bytes.substr(0, cls.injection_offset));
  out.append(header_name_);
  out.append(": ");
  out.append(value);
  out.append(kCrlf);
  out.append(bytes.substr(cls.injection_offset));
  return out;
}

HeaderCodec::Extraction HeaderCodec::extract(std::string_view bytes) const {
  Extraction result;
  result.classification = classify(bytes);
  if (result.classification.kind == MessageKind::NotHttp) return result;
  auto line = find_header(bytes, result.classification.injection_offset,
                          header_name_);
  if (!line) return result;
  std::string_view value =
      bytes.substr(line->value_begin, line->value_end - line->value_begin);
  result.context = decode_context(value);
  if (!result.context) {
    malformed_count_.fetch_add(1, std::memory_order_relaxed);
  }
  return result;
}

}  // namespace nahida::http
