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

#include <random>

#include <catch2/catch_amalgamated.hpp>

using namespace nahida;
using namespace nahida::http;

namespace {

TraceContext make_ctx(std::uint16_t order) {
  TraceContext ctx;
  ctx.trace_id = TraceId{*Ipv4::parse("10.0.0.1"), 1'700'000'000'000ULL, 7, 0,
                         4242};
  ctx.span_id = generate_span_id(*Ipv4::parse("10.0.0.1"),
                                 *Ipv4::parse("10.0.0.2"), order);
  ctx.parent_span_id = std::nullopt;
  ctx.span_order = order;
  return ctx;
}

}  // namespace

TEST_CASE("classify finds the injection point after the first line") {
  // "GET /index HTTP/1.1" is 19 bytes; CRLF ends at offset 21.
  const auto c = classify("GET /index HTTP/1.1\r\nHost: example\r\n\r\n");
  CHECK(c.kind == MessageKind::Request);
  CHECK(c.injection_offset == 21);

  // "HTTP/1.1 200 OK" is 15 bytes; CRLF ends at offset 17.
  const auto r = classify("HTTP/1.1 200 OK\r\nContent-Length: 0\r\n\r\n");
  CHECK(r.kind == MessageKind::Response);
  CHECK(r.injection_offset == 17);
}

TEST_CASE("classify accepts every supported method") {
  for (const char* m :
       {"GET", "POST", "PUT", "DELETE", "HEAD", "OPTIONS", "PATCH"}) {
    const std::string msg = std::string(m) + " /x HTTP/1.1\r\n\r\n";
    INFO(m);
    CHECK(classify(msg).kind == MessageKind::Request);
  }
}

TEST_CASE("classify rejects near-miss request lines") {
  CHECK(classify("BREW /x HTTP/1.1\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("get /x HTTP/1.1\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET /x\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET /x HTTP/1.1 extra\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET  /x HTTP/1.1\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET /x HTTP/2.0\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET /x HTTP/1.\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("GET  HTTP/1.1\r\n\r\n").kind == MessageKind::NotHttp);
}

TEST_CASE("classify rejects near-miss status lines") {
  CHECK(classify("HTTP/1.1 20\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("HTTP/1.1 2000\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("HTTP/1.1 2O0 OK\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("HTTP/2.0 200 OK\r\n\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("HTTP/1.1\r\n\r\n").kind == MessageKind::NotHttp);
  // Reason phrase is optional.
  CHECK(classify("HTTP/1.0 404\r\n\r\n").kind == MessageKind::Response);
}

TEST_CASE("classify needs a CRLF-terminated first line") {
  CHECK(classify("").kind == MessageKind::NotHttp);
  CHECK(classify("GET /x HTTP/1.1").kind == MessageKind::NotHttp);
  CHECK(classify("\r\nGET /x HTTP/1.1\r\n").kind == MessageKind::NotHttp);
  CHECK(classify("random bytes \x01\x02").kind == MessageKind::NotHttp);
}

TEST_CASE("inject places the header immediately after the first line") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const TraceContext ctx = make_ctx(2);
  const std::string wire = encode_context(ctx);

  const auto out = codec.inject("GET / HTTP/1.1\r\nHost: a\r\n\r\n", ctx);
  REQUIRE(out.has_value());
  CHECK(*out == "GET / HTTP/1.1\r\nx-nahida-ctx: " + wire +
                    "\r\nHost: a\r\n\r\n");
}

TEST_CASE("inject leaves content length untouched") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const std::string msg =
      "POST /svc HTTP/1.1\r\nContent-Length: 64\r\n\r\n" + std::string(64, 'x');
  const auto out = codec.inject(msg, make_ctx(2));
  REQUIRE(out.has_value());
  CHECK(out->find("Content-Length: 64\r\n") != std::string::npos);
  CHECK(out->substr(out->size() - 64) == std::string(64, 'x'));
}

TEST_CASE("inject replaces an existing header value in place") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const TraceContext first = make_ctx(2);
  const TraceContext second = make_ctx(3);

  const std::string base = "GET / HTTP/1.1\r\nHost: a\r\n\r\n";
  const std::string once = *codec.inject(base, first);
  const std::string twice = *codec.inject(once, second);

  CHECK(twice == "GET / HTTP/1.1\r\nx-nahida-ctx: " + encode_context(second) +
                     "\r\nHost: a\r\n\r\n");
  CHECK(twice.find(encode_context(first)) == std::string::npos);
  CHECK(twice.size() == once.size());
}

TEST_CASE("inject refuses non-http payloads") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  CHECK_FALSE(codec.inject("not http at all", make_ctx(2)));
  CHECK(codec.malformed_count() == 0);
}

TEST_CASE("extract returns the injected context") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const TraceContext ctx = make_ctx(5);
  const auto injected = codec.inject("GET /i HTTP/1.1\r\nHost: b\r\n\r\n", ctx);
  REQUIRE(injected.has_value());

  const auto extraction = codec.extract(*injected);
  CHECK(extraction.classification.kind == MessageKind::Request);
  REQUIRE(extraction.context.has_value());
  CHECK(*extraction.context == ctx);
  CHECK(codec.malformed_count() == 0);
}

TEST_CASE("extract matches header names case-insensitively") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const std::string wire = encode_context(make_ctx(5));
  const std::string msg =
      "GET / HTTP/1.1\r\nX-NAHIDA-CTX: " + wire + "\r\n\r\n";
  const auto extraction = codec.extract(msg);
  REQUIRE(extraction.context.has_value());
  CHECK(encode_context(*extraction.context) == wire);
}

TEST_CASE("extract tolerates leading value whitespace") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const std::string wire = encode_context(make_ctx(5));
  const std::string msg =
      "GET / HTTP/1.1\r\nx-nahida-ctx:   \t" + wire + "\r\n\r\n";
  const auto extraction = codec.extract(msg);
  REQUIRE(extraction.context.has_value());
}

TEST_CASE("extract without the header is absent and not an error") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const auto extraction =
      codec.extract("GET / HTTP/1.1\r\nHost: c\r\n\r\n");
  CHECK(extraction.classification.kind == MessageKind::Request);
  CHECK_FALSE(extraction.context.has_value());
  CHECK(codec.malformed_count() == 0);
}

TEST_CASE("extract counts malformed header values") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const std::string wire = encode_context(make_ctx(5));

  std::string short_value = wire.substr(0, 67);
  std::string upper = wire;
  upper[0] = 'A';
  std::string zero_span = wire;
  for (std::size_t i = 32; i < 48; ++i) zero_span[i] = '0';

  std::uint64_t expected = 0;
  for (const std::string& bad : {short_value, upper, zero_span}) {
    const auto extraction =
        codec.extract("GET / HTTP/1.1\r\nx-nahida-ctx: " + bad + "\r\n\r\n");
    CHECK(extraction.classification.kind == MessageKind::Request);
    CHECK_FALSE(extraction.context.has_value());
    CHECK(codec.malformed_count() == ++expected);
  }
}

TEST_CASE("extract does not read past the header block") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const std::string wire = encode_context(make_ctx(5));
  // The header name appearing only in the body must not be parsed.
  const std::string msg =
      "POST / HTTP/1.1\r\nContent-Length: 82\r\n\r\nx-nahida-ctx: " + wire;
  const auto extraction = codec.extract(msg);
  CHECK_FALSE(extraction.context.has_value());
  CHECK(codec.malformed_count() == 0);
}

TEST_CASE("custom header names are honored") {
  const HeaderCodec codec("x-custom-trace");
  const TraceContext ctx = make_ctx(9);
  const auto out = codec.inject("GET / HTTP/1.1\r\n\r\n", ctx);
  REQUIRE(out.has_value());
  CHECK(out->find("x-custom-trace: ") != std::string::npos);
  CHECK(codec.extract(*out).context.has_value());

  const HeaderCodec other{std::string(kDefaultContextHeader)};
  CHECK_FALSE(other.extract(*out).context.has_value());
}

TEST_CASE("responses accept injection mechanically") {
  // Policy (requests only) lives in the engine; the codec itself treats any
  // classified message uniformly.
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  const auto out = codec.inject("HTTP/1.1 200 OK\r\n\r\n", make_ctx(2));
  REQUIRE(out.has_value());
  CHECK(out->rfind("HTTP/1.1 200 OK\r\nx-nahida-ctx: ", 0) == 0);
}

TEST_CASE("randomized inject extract round-trips") {
  const HeaderCodec codec{std::string(kDefaultContextHeader)};
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    TraceContext ctx;
    ctx.trace_id = TraceId{Ipv4{static_cast<std::uint32_t>(rng())},
                           rng() & ((1ULL << 48) - 1),
                           static_cast<std::uint16_t>(rng()),
                           static_cast<std::uint8_t>(rng()),
                           static_cast<std::uint32_t>(rng() & 0xffffff)};
    ctx.span_id = SpanId{static_cast<std::uint32_t>(rng() & 0xffffff),
                         static_cast<std::uint32_t>(rng() & 0xffffff),
                         static_cast<std::uint16_t>(rng() % 0xffff + 1)};
    ctx.span_order = static_cast<std::uint16_t>(rng());
    const std::string body(rng() % 64, 'b');
    const std::string msg = "POST /p HTTP/1.1\r\nContent-Length: " +
                            std::to_string(body.size()) + "\r\n\r\n" + body;
    const auto injected = codec.inject(msg, ctx);
    REQUIRE(injected.has_value());
    const auto back = codec.extract(*injected);
    REQUIRE(back.context.has_value());
    REQUIRE(*back.context == ctx);
  }
  CHECK(codec.malformed_count() == 0);
}
