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

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "nahida/ground_truth.hpp"
#include "nahida/ids.hpp"
#include "nahida/trace_export.hpp"

namespace nahida {
namespace {

const Ipv4 kUser{0x0aff0001};      // 10.255.0.1
const Ipv4 kFrontend{0x0a010001};  // 10.1.0.1
const Ipv4 kMiddle{0x0a010002};    // 10.1.0.2
const Ipv4 kBackend{0x0a010003};   // 10.1.0.3

TraceId trace_with_sequence(std::uint16_t sequence) {
  TraceId id;
  id.host_ip = kFrontend;
  id.entry_timestamp_ms = 0;
  id.sequence = sequence;
  id.debug_tag = 0;
  id.entry_pid_low = 42;
  return id;
}

Span make_span(TraceId trace, SpanId id, std::optional<SpanId> parent,
               SpanKind kind, Ipv4 local, std::string service,
               std::uint64_t start, std::uint64_t end) {
  Span span;
  span.trace_id = trace;
  span.span_id = id;
  span.parent_span_id = parent;
  span.kind = kind;
  span.local_ip = local;
  span.start_ns = start;
  span.end_ns = end;
  span.service_name = std::move(service);
  return span;
}

// The five spans of one frontend -> middle -> backend request, the way the
// propagation engine emits them: one Server span per service plus one Client
// span per call, each parented on the span that caused it.
std::vector<Span> chain_spans(TraceId trace) {
  const SpanId root = generate_span_id(kUser, kFrontend, 1);
  const SpanId fe_client = generate_span_id(kFrontend, kMiddle, 2);
  const SpanId mid_server = generate_span_id(kFrontend, kMiddle, 3);
  const SpanId mid_client = generate_span_id(kMiddle, kBackend, 4);
  const SpanId be_server = generate_span_id(kMiddle, kBackend, 5);
  return {
      make_span(trace, root, std::nullopt, SpanKind::Server, kFrontend,
                "frontend", 100, 900),
      make_span(trace, fe_client, root, SpanKind::Client, kFrontend,
                "frontend", 200, 800),
      make_span(trace, mid_server, fe_client, SpanKind::Server, kMiddle,
                "middle", 250, 750),
      make_span(trace, mid_client, mid_server, SpanKind::Client, kMiddle,
                "middle", 300, 700),
      make_span(trace, be_server, mid_client, SpanKind::Server, kBackend,
                "backend", 350, 650),
  };
}

CallNode chain_call_tree() {
  CallNode backend{"backend", {}};
  CallNode middle{"middle", {backend}};
  return CallNode{"frontend", {middle}};
}

constexpr const char* kChainShape =
    "frontend|SERVER(frontend|CLIENT(middle|SERVER(middle|CLIENT(backend|"
    "SERVER()))))";

}  // namespace

TEST_CASE("a full client/server chain assembles into one complete tree") {
  std::vector<Span> spans = chain_spans(trace_with_sequence(1));
  std::mt19937_64 rng(7);
  std::shuffle(spans.begin(), spans.end(), rng);

  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 1);
  const TraceTree& tree = trees.front();

  CHECK(tree.complete);
  CHECK_FALSE(tree.missing_parent);
  CHECK_FALSE(tree.missing_pair);
  CHECK_FALSE(tree.multiple_roots);
  CHECK_FALSE(tree.unreachable_spans);
  CHECK_FALSE(tree.duplicate_span_id);

  // Spans come back ordered by start time regardless of input order.
  REQUIRE(tree.spans.size() == 5);
  CHECK(tree.spans[0].start_ns == 100);
  CHECK(tree.spans[1].start_ns == 200);
  CHECK(tree.spans[2].start_ns == 250);
  CHECK(tree.spans[3].start_ns == 300);
  CHECK(tree.spans[4].start_ns == 350);

  REQUIRE(tree.root.has_value());
  CHECK(*tree.root == 0);
  REQUIRE(tree.parent[1].has_value());
  CHECK(*tree.parent[1] == 0);
  REQUIRE(tree.parent[4].has_value());
  CHECK(*tree.parent[4] == 3);
  CHECK(tree.children[0] == std::vector<std::size_t>{1});
  CHECK(tree.children[4].empty());
}

TEST_CASE("canonical shape is frozen and matches the call-tree rendering") {
  std::vector<TraceTree> trees = assemble(chain_spans(trace_with_sequence(1)));
  REQUIRE(trees.size() == 1);
  CHECK(canonical_shape(trees.front()) == kChainShape);
  CHECK(expected_span_shape(chain_call_tree()) == kChainShape);
}

TEST_CASE("assembly is a pure function of the span multiset") {
  std::vector<Span> forward = chain_spans(trace_with_sequence(1));
  std::vector<Span> backward = forward;
  std::reverse(backward.begin(), backward.end());

  std::vector<TraceTree> a = assemble(forward);
  std::vector<TraceTree> b = assemble(backward);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a.front().spans == b.front().spans);
  CHECK(canonical_shape(a.front()) == canonical_shape(b.front()));
}

TEST_CASE("a dangling parent reference is flagged, never guessed at") {
  std::vector<Span> spans = chain_spans(trace_with_sequence(1));
  spans.erase(spans.begin() + 2);  // drop the middle Server span

  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 1);
  const TraceTree& tree = trees.front();
  CHECK_FALSE(tree.complete);
  CHECK(tree.missing_parent);
  // The middle Client span and everything below it are cut off from the
  // root, and the frontend Client span lost its Server child.
  CHECK(tree.unreachable_spans);
  CHECK(tree.missing_pair);
  CHECK_FALSE(tree.multiple_roots);
  REQUIRE(tree.root.has_value());
}

TEST_CASE("zero or several parentless spans both count as a root defect") {
  TraceId trace = trace_with_sequence(1);

  SECTION("two roots") {
    std::vector<Span> spans = chain_spans(trace);
    Span extra = make_span(trace, generate_span_id(kUser, kFrontend, 9),
                           std::nullopt, SpanKind::Server, kFrontend,
                           "frontend", 110, 890);
    spans.push_back(extra);
    std::vector<TraceTree> trees = assemble(spans);
    REQUIRE(trees.size() == 1);
    CHECK(trees.front().multiple_roots);
    CHECK_FALSE(trees.front().root.has_value());
    CHECK_FALSE(trees.front().complete);
  }

  SECTION("no root at all") {
    const SpanId a = generate_span_id(kFrontend, kMiddle, 1);
    const SpanId b = generate_span_id(kFrontend, kMiddle, 2);
    std::vector<Span> spans = {
        make_span(trace, a, b, SpanKind::Client, kFrontend, "frontend", 100,
                  200),
        make_span(trace, b, a, SpanKind::Server, kMiddle, "middle", 110, 190),
    };
    std::vector<TraceTree> trees = assemble(spans);
    REQUIRE(trees.size() == 1);
    CHECK(trees.front().multiple_roots);
    CHECK_FALSE(trees.front().root.has_value());
    CHECK_FALSE(trees.front().complete);
    CHECK(canonical_shape(trees.front()).empty());
  }
}

TEST_CASE("duplicate span ids within a trace are flagged") {
  std::vector<Span> spans = chain_spans(trace_with_sequence(1));
  Span dup = spans[2];
  dup.start_ns += 1;
  spans.push_back(dup);

  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 1);
  CHECK(trees.front().duplicate_span_id);
  CHECK_FALSE(trees.front().complete);
}

TEST_CASE("a client span with no server counterpart breaks completeness") {
  std::vector<Span> spans = chain_spans(trace_with_sequence(1));
  spans.pop_back();  // drop the backend Server span

  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 1);
  const TraceTree& tree = trees.front();
  CHECK(tree.missing_pair);
  CHECK_FALSE(tree.complete);
  // Everything else about the tree is still sound.
  CHECK_FALSE(tree.missing_parent);
  CHECK_FALSE(tree.multiple_roots);
  CHECK_FALSE(tree.unreachable_spans);
}

TEST_CASE("impossible parent-edge kinds are flagged as a broken pair") {
  TraceId trace = trace_with_sequence(1);
  const SpanId root = generate_span_id(kUser, kFrontend, 1);
  const SpanId child = generate_span_id(kFrontend, kMiddle, 2);
  // A Server span hanging directly off another Server span skips the Client
  // half of the call.
  std::vector<Span> spans = {
      make_span(trace, root, std::nullopt, SpanKind::Server, kFrontend,
                "frontend", 100, 900),
      make_span(trace, child, root, SpanKind::Server, kMiddle, "middle", 200,
                800),
  };
  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 1);
  CHECK(trees.front().missing_pair);
  CHECK_FALSE(trees.front().complete);
}

TEST_CASE("trees are ordered by earliest span start") {
  TraceId early = trace_with_sequence(1);
  TraceId late = trace_with_sequence(2);
  std::vector<Span> spans = chain_spans(late);
  for (Span& span : spans) {
    span.start_ns += 10'000;
    span.end_ns += 10'000;
  }
  std::vector<Span> first = chain_spans(early);
  spans.insert(spans.end(), first.begin(), first.end());

  std::vector<TraceTree> trees = assemble(spans);
  REQUIRE(trees.size() == 2);
  CHECK(trees[0].trace_id == early);
  CHECK(trees[1].trace_id == late);
  CHECK(trees[0].spans.front().start_ns == 100);
  CHECK(trees[1].spans.front().start_ns == 10'100);
}

TEST_CASE("export emits one frozen document per trace") {
  TraceId trace = trace_with_sequence(1);
  REQUIRE(trace.hex() == "0a01000100000000000000010000002a");
  const SpanId root = generate_span_id(kUser, kFrontend, 1);
  REQUIRE(root.hex() == "ff00010100010001");
  const SpanId child = generate_span_id(kFrontend, kMiddle, 2);
  REQUIRE(child.hex() == "0100010100020002");

  std::vector<Span> spans = {
      make_span(trace, root, std::nullopt, SpanKind::Server, kFrontend,
                "frontend", 100, 900),
      make_span(trace, child, root, SpanKind::Client, kFrontend, "frontend",
                200, 800),
  };
  std::ostringstream out;
  export_otel(assemble(spans), out);

  // Root spans omit parentSpanId; all other fields appear in fixed order.
  CHECK(out.str() ==
        "{\"traceId\":\"0a01000100000000000000010000002a\",\"spans\":["
        "{\"traceId\":\"0a01000100000000000000010000002a\","
        "\"spanId\":\"ff00010100010001\","
        "\"name\":\"frontend SERVER\",\"kind\":\"SERVER\","
        "\"startTimeUnixNano\":100,\"endTimeUnixNano\":900},"
        "{\"traceId\":\"0a01000100000000000000010000002a\","
        "\"spanId\":\"0100010100020002\","
        "\"parentSpanId\":\"ff00010100010001\","
        "\"name\":\"frontend CLIENT\",\"kind\":\"CLIENT\","
        "\"startTimeUnixNano\":200,\"endTimeUnixNano\":800}]}\n");
}

TEST_CASE("exported traces re-parse and re-assemble to the identical tree") {
  std::vector<Span> spans = chain_spans(trace_with_sequence(1));
  std::vector<TraceTree> trees = assemble(spans);

  std::ostringstream out;
  export_otel(trees, out);
  std::istringstream in(out.str());
  std::vector<Span> parsed = import_otel(in);

  REQUIRE(parsed.size() == spans.size());
  std::vector<TraceTree> again = assemble(parsed);
  REQUIRE(again.size() == 1);
  CHECK(again.front().complete);
  CHECK(canonical_shape(again.front()) == kChainShape);

  // Identity, kind, timing and service name all survive the roundtrip;
  // endpoint addresses are not part of the schema and come back unset.
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const Span& original = trees.front().spans[i];
    const Span& back = again.front().spans[i];
    CHECK(back.trace_id == original.trace_id);
    CHECK(back.span_id == original.span_id);
    CHECK(back.parent_span_id == original.parent_span_id);
    CHECK(back.kind == original.kind);
    CHECK(back.start_ns == original.start_ns);
    CHECK(back.end_ns == original.end_ns);
    CHECK(back.service_name == original.service_name);
    CHECK(back.local_ip == Ipv4{});
  }

  // Because the schema is self-contained, a second export is byte-identical.
  std::ostringstream second;
  export_otel(again, second);
  CHECK(second.str() == out.str());
}

TEST_CASE("import rejects documents with malformed span identities") {
  std::istringstream in(
      "{\"traceId\":\"zz\",\"spans\":[{\"traceId\":\"zz\",\"spanId\":\"00\","
      "\"name\":\"x SERVER\",\"kind\":\"SERVER\",\"startTimeUnixNano\":1,"
      "\"endTimeUnixNano\":2}]}\n");
  CHECK_THROWS(import_otel(in));
}

TEST_CASE("precision counts matching complete trees against ground truth") {
  GroundTruth truth;
  truth.call_tree = std::make_shared<const CallNode>(chain_call_tree());
  truth.request_ids = {0, 1};

  SECTION("all requests recovered") {
    std::vector<Span> spans = chain_spans(trace_with_sequence(1));
    std::vector<Span> more = chain_spans(trace_with_sequence(2));
    spans.insert(spans.end(), more.begin(), more.end());
    CHECK(precision(assemble(spans), truth) == 1.0);
  }

  SECTION("incomplete trees never match") {
    std::vector<Span> spans = chain_spans(trace_with_sequence(1));
    std::vector<Span> broken = chain_spans(trace_with_sequence(2));
    broken.pop_back();
    spans.insert(spans.end(), broken.begin(), broken.end());
    CHECK(precision(assemble(spans), truth) == 0.5);
  }

  SECTION("complete trees of the wrong shape never match") {
    TraceId trace = trace_with_sequence(1);
    const SpanId root = generate_span_id(kUser, kFrontend, 1);
    std::vector<Span> spans = {make_span(trace, root, std::nullopt,
                                         SpanKind::Server, kFrontend,
                                         "frontend", 100, 900)};
    std::vector<TraceTree> trees = assemble(spans);
    REQUIRE(trees.front().complete);
    CHECK(precision(trees, truth) == 0.0);
  }

  SECTION("surplus trees of the right shape cannot exceed 1.0") {
    std::vector<Span> spans;
    for (std::uint16_t seq = 1; seq <= 3; ++seq) {
      std::vector<Span> one = chain_spans(trace_with_sequence(seq));
      spans.insert(spans.end(), one.begin(), one.end());
    }
    CHECK(precision(assemble(spans), truth) == 1.0);
  }

  SECTION("an empty workload is vacuously perfect") {
    truth.request_ids.clear();
    CHECK(precision({}, truth) == 1.0);
  }
}

TEST_CASE("service view collapses client/server pairs into one call node") {
  std::vector<TraceTree> trees = assemble(chain_spans(trace_with_sequence(1)));
  REQUIRE(trees.size() == 1);
  std::optional<CallNode> view = service_view(trees.front());
  REQUIRE(view.has_value());
  CHECK(view->service == "frontend");
  REQUIRE(view->children.size() == 1);
  CHECK(view->children[0].service == "middle");
  REQUIRE(view->children[0].children.size() == 1);
  CHECK(view->children[0].children[0].service == "backend");
  CHECK(view->children[0].children[0].children.empty());

  std::vector<Span> broken = chain_spans(trace_with_sequence(2));
  broken.pop_back();
  std::vector<TraceTree> bad = assemble(broken);
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(service_view(bad.front()).has_value());
}

}  // namespace nahida
