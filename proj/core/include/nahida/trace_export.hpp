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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nahida/engine.hpp"
#include "nahida/ground_truth.hpp"

// Span assembly and export.
//
// assemble() groups spans by trace id into trees linked through
// parent_span_id. A tree is complete when it has exactly one parentless
// root, every parent reference resolves, every span is reachable from the
// root, and every Client span has its Server counterpart; anything else is
// flagged, never guessed at.
//
// Export writes one JSON document per trace (newline-delimited). Each span
// record carries traceId, spanId, parentSpanId (omitted for roots), name
// ("<service> CLIENT|SERVER"), kind, startTimeUnixNano and endTimeUnixNano;
// see the README for the bit-exact schema.

namespace nahida {

struct TraceTree {
  TraceId trace_id;
  // Deterministic order: (start_ns, end_ns, span id bytes, kind).
  std::vector<Span> spans;
  // Index into spans, or absent for spans without a resolvable parent.
  std::vector<std::optional<std::size_t>> parent;
  std::vector<std::vector<std::size_t>> children;
  std::optional<std::size_t> root;

  bool complete = false;
  bool missing_parent = false;   // a parent_span_id without a matching span
  bool missing_pair = false;     // a Client span with no Server child, or a
                                 // parent edge with impossible kinds
  bool multiple_roots = false;   // zero or several parentless spans
  bool unreachable_spans = false;  // spans not connected to the root
  bool duplicate_span_id = false;
};

// Pure function of the span multiset; input order never matters. Trees are
// ordered by (earliest span start, trace id).
std::vector<TraceTree> assemble(std::vector<Span> spans);

void export_otel(const std::vector<TraceTree>& trees, std::ostream& out);

// Parses documents produced by export_otel back into spans (endpoint
// addresses are not part of the schema and come back unset).
std::vector<Span> import_otel(std::istream& in);

// Canonical form of a tree's labeled shape: service names, span kinds and
// parent-child edges, with children sorted so isomorphic trees render
// identically. Empty when the tree has no root.
std::string canonical_shape(const TraceTree& tree);

// Canonical shape a faithful trace of this call tree must have.
std::string expected_span_shape(const CallNode& call_tree);

// Service-level view of a complete trace: Client/Server pairs collapse into
// one node per call, mirroring how the per-call halves form a single
// logical span. Absent for incomplete trees.
std::optional<CallNode> service_view(const TraceTree& tree);

// Fraction of ground-truth requests accounted for by exactly one complete
// assembled tree of the matching labeled shape. Incomplete trees never
// match; surplus trees of a shape match at most the number of ground-truth
// requests with that shape.
double precision(const std::vector<TraceTree>& trees, const GroundTruth& truth);

}  // namespace nahida
