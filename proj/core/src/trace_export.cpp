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

#include "nahida/trace_export.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace nahida {
namespace {

std::string display_name(const Span& span) {
  return span.service_name.empty() ? span.local_ip.to_string()
                                   : span.service_name;
}

const char* kind_label(SpanKind kind) {
  return kind == SpanKind::Client ? "CLIENT" : "SERVER";
}

bool span_before(const Span& a, const Span& b) {
  auto key = [](const Span& s) {
    return std::tuple(s.start_ns, s.end_ns, s.span_id.client_ip_low,
                      s.span_id.server_ip_low, s.span_id.span_order,
                      s.kind == SpanKind::Client ? 0 : 1);
  };
  return key(a) < key(b);
}

TraceTree build_tree(TraceId trace, std::vector<Span> spans) {
  TraceTree tree;
  tree.trace_id = trace;
  tree.spans = std::move(spans);
  std::sort(tree.spans.begin(), tree.spans.end(), span_before);

  const std::size_t n = tree.spans.size();
  std::map<SpanId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(tree.spans[i].span_id, i).second) {
      tree.duplicate_span_id = true;
    }
  }

  tree.parent.assign(n, std::nullopt);
  tree.children.resize(n);
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Span& span = tree.spans[i];
    if (!span.parent_span_id) {
      ++roots;
      tree.root = i;
      continue;
    }
    auto it = index.find(*span.parent_span_id);
    if (it == index.end()) {
      tree.missing_parent = true;
      continue;
    }
    tree.parent[i] = it->second;
    tree.children[it->second].push_back(i);
    // A Server span hangs off the Client half of its call; a Client span
    // hangs off the Server span of the service that issued it.
    const Span& parent = tree.spans[it->second];
    if ((span.kind == SpanKind::Server && parent.kind != SpanKind::Client) ||
        (span.kind == SpanKind::Client && parent.kind != SpanKind::Server)) {
      tree.missing_pair = true;
    }
  }
  if (roots != 1) {
    tree.multiple_roots = true;
    tree.root.reset();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (tree.spans[i].kind != SpanKind::Client) continue;
    bool has_server_child = false;
    for (std::size_t child : tree.children[i]) {
      if (tree.spans[child].kind == SpanKind::Server) {
        has_server_child = true;
        break;
      }
    }
    if (!has_server_child) tree.missing_pair = true;
  }

  if (tree.root) {
    std::vector<std::size_t> stack{*tree.root};
    std::size_t reached = 0;
    std::vector<bool> seen(n, false);
    seen[*tree.root] = true;
    while (!stack.empty()) {
      std::size_t at = stack.back();
      stack.pop_back();
      ++reached;
      for (std::size_t child : tree.children[at]) {
        if (!seen[child]) {
          seen[child] = true;
          stack.push_back(child);
        }
      }
    }
    tree.unreachable_spans = reached != n;
  }

  tree.complete = tree.root.has_value() && !tree.missing_parent &&
                  !tree.missing_pair && !tree.multiple_roots &&
                  !tree.unreachable_spans && !tree.duplicate_span_id;
  return tree;
}

std::string canonical_at(const TraceTree& tree, std::size_t at) {
  std::vector<std::string> parts;
  parts.reserve(tree.children[at].size());
  for (std::size_t child : tree.children[at]) {
    parts.push_back(canonical_at(tree, child));
  }
  std::sort(parts.begin(), parts.end());
  std::string out = display_name(tree.spans[at]);
  out += '|';
  out += kind_label(tree.spans[at].kind);
  out += '(';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  out += ')';
  return out;
}

nlohmann::ordered_json span_to_json(const Span& span) {
  nlohmann::ordered_json doc;
  doc["traceId"] = span.trace_id.hex();
  doc["spanId"] = span.span_id.hex();
  if (span.parent_span_id) doc["parentSpanId"] = span.parent_span_id->hex();
  doc["name"] = display_name(span) + " " + kind_label(span.kind);
  doc["kind"] = kind_label(span.kind);
  doc["startTimeUnixNano"] = span.start_ns;
  doc["endTimeUnixNano"] = span.end_ns;
  return doc;
}

Span span_from_json(const nlohmann::json& doc) {
  Span span;
  auto trace = TraceId::from_hex(doc.at("traceId").get<std::string>());
  auto id = SpanId::from_hex(doc.at("spanId").get<std::string>());
  if (!trace || !id) throw std::runtime_error("bad span identity in document");
  span.trace_id = *trace;
  span.span_id = *id;
  if (doc.contains("parentSpanId")) {
    auto parent = SpanId::from_hex(doc.at("parentSpanId").get<std::string>());
    if (!parent) throw std::runtime_error("bad parentSpanId in document");
    span.parent_span_id = *parent;
  }
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "CLIENT") {
    span.kind = SpanKind::Client;
  } else if (kind == "SERVER") {
    span.kind = SpanKind::Server;
  } else {
    throw std::runtime_error("bad span kind in document");
  }
  std::string name = doc.at("name").get<std::string>();
  std::size_t cut = name.rfind(' ');
  span.service_name = cut == std::string::npos ? name : name.substr(0, cut);
  span.start_ns = doc.at("startTimeUnixNano").get<std::uint64_t>();
  span.end_ns = doc.at("endTimeUnixNano").get<std::uint64_t>();
  return span;
}

}  // namespace

std::vector<TraceTree> assemble(std::vector<Span> spans) {
  std::unordered_map<TraceId, std::vector<Span>> groups;
  for (Span& span : spans) {
    groups[span.trace_id].push_back(std::move(span));
  }
  std::vector<TraceTree> trees;
  trees.reserve(groups.size());
  for (auto& [trace, list] : groups) {
    trees.push_back(build_tree(trace, std::move(list)));
  }
  std::sort(trees.begin(), trees.end(), [](const TraceTree& a, const TraceTree& b) {
    auto key = [](const TraceTree& t) {
      return std::tuple(t.spans.empty() ? 0 : t.spans.front().start_ns,
                        t.trace_id.hex());
    };
    return key(a) < key(b);
  });
  return trees;
}

void export_otel(const std::vector<TraceTree>& trees, std::ostream& out) {
  for (const TraceTree& tree : trees) {
    nlohmann::ordered_json doc;
    doc["traceId"] = tree.trace_id.hex();
    auto spans = nlohmann::ordered_json::array();
    for (const Span& span : tree.spans) {
      spans.push_back(span_to_json(span));
    }
    doc["spans"] = std::move(spans);
    out << doc.dump() << '\n';
  }
}

std::vector<Span> import_otel(std::istream& in) {
  std::vector<Span> spans;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json doc = nlohmann::json::parse(line);
    for (const auto& span : doc.at("spans")) {
      spans.push_back(span_from_json(span));
    }
  }
  return spans;
}

std::string canonical_shape(const TraceTree& tree) {
  if (!tree.root) return {};
  return canonical_at(tree, *tree.root);
}

std::string expected_span_shape(const CallNode& call_tree) {
  std::vector<std::string> parts;
  parts.reserve(call_tree.children.size());
  for (const CallNode& child : call_tree.children) {
    std::string part = call_tree.service;
    part += "|CLIENT(";
    part += expected_span_shape(child);
    part += ')';
    parts.push_back(std::move(part));
  }
  std::sort(parts.begin(), parts.end());
  std::string out = call_tree.service;
  out += "|SERVER(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  out += ')';
  return out;
}

std::optional<CallNode> service_view(const TraceTree& tree) {
  if (!tree.complete) return std::nullopt;
  std::function<CallNode(std::size_t)> fold = [&](std::size_t server) {
    CallNode node;
    node.service = display_name(tree.spans[server]);
    for (std::size_t client : tree.children[server]) {
      for (std::size_t child_server : tree.children[client]) {
        node.children.push_back(fold(child_server));
      }
    }
    return node;
  };
  return fold(*tree.root);
}

double precision(const std::vector<TraceTree>& trees,
                 const GroundTruth& truth) {
  if (truth.request_count() == 0) return 1.0;
  if (!truth.call_tree) return 0.0;
  std::unordered_map<std::string, std::size_t> have;
  for (const TraceTree& tree : trees) {
    if (tree.complete) ++have[canonical_shape(tree)];
  }
  const std::string wanted = expected_span_shape(*truth.call_tree);
  auto it = have.find(wanted);
  const std::size_t matched =
      it == have.end() ? 0 : std::min(it->second, truth.request_count());
  return static_cast<double>(matched) /
         static_cast<double>(truth.request_count());
}

}  // namespace nahida
