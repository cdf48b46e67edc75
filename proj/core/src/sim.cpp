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

#include "nahida/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <limits>
#include <memory>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace nahida::sim {

namespace {

constexpr std::uint64_t kEpochNs = 1'700'000'000'000ULL * 1'000'000ULL;
constexpr char kLoadGeneratorIp[] = "10.255.0.1";
constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kMaxCallTreeNodes = 4096;

const ServiceSpec* find_service(const Scenario& s, std::string_view name) {
  for (const auto& svc : s.services) {
    if (svc.name == name) return &svc;
  }
  return nullptr;
}

}  // namespace

void Scenario::validate() const {
  if (services.empty()) throw ScenarioError("scenario has no services");
  std::unordered_set<std::string> names;
  std::unordered_set<std::uint32_t> ips;
  for (const auto& svc : services) {
    if (svc.name.empty()) throw ScenarioError("service with empty name");
    if (!names.insert(svc.name).second) {
      throw ScenarioError("duplicate service name: " + svc.name);
    }
    if (!ips.insert(svc.ip.value).second) {
      throw ScenarioError("duplicate service ip: " + svc.ip.to_string());
    }
  }
  if (find_service(*this, entry) == nullptr) {
    throw ScenarioError("entry service not defined: " + entry);
  }
  for (const auto& svc : services) {
    for (const auto& callee : svc.calls) {
      if (find_service(*this, callee) == nullptr) {
        throw ScenarioError("service " + svc.name + " calls unknown service " +
                            callee);
      }
    }
  }
  // Cycle check over the service call graph (white/grey/black colouring).
  enum class Color { White, Grey, Black };
  std::unordered_map<std::string, Color> color;
  for (const auto& svc : services) color[svc.name] = Color::White;
  std::function<void(const ServiceSpec&)> visit = [&](const ServiceSpec& svc) {
    color[svc.name] = Color::Grey;
    for (const auto& callee : svc.calls) {
      const ServiceSpec* next = find_service(*this, callee);
      if (color[next->name] == Color::Grey) {
        throw ScenarioError("call graph cycle through service " + next->name);
      }
      if (color[next->name] == Color::White) visit(*next);
    }
    color[svc.name] = Color::Black;
  };
  for (const auto& svc : services) {
    if (color[svc.name] == Color::White) visit(svc);
  }
  if (workload.concurrency == 0) throw ScenarioError("concurrency must be >= 1");
  if (!(faults.drop_probability >= 0.0 && faults.drop_probability <= 1.0)) {
    throw ScenarioError("drop_probability must be within [0, 1]");
  }
  if (faults.ring_capacity && *faults.ring_capacity == 0) {
    throw ScenarioError("ring_capacity must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// JSON form

Scenario scenario_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    Scenario s;
    s.name = j.value("name", std::string("custom"));
    s.seed = j.value("seed", std::uint64_t{42});
    s.body_bytes = j.value("body_bytes", std::size_t{64});
    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      s.workload.total_requests =
          w.value("total_requests", std::uint64_t{1000});
      s.workload.concurrency = w.value("concurrency", std::uint32_t{50});
    }
    if (j.contains("faults")) {
      const auto& f = j.at("faults");
      s.faults.drop_probability = f.value("drop_probability", 0.0);
      if (f.contains("ring_capacity")) {
        s.faults.ring_capacity = f.at("ring_capacity").get<std::size_t>();
      }
    }
    if (!j.contains("services") || !j.at("services").is_array()) {
      throw ScenarioError("scenario requires a services array");
    }
    for (const auto& sj : j.at("services")) {
      ServiceSpec svc;
      svc.name = sj.at("name").get<std::string>();
      auto ip = Ipv4::parse(sj.at("ip").get<std::string>());
      if (!ip) {
        throw ScenarioError("service " + svc.name + " has a malformed ip");
      }
      svc.ip = *ip;
      const std::string mode = sj.value("mode", std::string("single"));
      if (mode == "single") {
        svc.mode = ServiceMode::SingleThreaded;
      } else if (mode == "multi") {
        svc.mode = ServiceMode::MultiThreaded;
      } else {
        throw ScenarioError("service " + svc.name +
                            " has unknown mode (want single|multi): " + mode);
      }
      if (sj.contains("calls")) {
        for (const auto& c : sj.at("calls")) {
          svc.calls.push_back(c.get<std::string>());
        }
      }
      s.services.push_back(std::move(svc));
    }
    s.entry = j.value("entry", s.services.front().name);
    return s;
  } catch (const ScenarioError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario field has wrong shape: ") +
                        e.what());
  }
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::ordered_json j;
  j["name"] = scenario.name;
  j["entry"] = scenario.entry;
  j["seed"] = scenario.seed;
  j["body_bytes"] = scenario.body_bytes;
  j["workload"] = {{"total_requests", scenario.workload.total_requests},
                   {"concurrency", scenario.workload.concurrency}};
  nlohmann::ordered_json faults;
  faults["drop_probability"] = scenario.faults.drop_probability;
  if (scenario.faults.ring_capacity) {
    faults["ring_capacity"] = *scenario.faults.ring_capacity;
  }
  j["faults"] = std::move(faults);
  nlohmann::ordered_json services = nlohmann::ordered_json::array();
  for (const auto& svc : scenario.services) {
    nlohmann::ordered_json sj;
    sj["name"] = svc.name;
    sj["ip"] = svc.ip.to_string();
    sj["mode"] =
        svc.mode == ServiceMode::SingleThreaded ? "single" : "multi";
    sj["calls"] = svc.calls;
    services.push_back(std::move(sj));
  }
  j["services"] = std::move(services);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Builtin scenarios

namespace {

Scenario make_triplet(ServiceMode mode) {
  Scenario s;
  s.services = {
      {"frontend", *Ipv4::parse("10.1.0.1"), mode, {"middle"}},
      {"middle", *Ipv4::parse("10.1.0.2"), mode, {"backend"}},
      {"backend", *Ipv4::parse("10.1.0.3"), mode, {}},
  };
  s.entry = "frontend";
  return s;
}

Scenario make_bookinfo(ServiceMode mode) {
  Scenario s;
  s.services = {
      {"productpage", *Ipv4::parse("10.2.0.1"), mode, {"details", "reviews"}},
      {"details", *Ipv4::parse("10.2.0.2"), mode, {}},
      {"reviews", *Ipv4::parse("10.2.0.3"), mode, {"ratings"}},
      {"ratings", *Ipv4::parse("10.2.0.4"), mode, {}},
  };
  s.entry = "productpage";
  return s;
}

Scenario make_trainticket_chain(ServiceMode mode) {
  Scenario s;
  constexpr int kChainLength = 49;
  char name[16];
  char ip[16];
  for (int i = 1; i <= kChainLength; ++i) {
    std::snprintf(name, sizeof(name), "ts-svc-%02d", i);
    std::snprintf(ip, sizeof(ip), "10.3.0.%d", i);
    ServiceSpec svc{name, *Ipv4::parse(ip), mode, {}};
    if (i < kChainLength) {
      char callee[16];
      std::snprintf(callee, sizeof(callee), "ts-svc-%02d", i + 1);
      svc.calls.push_back(callee);
    }
    s.services.push_back(std::move(svc));
  }
  s.entry = "ts-svc-01";
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"triplet-S",           "triplet-M",           "bookinfo-S",
          "bookinfo-M",          "trainticket-chain-S", "trainticket-chain-M"};
}

Scenario builtin_scenario(std::string_view name) {
  Scenario s;
  if (name == "triplet-S") {
    s = make_triplet(ServiceMode::SingleThreaded);
  } else if (name == "triplet-M") {
    s = make_triplet(ServiceMode::MultiThreaded);
  } else if (name == "bookinfo-S") {
    s = make_bookinfo(ServiceMode::SingleThreaded);
  } else if (name == "bookinfo-M") {
    s = make_bookinfo(ServiceMode::MultiThreaded);
  } else if (name == "trainticket-chain-S") {
    s = make_trainticket_chain(ServiceMode::SingleThreaded);
  } else if (name == "trainticket-chain-M") {
    s = make_trainticket_chain(ServiceMode::MultiThreaded);
  } else {
    throw ScenarioError("unknown builtin scenario: " + std::string(name));
  }
  s.name = std::string(name);
  return s;
}

// ---------------------------------------------------------------------------
// Discrete event core

namespace {

struct CallTreeNode {
  std::uint32_t svc = 0;        // index into Scenario::services
  std::uint32_t parent = kNoParent;
  std::uint32_t child_idx = 0;  // position within the parent's call list
  std::vector<std::uint32_t> children;
};

class Simulation {
 public:
  Simulation(const Scenario& scenario,
             const std::function<void(const KernelEvent&)>& sink)
      : scenario_(scenario), sink_(sink), rng_(scenario.seed) {
    build_nodes();
    build_services();
  }

  std::shared_ptr<const CallNode> call_tree() const { return truth_tree_; }
  const std::vector<std::uint64_t>& request_ids() const { return request_ids_; }

  void run() {
    // Service main threads are announced before any traffic.
    for (std::size_t i = 0; i < services_.size(); ++i) {
      auto& svc = services_[i];
      ThreadRecord rec;
      rec.root_tid = svc.main_tid;
      rec.ns_ids = {{kRootNamespace, svc.main_tid},
                    {svc.ns, svc.next_local++}};
      rec.level = 1;
      emit(kEpochNs + i, ThreadCreateEvent{std::move(rec)});
    }
    for (std::uint32_t u = 0; u < scenario_.workload.concurrency; ++u) {
      schedule(kEpochNs + 1'000 + 10'000ULL * u + uniform(5'000),
               Task{Kind::UserIssue, 0, 0, u, 0});
    }
    while (!heap_.empty()) {
      Scheduled top = heap_.top();
      heap_.pop();
      now_ = top.time;
      dispatch(top.task);
    }
  }

 private:
  enum class Kind : std::uint8_t {
    UserIssue,   // c = user index
    Arrive,      // request message reaches a node; msg = message id
    Begin,       // dequeue a parked request on a freed service
    Fork,        // c = call index (multi-threaded services)
    CallSend,    // c = call index
    RespArrive,  // c = call index, msg = response message id
    ChildExit,   // msg = thread id
    Finish,      // node sends its response
  };

  struct Task {
    Kind kind;
    std::uint64_t req = 0;
    std::uint32_t node = 0;
    std::uint32_t c = 0;
    std::uint64_t msg = 0;
  };

  struct Scheduled {
    std::uint64_t time;
    std::uint64_t tseq;
    Task task;
  };

  struct ByTime {
    bool operator()(const Scheduled& a, const Scheduled& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.tseq > b.tseq;
    }
  };

  struct Parked {
    std::uint64_t req;
    std::uint32_t node;
    std::uint64_t msg;
  };

  struct ServiceRt {
    const ServiceSpec* spec = nullptr;
    std::uint64_t main_tid = 0;
    NamespaceId ns = 0;
    std::uint64_t next_local = 1;
    bool busy = false;
    std::deque<Parked> parked;
    std::string request_payload;  // the message other services send to us
  };

  struct Visit {
    std::uint32_t next_call = 0;
    std::uint32_t pending = 0;
    std::vector<std::uint64_t> child_tids;
  };

  struct RequestState {
    std::uint32_t user = 0;
    std::vector<Visit> visits;
  };

  void build_nodes() {
    std::uint32_t entry_idx = 0;
    for (std::uint32_t i = 0; i < scenario_.services.size(); ++i) {
      if (scenario_.services[i].name == scenario_.entry) entry_idx = i;
    }
    std::function<std::uint32_t(std::uint32_t, std::uint32_t, std::uint32_t)>
        expand = [&](std::uint32_t svc, std::uint32_t parent,
                     std::uint32_t child_idx) -> std::uint32_t {
      if (nodes_.size() >= kMaxCallTreeNodes) {
        throw ScenarioError("call tree exceeds the node limit");
      }
      const std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(CallTreeNode{svc, parent, child_idx, {}});
      const auto& spec = scenario_.services[svc];
      for (std::uint32_t c = 0; c < spec.calls.size(); ++c) {
        std::uint32_t callee = 0;
        for (std::uint32_t i = 0; i < scenario_.services.size(); ++i) {
          if (scenario_.services[i].name == spec.calls[c]) callee = i;
        }
        const std::uint32_t child = expand(callee, idx, c);
        nodes_[idx].children.push_back(child);
      }
      return idx;
    };
    expand(entry_idx, kNoParent, 0);

    std::function<CallNode(std::uint32_t)> mirror =
        [&](std::uint32_t idx) -> CallNode {
      CallNode node;
      node.service = scenario_.services[nodes_[idx].svc].name;
      for (std::uint32_t child : nodes_[idx].children) {
        node.children.push_back(mirror(child));
      }
      return node;
    };
    truth_tree_ = std::make_shared<const CallNode>(mirror(0));
  }

  void build_services() {
    const std::string body(scenario_.body_bytes, 'x');
    char head[128];
    services_.resize(scenario_.services.size());
    for (std::size_t i = 0; i < scenario_.services.size(); ++i) {
      auto& svc = services_[i];
      svc.spec = &scenario_.services[i];
      svc.main_tid = next_tid_++;
      svc.ns = 1000 + static_cast<NamespaceId>(i);
      std::snprintf(head, sizeof(head),
                    "POST /%s HTTP/1.1\r\nHost: %s\r\nContent-Length: %zu\r\n"
                    "\r\n",
                    svc.spec->name.c_str(), svc.spec->name.c_str(),
                    scenario_.body_bytes);
      svc.request_payload = std::string(head) + body;
    }
    std::snprintf(head, sizeof(head),
                  "HTTP/1.1 200 OK\r\nContent-Length: %zu\r\n\r\n",
                  scenario_.body_bytes);
    response_payload_ = std::string(head) + body;
    load_gen_ip_ = *Ipv4::parse(kLoadGeneratorIp);
  }

  // --- deterministic delays (ns) -------------------------------------------

  std::uint64_t uniform(std::uint64_t span) { return rng_() % (span + 1); }
  std::uint64_t net_delay() { return 150'000 + uniform(50'000); }
  std::uint64_t leaf_work() { return 200'000 + uniform(100'000); }
  std::uint64_t prologue() { return 50'000 + uniform(20'000); }
  std::uint64_t inter_call_gap() { return 20'000 + uniform(10'000); }
  std::uint64_t epilogue() { return 40'000 + uniform(20'000); }
  std::uint64_t fork_stagger(std::uint32_t i) {
    return 8'000ULL * i + uniform(4'000);
  }
  std::uint64_t fork_to_send() { return 10'000 + uniform(5'000); }
  std::uint64_t think_time() { return 100'000 + uniform(100'000); }

  // --- plumbing -------------------------------------------------------------

  void schedule(std::uint64_t time, Task task) {
    heap_.push(Scheduled{time, next_tseq_++, task});
  }

  template <typename Body>
  void emit(std::uint64_t ts, Body&& body) {
    KernelEvent ev;
    ev.timestamp_ns = ts;
    ev.sequence = next_stream_seq_++;
    ev.body = std::forward<Body>(body);
    sink_(ev);
  }

  Ipv4 caller_ip(std::uint32_t node) const {
    if (nodes_[node].parent == kNoParent) return load_gen_ip_;
    return services_[nodes_[nodes_[node].parent].svc].spec->ip;
  }

  ServiceRt& svc_of(std::uint32_t node) { return services_[nodes_[node].svc]; }

  // --- handlers --------------------------------------------------------

  void dispatch(const Task& t) {
    switch (t.kind) {
      case Kind::UserIssue: return on_user_issue(t);
      case Kind::Arrive: return on_arrive(t);
      case Kind::Begin: return begin_serving(t.req, t.node, t.msg);
      case Kind::Fork: return on_fork(t);
      case Kind::CallSend: return on_call_send(t);
      case Kind::RespArrive: return on_resp_arrive(t);
      case Kind::ChildExit: return emit(now_, ThreadExitEvent{t.msg});
      case Kind::Finish: return on_finish(t);
    }
  }

  void on_user_issue(const Task& t) {
    if (issued_ >= scenario_.workload.total_requests) return;
    const std::uint64_t req = issued_++;
    request_ids_.push_back(req);
    RequestState state;
    state.user = t.c;
    state.visits.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& v = state.visits[i];
      v.pending = static_cast<std::uint32_t>(nodes_[i].children.size());
      if (scenario_.services[nodes_[i].svc].mode ==
          ServiceMode::MultiThreaded) {
        v.child_tids.resize(nodes_[i].children.size());
      }
    }
    live_.emplace(req, std::move(state));
    const std::uint64_t msg = next_msg_++;
    schedule(now_ + net_delay(), Task{Kind::Arrive, req, 0, 0, msg});
  }

  void on_arrive(const Task& t) {
    ServiceRt& svc = svc_of(t.node);
    if (svc.busy) {
      svc.parked.push_back(Parked{t.req, t.node, t.msg});
      return;
    }
    begin_serving(t.req, t.node, t.msg);
  }

  void begin_serving(std::uint64_t req, std::uint32_t node, std::uint64_t msg) {
    ServiceRt& svc = svc_of(node);
    svc.busy = true;
    emit(now_, RecvEvent{{svc.main_tid, caller_ip(node), svc.spec->ip,
                          Direction::Request, msg, svc.request_payload}});
    const auto& children = nodes_[node].children;
    if (children.empty()) {
      schedule(now_ + leaf_work(), Task{Kind::Finish, req, node, 0, 0});
    } else if (svc.spec->mode == ServiceMode::SingleThreaded) {
      schedule(now_ + prologue(), Task{Kind::CallSend, req, node, 0, 0});
    } else {
      const std::uint64_t base = now_ + prologue();
      for (std::uint32_t i = 0; i < children.size(); ++i) {
        schedule(base + fork_stagger(i), Task{Kind::Fork, req, node, i, 0});
      }
    }
  }

  void on_fork(const Task& t) {
    ServiceRt& svc = svc_of(t.node);
    const std::uint64_t tid = next_tid_++;
    ThreadRecord rec;
    rec.root_tid = tid;
    rec.ns_ids = {{kRootNamespace, tid}, {svc.ns, svc.next_local++}};
    rec.level = 1;
    rec.parent_root_tid = svc.main_tid;
    emit(now_, ThreadCreateEvent{std::move(rec)});
    live_.at(t.req).visits[t.node].child_tids[t.c] = tid;
    schedule(now_ + fork_to_send(),
             Task{Kind::CallSend, t.req, t.node, t.c, 0});
  }

  void on_call_send(const Task& t) {
    ServiceRt& svc = svc_of(t.node);
    const std::uint32_t child_node = nodes_[t.node].children[t.c];
    ServiceRt& callee = svc_of(child_node);
    const std::uint64_t msg = next_msg_++;
    const std::uint64_t sender =
        svc.spec->mode == ServiceMode::SingleThreaded
            ? svc.main_tid
            : live_.at(t.req).visits[t.node].child_tids[t.c];
    emit(now_, SendEvent{{sender, svc.spec->ip, callee.spec->ip,
                          Direction::Request, msg, callee.request_payload}});
    schedule(now_ + net_delay(), Task{Kind::Arrive, t.req, child_node, 0, msg});
  }

  void on_resp_arrive(const Task& t) {
    ServiceRt& svc = svc_of(t.node);
    const std::uint32_t child_node = nodes_[t.node].children[t.c];
    ServiceRt& callee = svc_of(child_node);
    Visit& visit = live_.at(t.req).visits[t.node];
    const bool single = svc.spec->mode == ServiceMode::SingleThreaded;
    const std::uint64_t receiver =
        single ? svc.main_tid : visit.child_tids[t.c];
    emit(now_, RecvEvent{{receiver, callee.spec->ip, svc.spec->ip,
                          Direction::Response, t.msg, response_payload_}});
    if (single) {
      visit.next_call = t.c + 1;
      if (visit.next_call < nodes_[t.node].children.size()) {
        schedule(now_ + inter_call_gap(),
                 Task{Kind::CallSend, t.req, t.node, visit.next_call, 0});
      } else {
        schedule(now_ + epilogue(), Task{Kind::Finish, t.req, t.node, 0, 0});
      }
    } else {
      schedule(now_ + 5'000, Task{Kind::ChildExit, t.req, t.node, t.c,
                                  visit.child_tids[t.c]});
      if (--visit.pending == 0) {
        schedule(now_ + epilogue(), Task{Kind::Finish, t.req, t.node, 0, 0});
      }
    }
  }

  void on_finish(const Task& t) {
    ServiceRt& svc = svc_of(t.node);
    const std::uint64_t msg = next_msg_++;
    emit(now_, SendEvent{{svc.main_tid, svc.spec->ip, caller_ip(t.node),
                          Direction::Response, msg, response_payload_}});
    if (!svc.parked.empty()) {
      const Parked next = svc.parked.front();
      svc.parked.pop_front();
      schedule(now_ + 1'000, Task{Kind::Begin, next.req, next.node, 0,
                                  next.msg});
    } else {
      svc.busy = false;
    }
    if (nodes_[t.node].parent == kNoParent) {
      const std::uint32_t user = live_.at(t.req).user;
      live_.erase(t.req);
      schedule(now_ + net_delay() + think_time(),
               Task{Kind::UserIssue, 0, 0, user, 0});
    } else {
      schedule(now_ + net_delay(),
               Task{Kind::RespArrive, t.req, nodes_[t.node].parent,
                    nodes_[t.node].child_idx, msg});
    }
  }

  const Scenario& scenario_;
  const std::function<void(const KernelEvent&)>& sink_;
  std::mt19937_64 rng_;

  std::vector<CallTreeNode> nodes_;
  std::shared_ptr<const CallNode> truth_tree_;
  std::vector<ServiceRt> services_;
  std::string response_payload_;
  Ipv4 load_gen_ip_{};

  std::priority_queue<Scheduled, std::vector<Scheduled>, ByTime> heap_;
  std::unordered_map<std::uint64_t, RequestState> live_;
  std::vector<std::uint64_t> request_ids_;

  std::uint64_t now_ = kEpochNs;
  std::uint64_t next_tseq_ = 0;
  std::uint64_t next_stream_seq_ = 0;
  std::uint64_t next_tid_ = 10'000;
  std::uint64_t next_msg_ = 1;
  std::uint64_t issued_ = 0;
};

}  // namespace

void run_scenario_streaming(const Scenario& scenario,
                            const std::function<void(const KernelEvent&)>& sink,
                            GroundTruth* truth) {
  scenario.validate();
  Simulation sim(scenario, sink);
  sim.run();
  if (truth != nullptr) {
    truth->call_tree = sim.call_tree();
    truth->request_ids = sim.request_ids();
  }
}

SimResult run_scenario(const Scenario& scenario) {
  SimResult result;
  run_scenario_streaming(
      scenario, [&](const KernelEvent& ev) { result.events.push_back(ev); },
      &result.truth);
  return result;
}

FaultFilter::FaultFilter(double p, std::uint64_t seed) : p_(p), rng_(seed) {}

bool FaultFilter::keep(const KernelEvent& event) {
  if (p_ <= 0.0) return true;
  const bool droppable = std::holds_alternative<SendEvent>(event.body) ||
                         std::holds_alternative<RecvEvent>(event.body);
  if (!droppable) return true;
  // Fixed-width mantissa draw; reproducible across standard libraries.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u >= p_;
}

std::vector<KernelEvent> apply_faults(std::vector<KernelEvent> events, double p,
                                      std::uint64_t seed) {
  if (p <= 0.0) return events;
  FaultFilter filter(p, seed);
  std::vector<KernelEvent> kept;
  kept.reserve(events.size());
  for (auto& ev : events) {
    if (filter.keep(ev)) kept.push_back(std::move(ev));
  }
  return kept;
}

}  // namespace nahida::sim
