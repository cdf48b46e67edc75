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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nahida/events.hpp"
#include "nahida/ground_truth.hpp"

// Deterministic microservice simulator. A scenario describes services (one
// single-threaded replica each), an acyclic call graph and a closed-loop
// workload of C virtual users issuing N requests in total. The simulator
// plays the workload through a discrete event core and emits the kernel
// event stream a syscall-level tracer would observe, together with ground
// truth recorded outside the traced path.
//
// Event model (documented contract for golden streams):
//  * One ThreadCreate per service main thread opens the stream. Service
//    threads carry two-level namespace identities (root plus the service's
//    own pid namespace).
//  * The load generator itself is outside the traced cluster: its sends and
//    receives are not observed. A request's first event is the entry
//    service's recv.
//  * A single-threaded service serves one request at a time: recv(request),
//    downstream calls strictly in order, then send(response). Receives are
//    observed at serve time, which is when a blocked single-threaded server
//    issues the syscall.
//  * A multi-threaded service forks one child thread per downstream call
//    (ThreadCreate, parented to the serving thread); children issue the
//    calls concurrently, each child receives its response and exits. The
//    serving thread joins all children before the response is sent, so
//    requests never pipeline on one thread.
//  * Per request this yields 2 send/recv events per call-tree node plus 2
//    per call edge, and in multi-threaded mode one create and one exit per
//    call edge.

namespace nahida::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ServiceMode { SingleThreaded, MultiThreaded };

struct ServiceSpec {
  std::string name;
  Ipv4 ip;
  ServiceMode mode = ServiceMode::SingleThreaded;
  std::vector<std::string> calls;  // downstream services, call order
};

struct Workload {
  std::uint64_t total_requests = 1000;
  std::uint32_t concurrency = 50;
};

struct FaultSpec {
  // Each Send/Recv event is independently deleted with this probability,
  // modelling missed probe firings. Ground truth is never affected.
  double drop_probability = 0.0;
  // Overrides the engine's span ring capacity for this scenario.
  std::optional<std::size_t> ring_capacity;
};

struct Scenario {
  std::string name;
  std::vector<ServiceSpec> services;
  std::string entry;
  Workload workload;
  FaultSpec faults;
  std::uint64_t seed = 42;
  std::size_t body_bytes = 64;

  // Throws ScenarioError: empty or duplicate services, unknown entry or
  // call target, a cyclic call graph, or a drop probability outside [0,1].
  void validate() const;
};

// Human-editable JSON form; schema documented in the README.
Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& scenario);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(std::string_view name);  // throws ScenarioError

struct SimResult {
  std::vector<KernelEvent> events;
  GroundTruth truth;
};

// Runs the workload and materializes the whole stream.
SimResult run_scenario(const Scenario& scenario);

// Streaming form for long runs; ground truth lands in *truth when non-null.
void run_scenario_streaming(const Scenario& scenario,
                            const std::function<void(const KernelEvent&)>& sink,
                            GroundTruth* truth);

// Deletes each Send/Recv event independently with probability p using its
// own generator; thread lifecycle events always survive. p = 0 returns the
// stream unchanged.
std::vector<KernelEvent> apply_faults(std::vector<KernelEvent> events, double p,
                                      std::uint64_t seed);

// Streaming equivalent of apply_faults: keep() draws once per Send/Recv in
// stream order, so batch and streaming runs drop identical events.
class FaultFilter {
 public:
  FaultFilter(double p, std::uint64_t seed);
  bool keep(const KernelEvent& event);

 private:
  double p_;
  std::mt19937_64 rng_;
};

}  // namespace nahida::sim
