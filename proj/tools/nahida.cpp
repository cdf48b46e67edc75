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

// Command line front end: runs simulated workloads through the tracing
// pipeline, exports assembled traces, and verifies exported trace files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nahida/events.hpp"
#include "nahida/ground_truth.hpp"
#include "nahida/pipeline.hpp"
#include "nahida/report.hpp"
#include "nahida/sim.hpp"
#include "nahida/trace_export.hpp"

namespace {

namespace fs = std::filesystem;

// Salt applied to the scenario seed for the fault stream, so workload
// randomness and probe-loss randomness stay independent.
constexpr std::uint64_t kFaultSeedSalt = 0x9e3779b97f4a7c15ULL;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path resolve_out(const fs::path& out_dir, const fs::path& path) {
  if (path.is_absolute()) return path;
  return out_dir / path;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct RunArgs {
  std::string scenario;  // builtin name or scenario JSON path
  std::string engine_config_file;
  std::string out_dir;
  std::string export_path;
  std::string report_path;
  std::string events_path;
  std::optional<std::uint64_t> requests;
  std::optional<std::uint32_t> concurrency;
  std::optional<std::uint64_t> seed;
  std::optional<double> drop;
  std::optional<std::uint32_t> walk_depth;
  std::optional<std::size_t> ring_capacity;
};

nahida::sim::Scenario load_scenario(const RunArgs& args) {
  nahida::sim::Scenario scenario;
  if (fs::exists(args.scenario)) {
    scenario = nahida::sim::scenario_from_json(read_file(args.scenario));
  } else {
    scenario = nahida::sim::builtin_scenario(args.scenario);
  }
  if (args.requests) scenario.workload.total_requests = *args.requests;
  if (args.concurrency) scenario.workload.concurrency = *args.concurrency;
  if (args.seed) scenario.seed = *args.seed;
  if (args.drop) scenario.faults.drop_probability = *args.drop;
  if (args.ring_capacity) scenario.faults.ring_capacity = *args.ring_capacity;
  scenario.validate();
  return scenario;
}

nahida::EngineConfig load_engine_config(const RunArgs& args,
                                        const nahida::sim::Scenario& scenario) {
  nahida::EngineConfig config;
  if (!args.engine_config_file.empty()) {
    config = nahida::engine_config_from_json(read_file(args.engine_config_file));
  }
  if (args.walk_depth) config.walk_depth = *args.walk_depth;
  if (scenario.faults.ring_capacity) {
    config.ring_capacity = *scenario.faults.ring_capacity;
  }
  for (const auto& svc : scenario.services) {
    config.service_names.emplace(svc.ip, svc.name);
  }
  return config;
}

int cmd_run(const RunArgs& args) {
  const nahida::sim::Scenario scenario = load_scenario(args);
  const nahida::EngineConfig config = load_engine_config(args, scenario);
  const fs::path out_dir = args.out_dir;

  nahida::StreamPipeline pipeline(config);
  nahida::sim::FaultFilter filter(scenario.faults.drop_probability,
                                  scenario.seed ^ kFaultSeedSalt);
  std::optional<std::ofstream> events_out;
  if (!args.events_path.empty()) {
    events_out = open_out(resolve_out(out_dir, args.events_path));
  }

  nahida::GroundTruth truth;
  std::uint64_t total = 0;
  std::uint64_t delivered = 0;
  nahida::sim::run_scenario_streaming(
      scenario,
      [&](const nahida::KernelEvent& event) {
        ++total;
        if (!filter.keep(event)) return;
        ++delivered;
        if (events_out) *events_out << nahida::to_line(event) << '\n';
        pipeline.feed(event);
      },
      &truth);

  const std::vector<nahida::Span> spans = pipeline.finish();
  const std::vector<nahida::TraceTree> trees = nahida::assemble(spans);
  std::uint64_t complete = 0;
  for (const auto& tree : trees) complete += tree.complete ? 1 : 0;
  const double precision = nahida::precision(trees, truth);

  nahida::RunReport report;
  report.scenario = scenario.name;
  report.seed = scenario.seed;
  report.drop_probability = scenario.faults.drop_probability;
  report.requests = truth.request_count();
  report.events_total = total;
  report.events_delivered = delivered;
  report.spans = spans.size();
  report.traces = trees.size();
  report.complete_traces = complete;
  report.precision = precision;
  report.counters = pipeline.engine().counters();
  report.config = config;

  if (!args.export_path.empty()) {
    auto out = open_out(resolve_out(out_dir, args.export_path));
    nahida::export_otel(trees, out);
  }
  if (!args.report_path.empty()) {
    auto out = open_out(resolve_out(out_dir, args.report_path));
    out << nahida::report_to_json(report);
  }

  std::printf("scenario %s seed %llu: %llu requests, %llu/%llu events delivered\n",
              report.scenario.c_str(),
              static_cast<unsigned long long>(report.seed),
              static_cast<unsigned long long>(report.requests),
              static_cast<unsigned long long>(report.events_delivered),
              static_cast<unsigned long long>(report.events_total));
  std::printf("spans %llu, traces %llu (%llu complete), precision %.6f\n",
              static_cast<unsigned long long>(report.spans),
              static_cast<unsigned long long>(report.traces),
              static_cast<unsigned long long>(report.complete_traces),
              report.precision);
  const auto& c = report.counters;
  std::printf(
      "counters: orphan_sends=%llu stray_responses=%llu buffer_drops=%llu "
      "malformed_contexts=%llu gated_duplicates=%llu unknown_parents=%llu "
      "unknown_exits=%llu\n",
      static_cast<unsigned long long>(c.orphan_sends),
      static_cast<unsigned long long>(c.stray_responses),
      static_cast<unsigned long long>(c.buffer_drops),
      static_cast<unsigned long long>(c.malformed_contexts),
      static_cast<unsigned long long>(c.gated_duplicates),
      static_cast<unsigned long long>(c.unknown_parents),
      static_cast<unsigned long long>(c.unknown_exits));
  if (!args.export_path.empty()) {
    std::printf("wrote traces: %s\n",
                resolve_out(out_dir, args.export_path).string().c_str());
  }
  if (!args.report_path.empty()) {
    std::printf("wrote report: %s\n",
                resolve_out(out_dir, args.report_path).string().c_str());
  }
  if (!args.events_path.empty()) {
    std::printf("wrote events: %s\n",
                resolve_out(out_dir, args.events_path).string().c_str());
  }
  return 0;
}

int cmd_list() {
  for (const auto& name : nahida::sim::builtin_scenario_names()) {
    const auto scenario = nahida::sim::builtin_scenario(name);
    const auto result_tree =
        nahida::sim::run_scenario([&] {
          auto s = scenario;
          s.workload.total_requests = 0;
          return s;
        }());
    const std::size_t nodes = nahida::call_node_count(*result_tree.truth.call_tree);
    std::printf("%-22s services=%-3zu call-tree-nodes=%-3zu spans/request=%zu\n",
                name.c_str(), scenario.services.size(), nodes,
                nahida::expected_span_count(*result_tree.truth.call_tree));
  }
  return 0;
}

int cmd_show(const std::string& name) {
  std::fputs(
      nahida::sim::scenario_to_json(nahida::sim::builtin_scenario(name)).c_str(),
      stdout);
  return 0;
}

int cmd_verify(const std::string& report_path, double min_precision,
               const std::string& traces_path, const std::string& scenario_name,
               std::optional<std::uint64_t> requests) {
  if (report_path.empty() && traces_path.empty()) {
    std::fprintf(stderr, "error: verify needs --report and/or --traces\n");
    return 2;
  }
  int rc = 0;
  if (!report_path.empty()) {
    const nahida::RunReport report =
        nahida::report_from_json(read_file(report_path));
    std::printf("report %s: scenario %s, precision %.6f (min %.6f)\n",
                report_path.c_str(), report.scenario.c_str(), report.precision,
                min_precision);
    if (report.precision < min_precision) {
      std::fprintf(stderr, "error: precision %.6f below required %.6f\n",
                   report.precision, min_precision);
      rc = 1;
    }
  }
  if (!traces_path.empty()) {
    std::ifstream in(traces_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + traces_path);
    const std::vector<nahida::Span> spans = nahida::import_otel(in);
    const std::vector<nahida::TraceTree> trees = nahida::assemble(spans);
    std::uint64_t complete = 0;
    for (const auto& tree : trees) complete += tree.complete ? 1 : 0;
    std::printf("spans %zu, traces %zu (%llu complete)\n", spans.size(),
                trees.size(), static_cast<unsigned long long>(complete));
    if (!scenario_name.empty()) {
      auto scenario = nahida::sim::builtin_scenario(scenario_name);
      scenario.workload.total_requests =
          requests.value_or(scenario.workload.total_requests);
      const auto shape = nahida::sim::run_scenario([&] {
        auto s = scenario;
        s.workload.total_requests = 0;
        return s;
      }());
      nahida::GroundTruth truth;
      truth.call_tree = shape.truth.call_tree;
      truth.request_ids.resize(scenario.workload.total_requests);
      for (std::size_t i = 0; i < truth.request_ids.size(); ++i) {
        truth.request_ids[i] = i;
      }
      std::printf("precision vs %s x%llu: %.6f\n", scenario_name.c_str(),
                  static_cast<unsigned long long>(truth.request_count()),
                  nahida::precision(trees, truth));
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-band distributed tracing pipeline driver"};
  app.require_subcommand(1);

  const char* env_out = std::getenv("NAHIDA_OUT_DIR");

  RunArgs run_args;
  run_args.scenario = "triplet-S";
  run_args.out_dir = env_out != nullptr ? env_out : ".";

  auto* run = app.add_subcommand("run", "simulate a scenario and trace it");
  run->add_option("--scenario", run_args.scenario,
                  "builtin scenario name (see list-scenarios) or a scenario "
                  "JSON file");
  run->add_option("--engine-config", run_args.engine_config_file,
                  "engine configuration JSON file");
  run->add_option("--out-dir", run_args.out_dir,
                  "directory for relative output paths (default "
                  "$NAHIDA_OUT_DIR or .)");
  run->add_option("--out", run_args.export_path,
                  "write assembled traces as NDJSON to this file");
  run->add_option("--report", run_args.report_path,
                  "write the run report JSON to this file");
  run->add_option("--events", run_args.events_path,
                  "write the delivered kernel event stream to this file");
  run->add_option("--requests", run_args.requests, "total requests to issue");
  run->add_option("--concurrency", run_args.concurrency,
                  "closed-loop virtual users");
  run->add_option("--seed", run_args.seed, "deterministic run seed");
  run->add_option("--drop-prob", run_args.drop,
                  "probability of deleting each send/recv event");
  run->add_option("--walk-depth", run_args.walk_depth,
                  "thread ancestry walk depth (0 = only the thread itself)");
  run->add_option("--ring-capacity", run_args.ring_capacity,
                  "span ring buffer capacity");

  auto* list = app.add_subcommand("list-scenarios", "list builtin scenarios");

  std::string show_name;
  auto* show = app.add_subcommand("show-scenario",
                                  "print a builtin scenario as JSON");
  show->add_option("name", show_name, "builtin scenario name")->required();

  std::string verify_report;
  double verify_min_precision = 1.0;
  std::string verify_traces;
  std::string verify_scenario;
  std::optional<std::uint64_t> verify_requests;
  auto* verify = app.add_subcommand(
      "verify", "check a run report and/or re-assemble an exported trace file");
  verify->add_option("--report", verify_report, "run report JSON to check");
  verify->add_option("--min-precision", verify_min_precision,
                     "fail unless the report's precision reaches this value");
  verify->add_option("--traces", verify_traces, "NDJSON trace export to read");
  verify->add_option("--scenario", verify_scenario,
                     "builtin scenario to score precision against");
  verify->add_option("--requests", verify_requests,
                     "request count the export should cover");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (list->parsed()) return cmd_list();
    if (show->parsed()) return cmd_show(show_name);
    if (verify->parsed())
      return cmd_verify(verify_report, verify_min_precision, verify_traces,
                        verify_scenario, verify_requests);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
