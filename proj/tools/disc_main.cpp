/* Copyright 2026 The DISC Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "disc/codegen.hpp"
#include "disc/error.hpp"
#include "disc/executor.hpp"
#include "disc/interpreter.hpp"
#include "disc/lowering.hpp"
#include "disc/tensor_io.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw disc::Error(disc::ErrorClass::kUsage, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw disc::Error(disc::ErrorClass::kUsage, "cannot write " + path);
  f << text;
}

// Session stats persist across invocations in a small JSON file.
std::string stats_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DISC_STATS_FILE")) return env;
  return "disc_stats.json";
}

json load_stats(const std::string& path) {
  std::ifstream f(path);
  if (!f) return json::object();
  try {
    json j;
    f >> j;
    return j.is_object() ? j : json::object();
  } catch (...) {
    return json::object();
  }
}

void bump(json& j, const std::string& key, int64_t delta) {
  j[key] = j.value(key, int64_t{0}) + delta;
}

void merge_run_stats(json& j, const disc::ExecStats& s) {
  bump(j, "launch_count", s.launch_count);
  bump(j, "library_calls", s.library_calls);
  bump(j, "alloc_calls", s.alloc_calls);
  bump(j, "allocator_cache_hits", s.allocator_cache_hits);
  bump(j, "aliased_allocs", s.aliased_allocs);
  j["peak_bytes"] = std::max(j.value("peak_bytes", int64_t{0}), s.peak_bytes);
  j["host_instruction_count"] = s.host_instruction_count;
}

void save_stats(const std::string& path, const json& j) { write_file(path, j.dump(2)); }

disc::TextDumper make_dumper(std::string* wanted_stage, std::string* captured) {
  const char* dir = std::getenv("DISC_DUMP_DIR");
  std::string dump_dir = dir ? dir : "";
  if (dump_dir.empty() && !wanted_stage) return nullptr;
  return [dump_dir, wanted_stage, captured](const std::string& stage, const std::string& text) {
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      std::ofstream f(dump_dir + "/" + stage + ".txt");
      f << text;
    }
    if (wanted_stage && stage == *wanted_stage && captured) *captured = text;
  };
}

disc::Binding load_inputs(const std::vector<std::string>& specs) {
  disc::Binding binding;
  for (const auto& spec : specs) {
    size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw disc::Error(disc::ErrorClass::kUsage, "--input expects id=path, got " + spec);
    binding[spec.substr(0, eq)] = disc::read_tensor_file(spec.substr(eq + 1));
  }
  return binding;
}

// Concrete inputs for a shape binding: symbols substituted, data from a
// seeded generator.
disc::Binding synth_inputs(const disc::CompiledPlan& plan, const json& shape_binding,
                           uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.25f, 2.0f);
  disc::Binding binding;
  for (const auto& in : plan.inputs) {
    std::vector<int64_t> dims;
    for (const auto& entry : in.declared) {
      if (!entry.empty() && (std::isdigit(static_cast<unsigned char>(entry[0]))))
        dims.push_back(std::stoll(entry));
      else if (shape_binding.contains(entry))
        dims.push_back(shape_binding[entry].get<int64_t>());
      else
        throw disc::Error(disc::ErrorClass::kUsage,
                          "shape binding is missing symbol " + entry);
    }
    int64_t numel = 1;
    for (int64_t d : dims) numel *= d;
    std::vector<float> data(static_cast<size_t>(numel));
    for (auto& v : data) v = dist(rng);
    binding[in.id] = disc::ConcreteTensor::from_f32(dims, std::move(data));
  }
  return binding;
}

int cmd_compile(const std::string& graph_path, const std::string& out_path,
                const disc::CompileOptions& opts, const std::string& stats_flag) {
  disc::FrameworkGraph g = disc::parse_graph(read_file(graph_path));
  disc::CompiledPlan plan = disc::compile_graph(g, opts, make_dumper(nullptr, nullptr));
  write_file(out_path, disc::plan_to_json(plan));

  std::string sp = stats_path(stats_flag);
  json stats = load_stats(sp);
  bump(stats, "compile_count", 1);
  stats["host_instruction_count"] = plan.host_instruction_count();
  save_stats(sp, stats);
  std::cout << "compiled " << graph_path << " -> " << out_path << " (signature "
            << plan.signature_digest << ", " << plan.kernels.size() << " kernels, "
            << plan.host_instruction_count() << " host instructions)\n";
  return 0;
}

int cmd_run(const std::string& file, bool eager, const std::vector<std::string>& input_specs,
            const std::string& out_dir, const std::string& stats_flag) {
  disc::Binding binding = load_inputs(input_specs);
  std::vector<disc::ConcreteTensor> outputs;
  std::vector<std::string> output_ids;

  if (eager) {
    disc::FrameworkGraph g = disc::parse_graph(read_file(file));
    outputs = disc::eval_eager(g, binding);
    output_ids = g.outputs;
  } else {
    disc::CompiledPlan plan = disc::plan_from_json(read_file(file));
    disc::Executor executor;
    disc::ExecResult result = executor.run(plan, binding);
    outputs = std::move(result.outputs);
    for (const auto& out : plan.outputs) output_ids.push_back(out.id);
    std::string sp = stats_path(stats_flag);
    json stats = load_stats(sp);
    merge_run_stats(stats, result.stats);
    save_stats(sp, stats);
  }

  for (size_t i = 0; i < outputs.size(); ++i) {
    std::cout << "output " << output_ids[i] << " shape=" << outputs[i].shape_str() << "\n";
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      disc::write_tensor_file(out_dir + "/" + output_ids[i] + ".tensor", outputs[i]);
    }
  }
  return 0;
}

int cmd_bench(const std::string& plan_path, const std::string& shapes_path, int reps,
              bool as_json, const std::string& stats_flag) {
  disc::CompiledPlan plan = disc::plan_from_json(read_file(plan_path));
  json shapes = json::parse(read_file(shapes_path));
  if (!shapes.is_array())
    throw disc::Error(disc::ErrorClass::kUsage, "--shapes file must be a JSON array");
  reps = std::max(reps, 20);

  std::cout << "note: timings are CPU reference-executor medians; absolute speedups are not\n"
               "comparable with GPU results.\n";
  disc::Executor executor;
  json report = json::array();
  disc::ExecStats last_stats;
  for (size_t s = 0; s < shapes.size(); ++s) {
    disc::Binding binding = synth_inputs(plan, shapes[s], 0x9E3779B9u + s);
    std::vector<double> wall, host, kernel;
    int64_t launches = 0;
    for (int r = 0; r < reps; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      disc::ExecResult result = executor.run(plan, binding);
      double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      wall.push_back(ms);
      host.push_back(result.stats.host_ms);
      kernel.push_back(result.stats.kernel_ms);
      launches = result.stats.launch_count;
      last_stats = result.stats;
    }
    auto median = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    double ratio = plan.eager_op_count > 0
                       ? static_cast<double>(launches + last_stats.library_calls) /
                             static_cast<double>(plan.eager_op_count)
                       : 0.0;
    if (as_json) {
      report.push_back(json{{"binding", shapes[s]},
                            {"wall_ms", median(wall)},
                            {"host_ms", median(host)},
                            {"kernel_ms", median(kernel)},
                            {"launch_count", launches},
                            {"library_calls", last_stats.library_calls},
                            {"eager_op_count", plan.eager_op_count},
                            {"launch_ratio", ratio}});
    } else {
      std::cout << "shape " << shapes[s].dump() << " wall_ms=" << median(wall)
                << " host_ms=" << median(host) << " kernel_ms=" << median(kernel)
                << " launch_count=" << launches
                << " library_calls=" << last_stats.library_calls
                << " eager_op_count=" << plan.eager_op_count << " launch_ratio=" << ratio
                << "\n";
    }
  }
  if (as_json) std::cout << report.dump(2) << "\n";

  std::string sp = stats_path(stats_flag);
  json stats = load_stats(sp);
  merge_run_stats(stats, last_stats);
  save_stats(sp, stats);
  return 0;
}

int cmd_dump_ir(const std::string& graph_path, const std::string& stage,
                const disc::CompileOptions& opts) {
  const std::vector<std::string> stages = {"dhlo", "constraints", "simplified", "fused",
                                           "program"};
  if (std::find(stages.begin(), stages.end(), stage) == stages.end())
    throw disc::Error(disc::ErrorClass::kUsage,
                      "unknown stage " + stage + " (dhlo|constraints|simplified|fused|program)");
  disc::FrameworkGraph g = disc::parse_graph(read_file(graph_path));
  std::string wanted = stage, captured;
  auto dumper = [&](const std::string& st, const std::string& text) {
    if (const char* dir = std::getenv("DISC_DUMP_DIR")) {
      std::filesystem::create_directories(dir);
      std::ofstream f(std::string(dir) + "/" + st + ".txt");
      f << text;
    }
    if (st == wanted) captured = text;
  };
  disc::compile_graph(g, opts, dumper);
  std::cout << captured;
  return 0;
}

int cmd_stats(bool as_json, const std::string& stats_flag) {
  json stats = load_stats(stats_path(stats_flag));
  const std::vector<std::string> keys = {
      "compile_count", "cache_hits",  "launch_count",
      "library_calls", "peak_bytes",  "host_instruction_count",
      "alloc_calls",   "allocator_cache_hits", "aliased_allocs"};
  if (as_json) {
    json out;
    for (const auto& k : keys) out[k] = stats.value(k, int64_t{0});
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& k : keys) std::cout << k << "=" << stats.value(k, int64_t{0}) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disc: a desk-scale dynamic-shape tensor compiler"};
  app.require_subcommand(1);

  std::string graph_path, plan_path, out_path = "plan.json", out_dir, shapes_path, stage;
  std::string stats_flag;
  std::vector<std::string> input_specs;
  bool eager = false, as_json = false;
  int reps = 20;
  disc::CompileOptions opts;
  bool no_inject = false, no_fusion = false;

  auto* compile = app.add_subcommand("compile", "compile a graph JSON into a plan");
  compile->add_option("graph", graph_path, "graph JSON file")->required();
  compile->add_option("-o,--output", out_path, "plan output path");
  compile->add_flag("--static-fallback", opts.static_fallback,
                    "specialize statically when all shapes are constant");
  compile->add_flag("--no-injected-constraints", no_inject,
                    "drop frontend constraint injection (ablation)");
  compile->add_flag("--no-fusion", no_fusion, "disable fusion (singleton kernels)");
  compile->add_option("--stats-file", stats_flag, "session stats file");

  auto* run = app.add_subcommand("run", "execute a plan (or a graph eagerly)");
  run->add_option("file", plan_path, "plan JSON (or graph JSON with --eager)")->required();
  run->add_flag("--eager", eager, "interpret the graph with the reference oracle");
  run->add_option("--input", input_specs, "input binding id=path.tensor");
  run->add_option("--out-dir", out_dir, "directory for output .tensor files");
  run->add_option("--stats-file", stats_flag, "session stats file");

  auto* bench = app.add_subcommand("bench", "run a plan over a list of shape bindings");
  bench->add_option("plan", plan_path, "plan JSON file")->required();
  bench->add_option("--shapes", shapes_path, "JSON array of symbol bindings")->required();
  bench->add_option("--reps", reps, "repetitions per shape (>= 20)");
  bench->add_flag("--json", as_json, "JSON report");
  bench->add_option("--stats-file", stats_flag, "session stats file");

  auto* dump = app.add_subcommand("dump-ir", "print one pipeline stage");
  dump->add_option("graph", graph_path, "graph JSON file")->required();
  dump->add_option("--stage", stage, "dhlo|constraints|simplified|fused|program")->required();
  dump->add_flag("--no-injected-constraints", no_inject);
  dump->add_flag("--no-fusion", no_fusion);

  auto* stats_cmd = app.add_subcommand("stats", "print session stats as key=value");
  stats_cmd->add_flag("--json", as_json, "JSON output");
  stats_cmd->add_option("--stats-file", stats_flag, "session stats file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opts.inject_constraints = !no_inject;
  opts.enable_fusion = !no_fusion;

  try {
    if (compile->parsed()) return cmd_compile(graph_path, out_path, opts, stats_flag);
    if (run->parsed()) return cmd_run(plan_path, eager, input_specs, out_dir, stats_flag);
    if (bench->parsed()) return cmd_bench(plan_path, shapes_path, reps, as_json, stats_flag);
    if (dump->parsed()) return cmd_dump_ir(graph_path, stage, opts);
    if (stats_cmd->parsed()) return cmd_stats(as_json, stats_flag);
  } catch (const disc::Error& e) {
    std::cerr << "error[" << disc::error_class_name(e.error_class()) << "]: " << e.what()
              << "\n";
    switch (e.error_class()) {
      case disc::ErrorClass::kUsage: return 2;
      case disc::ErrorClass::kParse:
      case disc::ErrorClass::kValidation:
      case disc::ErrorClass::kCompile: return 3;
      default: return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
