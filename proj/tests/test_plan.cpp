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

#include <doctest.h>

#include <thread>

#include "disc/codegen.hpp"
#include "disc/executor.hpp"
#include "testutil.hpp"

using namespace disc;
using disc::testing::load_fixture;
using disc::testing::make_binding;

namespace {

std::vector<InstrKind> instr_kinds(const CompiledPlan& plan) {
  std::vector<InstrKind> kinds;
  for (const auto& in : plan.instrs) kinds.push_back(in.kind);
  return kinds;
}

int count_kind(const CompiledPlan& plan, InstrKind k) {
  int n = 0;
  for (const auto& in : plan.instrs) n += in.kind == k ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("one-group graph emits the canonical instruction order") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 4], "dtype": "f32"}],
    "outputs": ["b"],
    "nodes": [
      {"id": "a", "op": "Add", "inputs": ["x", "x"]},
      {"id": "b", "op": "Tanh", "inputs": ["a"]}
    ]
  })");
  CompiledPlan plan = compile_graph(fw);
  std::vector<InstrKind> want = {InstrKind::kBindInput,     InstrKind::kEvalShape,
                                 InstrKind::kAlloc,         InstrKind::kSelectVersion,
                                 InstrKind::kComputeLaunch, InstrKind::kLaunch,
                                 InstrKind::kBindOutput};
  CHECK(instr_kinds(plan) == want);  // the output buffer is never deallocated
  CHECK(plan.eval_shape_count() == 1);
  auto diags = check_plan(plan);
  CHECK(diags.empty());
}

TEST_CASE("matmul with epilogue: one library call plus one fused launch") {
  auto fw = load_fixture("matmul");
  CompiledPlan plan = compile_graph(fw);
  CHECK(count_kind(plan, InstrKind::kLibraryCall) == 1);
  CHECK(count_kind(plan, InstrKind::kLaunch) == 1);

  Binding binding = make_binding(fw, {{"S0", 5}}, 21);
  auto result = disc::testing::run_plan(plan, binding);
  CHECK(result.stats.launch_count == 1);
  CHECK(result.stats.library_calls == 1);
  auto oracle = eval_eager(fw, binding);
  CHECK(disc::testing::max_rel_err(result.outputs, oracle) <= 1e-6);
}

TEST_CASE("static fallback: zero shape work, fixed versions, fewer instructions") {
  auto fw_static = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [8, 4], "dtype": "f32"}],
    "outputs": ["b"],
    "nodes": [
      {"id": "a", "op": "Add", "inputs": ["x", "x"]},
      {"id": "b", "op": "Tanh", "inputs": ["a"]}
    ]
  })");
  CompileOptions static_opts;
  static_opts.static_fallback = true;
  CompiledPlan s = compile_graph(fw_static, static_opts);
  CHECK(s.eval_shape_count() == 0);
  CHECK(count_kind(s, InstrKind::kSelectVersion) == 0);
  CHECK(count_kind(s, InstrKind::kComputeLaunch) == 0);
  for (const auto& in : s.instrs)
    if (in.kind == InstrKind::kLaunch) {
      CHECK(in.fixed_version >= 0);
      CHECK(in.fixed_tile > 0);
      // 32 elements, divisible by 4: the vectorized version wins statically.
      CHECK(in.fixed_version == 0);
    }

  CompiledPlan d = compile_graph(fw_static);  // dynamic compilation of the same graph
  CHECK(d.eval_shape_count() == 1);
  CHECK(s.host_instruction_count() < d.host_instruction_count());

  Binding binding;
  binding["x"] = ConcreteTensor::from_f32({8, 4}, std::vector<float>(32, 0.5f));
  auto rs = disc::testing::run_plan(s, binding);
  auto rd = disc::testing::run_plan(d, binding);
  CHECK(disc::testing::max_rel_err(rs.outputs, rd.outputs) <= 1e-6);
}

TEST_CASE("static specialization rejects symbolic dims by name") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 4], "dtype": "f32"}],
    "outputs": ["a"],
    "nodes": [{"id": "a", "op": "Exp", "inputs": ["x"]}]
  })");
  CHECK_THROWS_WITH_AS(static_specialize(fw), doctest::Contains("not static: S0"),
                       CompileError);
}

TEST_CASE("plan json round-trips byte-identically") {
  for (const char* name : {"chain", "softmax", "split", "matmul", "transformer"}) {
    CAPTURE(name);
    CompiledPlan plan = compile_graph(load_fixture(name));
    std::string once = plan_to_json(plan);
    std::string twice = plan_to_json(plan_from_json(once));
    CHECK(once == twice);
  }
}

TEST_CASE("compilation is deterministic: byte-identical plan json") {
  for (const char* name :
       {"chain", "softmax", "split", "reshape", "matmul", "diamond", "empty", "transformer"}) {
    CAPTURE(name);
    auto fw = load_fixture(name);
    CHECK(plan_to_json(compile_graph(fw)) == plan_to_json(compile_graph(fw)));
  }
}

TEST_CASE("golden plan: softmax") {
  CompiledPlan plan = compile_graph(load_fixture("softmax"));
  std::string got = plan_to_json(plan);
  std::string want =
      disc::testing::read_file(std::string(DISC_GOLDEN_DIR) + "/softmax_plan.json");
  CHECK(got == want);
}

TEST_CASE("a deserialized plan executes without the graph") {
  auto fw = load_fixture("softmax");
  std::string json_text = plan_to_json(compile_graph(fw));
  CompiledPlan plan = plan_from_json(json_text);  // nothing but the plan's own tables
  Binding binding = make_binding(fw, {{"S0", 6}}, 31);
  auto result = disc::testing::run_plan(plan, binding);
  auto oracle = eval_eager(fw, binding);
  CHECK(disc::testing::max_rel_err(result.outputs, oracle) <= 1e-6);
}

TEST_CASE("plan cache: symbol names do not cause recompilation") {
  auto a = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 4], "dtype": "f32"}],
    "outputs": ["y"],
    "nodes": [{"id": "y", "op": "Exp", "inputs": ["x"]}]
  })");
  auto b = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["BATCH", 4], "dtype": "f32"}],
    "outputs": ["y"],
    "nodes": [{"id": "y", "op": "Exp", "inputs": ["x"]}]
  })");
  Compiler compiler;
  auto p1 = compiler.compile(a);
  auto p2 = compiler.compile(b);
  CHECK(p1.get() == p2.get());
  CHECK(compiler.stats().compile_count == 1);
  CHECK(compiler.stats().cache_hits == 1);
}

TEST_CASE("plan cache: 100 graphs identical up to dim values compile once") {
  Compiler compiler;
  for (int i = 1; i <= 100; ++i) {
    std::string text = R"({
      "name": "g",
      "inputs": [{"id": "x", "shape": [)" + std::to_string(i * 2) + R"(, 4], "dtype": "f32"}],
      "outputs": ["y"],
      "nodes": [{"id": "y", "op": "Exp", "inputs": ["x"]}]
    })";
    compiler.compile(parse_graph(text));
  }
  CHECK(compiler.stats().compile_count == 1);
  CHECK(compiler.stats().cache_hits == 99);
}

TEST_CASE("plan cache: option flags and static dims key separately") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [8, 4], "dtype": "f32"}],
    "outputs": ["y"],
    "nodes": [{"id": "y", "op": "Exp", "inputs": ["x"]}]
  })");
  Compiler compiler;
  CompileOptions dyn;
  CompileOptions stat;
  stat.static_fallback = true;
  auto p1 = compiler.compile(fw, dyn);
  auto p2 = compiler.compile(fw, stat);
  CHECK(p1.get() != p2.get());
  CHECK(compiler.stats().compile_count == 2);
}

TEST_CASE("plan cache: concurrent compiles coalesce") {
  auto fw = load_fixture("transformer");
  Compiler compiler;
  std::vector<std::thread> threads;
  std::vector<std::shared_ptr<const CompiledPlan>> plans(8);
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] { plans[t] = compiler.compile(fw); });
  for (auto& th : threads) th.join();
  for (int t = 1; t < 8; ++t) CHECK(plans[t].get() == plans[0].get());
  CHECK(compiler.stats().compile_count == 1);
  CHECK(compiler.stats().cache_hits == 7);
}

TEST_CASE("generated plans pass the static validity checks") {
  for (const char* name :
       {"chain", "softmax", "split", "reshape", "matmul", "diamond", "empty", "transformer"}) {
    CAPTURE(name);
    CompiledPlan plan = compile_graph(load_fixture(name));
    CHECK(check_plan(plan).empty());
  }
}
