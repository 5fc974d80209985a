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

#include "disc/interpreter.hpp"
#include "disc/lowering.hpp"
#include "disc/passes.hpp"
#include "disc/shape_analysis.hpp"
#include "testutil.hpp"

using namespace disc;
using disc::testing::load_fixture;
using disc::testing::make_binding;
using disc::testing::max_rel_err;

TEST_CASE("lowering: add is an identity lowering") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": ["S0"], "dtype": "f32"},
      {"id": "b", "shape": ["S0"], "dtype": "f32"}
    ],
    "outputs": ["c"],
    "nodes": [{"id": "c", "op": "Add", "inputs": ["a", "b"]}]
  })");
  auto [g, cs] = lower_to_dhlo(fw);
  CHECK(g.ops.size() == 1);
  CHECK(g.ops[0].kind == DhloOpKind::kAdd);
  CHECK(cs.num_size_links() == 0);
}

TEST_CASE("lowering: split becomes dynamic slices with injected equalities") {
  auto fw = load_fixture("split");
  auto [g, seed] = lower_to_dhlo(fw);

  int slices = 0;
  for (const auto& op : g.ops) slices += op.kind == DhloOpKind::kDynamicSlice ? 1 : 0;
  CHECK(slices == 2);

  const DhloOp* s0 = g.find_op("s0");
  const DhloOp* s1 = g.find_op("s1");
  REQUIRE(s0);
  REQUIRE(s1);
  // Index operands are tensors, never attributes.
  CHECK(s0->inputs.size() == 4);
  CHECK(g.value_etype(s0->inputs[1]) == ElementType::kI64);

  ConstraintSet cs = infer(g, seed);
  // out0.dim0 == out1.dim0 == S0 (the input row dim), out0.dim1 == out1.dim1.
  CHECK(cs.same_dim(s0->shape.dims[0], s1->shape.dims[0]));
  CHECK(cs.same_dim(s0->shape.dims[0], g.inputs[0].shape.dims[0]));
  CHECK(cs.same_dim(s0->shape.dims[1], s1->shape.dims[1]));
  CHECK(cs.same_size(s0->shape, s1->shape));

  // Without injection the slices stay opaque.
  LoweringOptions no_inject;
  no_inject.inject_constraints = false;
  auto [g2, seed2] = lower_to_dhlo(fw, no_inject);
  ConstraintSet cs2 = infer(g2, seed2);
  const DhloOp* t0 = g2.find_op("s0");
  const DhloOp* t1 = g2.find_op("s1");
  CHECK_FALSE(cs2.same_size(t0->shape, t1->shape));
}

TEST_CASE("lowering: reshape records the size equality") {
  auto fw = load_fixture("reshape");
  auto [g, seed] = lower_to_dhlo(fw);
  const DhloOp* r = g.find_op("r");
  REQUIRE(r);
  CHECK(r->kind == DhloOpKind::kDynamicReshape);
  ConstraintSet cs = infer(g, seed);
  CHECK(cs.same_size(g.value_shape(r->inputs[0]), r->shape));
}

TEST_CASE("lowering: softmax expands to exactly seven compute ops") {
  auto fw = load_fixture("softmax");
  auto [g, cs] = lower_to_dhlo(fw);
  int compute = 0;
  std::vector<DhloOpKind> kinds;
  for (const auto& op : g.ops) {
    if (is_compute_op(op.kind) && op.etype == ElementType::kF32) {
      compute++;
      kinds.push_back(op.kind);
    }
  }
  CHECK(compute == 7);
  REQUIRE(kinds.size() == 7);
  CHECK(kinds[0] == DhloOpKind::kReduceMax);
  CHECK(kinds[1] == DhloOpKind::kDynamicBroadcastInDim);
  CHECK(kinds[2] == DhloOpKind::kSub);
  CHECK(kinds[3] == DhloOpKind::kExp);
  CHECK(kinds[4] == DhloOpKind::kReduceSum);
  CHECK(kinds[5] == DhloOpKind::kDynamicBroadcastInDim);
  CHECK(kinds[6] == DhloOpKind::kDiv);
}

TEST_CASE("lowering preserves value semantics on all fixtures") {
  for (const char* name :
       {"chain", "softmax", "split", "reshape", "matmul", "diamond", "empty", "transformer"}) {
    CAPTURE(name);
    auto fw = load_fixture(name);
    auto [g, cs] = lower_to_dhlo(fw);
    for (auto& binding_syms : disc::testing::load_bindings(name)) {
      Binding binding = make_binding(fw, binding_syms, 42);
      auto fw_out = eval_eager(fw, binding);
      auto dhlo_out = eval_eager(g, binding);
      CHECK(max_rel_err(fw_out, dhlo_out) <= 1e-6);
    }
  }
}

TEST_CASE("lowering preserves value semantics on random graphs") {
  std::mt19937_64 rng(123);
  for (uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    disc::testing::RandomGraphGen gen(seed);
    FrameworkGraph fw = gen.generate();
    auto [g, cs] = lower_to_dhlo(fw);
    auto diags = verify(g);
    for (const auto& d : diags) CAPTURE(d);
    REQUIRE(diags.empty());
    for (int b = 0; b < 3; ++b) {
      auto syms = disc::testing::random_symbols(fw, rng);
      Binding binding = make_binding(fw, syms, seed * 7 + b);
      auto fw_out = eval_eager(fw, binding);
      auto dhlo_out = eval_eager(g, binding);
      CHECK(max_rel_err(fw_out, dhlo_out) <= 1e-6);
    }
  }
}

TEST_CASE("every pass preserves eager-evaluation semantics") {
  std::vector<Pass> passes;
  passes.push_back(Pass{"infer", [](PassState& s) { s.constraints = infer(s.graph, s.constraints); }});
  passes.push_back(Pass{"canonicalize_dims",
                        [](PassState& s) { s.graph = canonicalize_dims(s.graph, s.constraints); }});
  passes.push_back(make_simplify_broadcast_pass());

  std::mt19937_64 rng(808);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    disc::testing::RandomGraphGen gen(seed + 5000);
    FrameworkGraph fw = gen.generate();
    auto [g, cs] = lower_to_dhlo(fw);
    PassState after = run_pipeline({g, cs}, passes);
    auto syms = disc::testing::random_symbols(fw, rng);
    Binding binding = make_binding(fw, syms, seed);
    auto before_out = eval_eager(g, binding);
    auto after_out = eval_eager(after.graph, binding);
    CHECK(max_rel_err(before_out, after_out) <= 1e-6);
  }
}

TEST_CASE("injected constraints are sound under concrete execution") {
  // Every compile-time dim equality must hold for the runtime dims produced
  // by the eager oracle.
  std::mt19937_64 rng(321);
  for (const char* name : {"split", "reshape", "softmax", "transformer"}) {
    CAPTURE(name);
    auto fw = load_fixture(name);
    auto [g, seed] = lower_to_dhlo(fw);
    ConstraintSet cs = infer(g, seed);
    for (auto& binding_syms : disc::testing::load_bindings(name)) {
      Binding binding = make_binding(fw, binding_syms, 99);
      // Concrete dims per tensor id via the dhlo oracle.
      std::map<std::string, std::vector<int64_t>> dims;
      {
        std::map<std::string, ConcreteTensor> env;
        for (const auto& in : g.inputs) {
          env[in.id] = binding.at(in.id);
          dims[in.id] = binding.at(in.id).dims;
        }
        for (const auto& op : g.ops) {
          std::vector<const ConcreteTensor*> args;
          for (const auto& a : op.inputs) args.push_back(&env.at(a));
          env[op.id] = eval_dhlo_op(op, args);
          dims[op.id] = env[op.id].dims;
        }
      }
      // Runtime value per symbol class must be unique.
      std::map<int, int64_t> class_value;
      auto check_value = [&](const SymbolicDim& d, int64_t actual) {
        SymbolicDim c = cs.canonical(d);
        if (c.is_const()) {
          CHECK(c.size() == actual);
        } else {
          auto [it, inserted] = class_value.emplace(c.sym_id(), actual);
          if (!inserted) CHECK(it->second == actual);
        }
      };
      for (const auto& in : g.inputs)
        for (int i = 0; i < in.shape.rank(); ++i) check_value(in.shape.dims[i], dims[in.id][i]);
      for (const auto& op : g.ops) {
        if (op.etype != ElementType::kF32) continue;
        for (int i = 0; i < op.shape.rank(); ++i) check_value(op.shape.dims[i], dims[op.id][i]);
      }
    }
  }
}

TEST_CASE("lowering is deterministic") {
  for (const char* name : {"split", "softmax", "transformer"}) {
    auto fw = load_fixture(name);
    auto [g1, cs1] = lower_to_dhlo(fw);
    auto [g2, cs2] = lower_to_dhlo(fw);
    CHECK(to_json(g1) == to_json(g2));
  }
}

TEST_CASE("canonicalize_dims folds constant-proven symbols") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "a", "shape": [8, 4], "dtype": "f32"}],
    "outputs": ["b"],
    "nodes": [{"id": "b", "op": "Exp", "inputs": ["a"]}]
  })");
  LoweringOptions static_opts;
  static_opts.symbolize_inputs = false;
  auto [g, seed] = lower_to_dhlo(fw, static_opts);
  ConstraintSet cs = infer(g, seed);
  DhloGraph canon = canonicalize_dims(g, cs);
  CHECK(canon.inputs[0].shape.is_static());
  CHECK(canon.find_op("b")->shape.is_static());
}
