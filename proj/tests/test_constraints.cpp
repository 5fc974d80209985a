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

#include <random>
#include <thread>

#include "disc/constraint_set.hpp"
#include "disc/error.hpp"
#include "disc/lowering.hpp"
#include "disc/shape_analysis.hpp"
#include "testutil.hpp"

using namespace disc;

namespace {

ShapeVector sv(std::vector<SymbolicDim> dims) { return ShapeVector(std::move(dims)); }
SymbolicDim S(int id) { return SymbolicDim::Sym(id); }
SymbolicDim C(int64_t v) { return SymbolicDim::Const(v); }

}  // namespace

TEST_CASE("same_dims is positional") {
  ConstraintSet cs;
  cs.union_dims(S(0), S(1), "t");
  CHECK(cs.same_dims(sv({S(0), C(4)}), sv({S(1), C(4)})));
  CHECK_FALSE(cs.same_dims(sv({S(0), C(4)}), sv({C(4), S(0)})));
  CHECK(cs.same_dims(sv({C(8)}), sv({C(8)})));
  CHECK_FALSE(cs.same_dims(sv({C(8)}), sv({C(9)})));
  CHECK_FALSE(cs.same_dims(sv({S(0)}), sv({S(0), S(0)})));
}

TEST_CASE("unifying two distinct constants is a contradiction") {
  ConstraintSet cs;
  cs.union_dims(S(0), C(4), "op_a");
  CHECK(cs.const_of(0) == 4);
  CHECK_THROWS_WITH_AS(cs.union_dims(S(0), C(5), "op_b"), doctest::Contains("op_b"),
                       CompileError);
}

TEST_CASE("same_size: commutative product and reshape links") {
  ConstraintSet cs;
  CHECK(cs.same_size(sv({S(0), C(4)}), sv({C(4), S(0)})));
  CHECK_FALSE(cs.same_size(sv({S(0)}), sv({S(1)})));
  cs.link_size(sv({S(0), C(4)}), sv({S(1)}));
  CHECK(cs.same_size(sv({S(0), C(4)}), sv({S(1)})));
  // Products of distinct symbols never unify by factoring.
  CHECK_FALSE(cs.same_size(sv({S(2), S(3)}), sv({S(4), S(5)})));
}

TEST_CASE("same_dims implies same_size") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    ConstraintSet cs;
    for (int u = 0; u < 4; ++u)
      cs.union_dims(S(static_cast<int>(rng() % 6)), S(static_cast<int>(rng() % 6)), "t");
    std::vector<SymbolicDim> a, b;
    for (int i = 0; i < 3; ++i) {
      int pick = static_cast<int>(rng() % 6);
      a.push_back(S(pick));
      b.push_back(rng() % 2 ? S(pick) : S(static_cast<int>(rng() % 6)));
    }
    if (cs.same_dims(sv(a), sv(b))) CHECK(cs.same_size(sv(a), sv(b)));
  }
}

TEST_CASE("size keys are recomputed after later unions") {
  ConstraintSet cs;
  cs.link_size(sv({S(0)}), sv({S(2)}));
  // S1 was not mentioned in the link; unioning it with S0 must still make
  // [S1] size-equal to [S2] because canonical keys are rebuilt.
  cs.union_dims(S(0), S(1), "t");
  CHECK(cs.same_size(sv({S(1)}), sv({S(2)})));
}

TEST_CASE("zero dims collapse into one size class") {
  ConstraintSet cs;
  CHECK(cs.same_size(sv({C(0), S(0)}), sv({C(0), S(1)})));
}

TEST_CASE("folding to constants") {
  ConstraintSet cs;
  cs.union_dims(S(0), S(1), "t");
  cs.union_dims(S(1), C(6), "t");
  CHECK(cs.canonical(S(0)) == C(6));
  CHECK(cs.same_dims(sv({S(0)}), sv({C(6)})));
}

TEST_CASE("monotonicity: extra seeds never remove provable equalities") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    ConstraintSet base;
    std::vector<std::pair<int, int>> unions;
    for (int u = 0; u < 5; ++u)
      unions.emplace_back(static_cast<int>(rng() % 8), static_cast<int>(rng() % 8));
    for (auto [a, b] : unions) base.union_dims(S(a), S(b), "t");
    ConstraintSet more = base;
    more.union_dims(S(static_cast<int>(rng() % 8)), S(static_cast<int>(rng() % 8)), "t");
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (base.same_dim(S(a), S(b))) CHECK(more.same_dim(S(a), S(b)));
  }
}

TEST_CASE("infer: elementwise ops unify dims pairwise") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": ["S0", 4], "dtype": "f32"},
      {"id": "b", "shape": ["S1", 4], "dtype": "f32"}
    ],
    "outputs": ["c"],
    "nodes": [{"id": "c", "op": "Add", "inputs": ["a", "b"]}]
  })");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet cs = infer(g, seed);
  CHECK(cs.same_dims(g.inputs[0].shape, g.inputs[1].shape));
}

TEST_CASE("infer: transpose records tensor-size equality") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "a", "shape": ["S0", "S1"], "dtype": "f32"}],
    "outputs": ["t"],
    "nodes": [{"id": "t", "op": "Transpose", "inputs": ["a"], "attrs": {"perm": [1, 0]}}]
  })");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet cs = infer(g, seed);
  const DhloOp* t = g.find_op("t");
  CHECK(cs.same_size(g.inputs[0].shape, t->shape));
  // Output dims are the permuted input dims.
  CHECK(cs.same_dim(t->shape.dims[0], g.inputs[0].shape.dims[1]));
  CHECK(cs.same_dim(t->shape.dims[1], g.inputs[0].shape.dims[0]));
}

TEST_CASE("infer: matmul unifies contraction dims") {
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": ["S0", "S1"], "dtype": "f32"},
      {"id": "b", "shape": ["S2", "S3"], "dtype": "f32"}
    ],
    "outputs": ["m"],
    "nodes": [{"id": "m", "op": "MatMul", "inputs": ["a", "b"]}]
  })");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet cs = infer(g, seed);
  CHECK(cs.same_dim(g.inputs[0].shape.dims[1], g.inputs[1].shape.dims[0]));
  const DhloOp* m = g.find_op("m");
  CHECK(cs.same_dim(m->shape.dims[0], g.inputs[0].shape.dims[0]));
  CHECK(cs.same_dim(m->shape.dims[1], g.inputs[1].shape.dims[1]));
}

TEST_CASE("infer: contradiction names the op") {
  DhloGraph g;
  g.name = "bad";
  GraphValue a, b;
  a.id = "a";
  a.shape = ShapeVector::all_const({2, 4});
  b.id = "b";
  b.shape = ShapeVector::all_const({3, 4});
  g.inputs = {a, b};
  DhloOp add;
  add.id = "c";
  add.kind = DhloOpKind::kAdd;
  add.inputs = {"a", "b"};
  add.shape = a.shape;
  g.ops = {add};
  g.outputs = {"c"};
  CHECK_THROWS_WITH_AS(infer(g, ConstraintSet{}), doctest::Contains("c"), CompileError);
}

TEST_CASE("infer is idempotent on fixtures") {
  for (const char* name : {"chain", "softmax", "split", "transformer"}) {
    CAPTURE(name);
    auto fw = disc::testing::load_fixture(name);
    auto [g, seed] = lower_to_dhlo(fw);
    ConstraintSet once = infer(g, seed);
    ConstraintSet twice = infer(g, once);
    int n = static_cast<int>(g.symbols.size());
    CHECK(once.partition_fingerprint(n) == twice.partition_fingerprint(n));
  }
}

TEST_CASE("a frozen constraint set serves concurrent readers") {
  auto fw = disc::testing::load_fixture("transformer");
  auto [g, seed] = lower_to_dhlo(fw);
  const ConstraintSet cs = infer(g, seed);
  std::vector<std::thread> threads;
  std::vector<int> hits(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      int local = 0;
      for (int round = 0; round < 200; ++round) {
        for (const auto& op : g.ops) {
          if (op.etype != ElementType::kF32) continue;
          local += cs.same_size(op.shape, op.shape) ? 1 : 0;
          for (const auto& d : op.shape.dims) (void)cs.canonical(d);
        }
      }
      hits[t] = local;
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(hits[t] == hits[0]);
}

TEST_CASE("infer monotonicity: extra seeds only grow provable equalities") {
  auto fw = disc::testing::load_fixture("split");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet base = infer(g, seed);
  ConstraintSet seeded = seed;
  // An extra cross-input equality the file does not imply.
  seeded.union_dims(g.inputs[1].shape.dims[0], g.inputs[2].shape.dims[0], "extra");
  ConstraintSet more = infer(g, seeded);
  int n = static_cast<int>(g.symbols.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (base.same_dim(SymbolicDim::Sym(a), SymbolicDim::Sym(b)))
        CHECK(more.same_dim(SymbolicDim::Sym(a), SymbolicDim::Sym(b)));
}

TEST_CASE("constraint dump lists split classes") {
  auto fw = disc::testing::load_fixture("split");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet cs = infer(g, seed);
  std::string text = cs.dump();
  CHECK(text.find("dims:") != std::string::npos);
}
