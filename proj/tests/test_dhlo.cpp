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

#include "disc/dhlo.hpp"
#include "disc/lowering.hpp"
#include "disc/passes.hpp"
#include "disc/shape_analysis.hpp"
#include "testutil.hpp"

using namespace disc;

namespace {

DhloGraph one_op_graph() {
  DhloGraph g;
  g.name = "tiny";
  GraphValue x;
  x.id = "x";
  x.shape.dims = {SymbolicDim::Sym(0), SymbolicDim::Const(4)};
  g.symbols.push_back({SymbolOrigin::Kind::kInputDim, 0, 0, ""});
  g.inputs.push_back(x);
  DhloOp op;
  op.id = "y";
  op.kind = DhloOpKind::kExp;
  op.inputs = {"x"};
  op.shape = x.shape;
  g.ops.push_back(op);
  g.outputs = {"y"};
  return g;
}

}  // namespace

TEST_CASE("verify: valid one-op graph") {
  CHECK(verify(one_op_graph()).empty());
}

TEST_CASE("verify: dynamic_slice index operand must be rank-1") {
  DhloGraph g = one_op_graph();
  DhloOp c;
  c.id = "idx";
  c.kind = DhloOpKind::kConstant;
  c.etype = ElementType::kI64;
  c.literal.etype = ElementType::kI64;
  c.literal.dims = {2, 1};
  c.literal.i64 = {0, 0};
  c.shape = ShapeVector::all_const({2, 1});
  g.ops.push_back(c);
  DhloOp s;
  s.id = "s";
  s.kind = DhloOpKind::kDynamicSlice;
  s.inputs = {"y", "idx", "idx", "idx"};
  s.shape = g.ops[0].shape;
  g.ops.push_back(s);
  auto diags = verify(g);
  REQUIRE(!diags.empty());
  bool found = false;
  for (const auto& d : diags) found = found || d.find("must be rank-1") != std::string::npos;
  CHECK(found);
}

TEST_CASE("verify: dominance violation") {
  DhloGraph g = one_op_graph();
  // Swap definition order: consumer before producer.
  DhloOp late;
  late.id = "z";
  late.kind = DhloOpKind::kTanh;
  late.inputs = {"w"};
  late.shape = g.ops[0].shape;
  DhloOp w;
  w.id = "w";
  w.kind = DhloOpKind::kNeg;
  w.inputs = {"x"};
  w.shape = g.ops[0].shape;
  g.ops.push_back(late);
  g.ops.push_back(w);
  auto diags = verify(g);
  bool found = false;
  for (const auto& d : diags) found = found || d.find("dominance violation") != std::string::npos;
  CHECK(found);
}

TEST_CASE("verify: SSA duplicate definition") {
  DhloGraph g = one_op_graph();
  g.ops.push_back(g.ops[0]);
  auto diags = verify(g);
  bool found = false;
  for (const auto& d : diags) found = found || d.find("SSA") != std::string::npos;
  CHECK(found);
}

TEST_CASE("verify: transpose and reduce attr checks") {
  DhloGraph g = one_op_graph();
  DhloOp t;
  t.id = "t";
  t.kind = DhloOpKind::kTranspose;
  t.inputs = {"y"};
  t.dims_attr = {0, 0};
  t.shape = g.ops[0].shape;
  g.ops.push_back(t);
  DhloOp r;
  r.id = "r";
  r.kind = DhloOpKind::kReduceSum;
  r.inputs = {"y"};
  r.dims_attr = {7};
  r.shape = ShapeVector::all_const({4});
  g.ops.push_back(r);
  auto diags = verify(g);
  CHECK(diags.size() >= 2);
}

TEST_CASE("verify: symbol table covers all referenced symbols") {
  DhloGraph g = one_op_graph();
  g.ops[0].shape.dims[0] = SymbolicDim::Sym(17);
  auto diags = verify(g);
  bool found = false;
  for (const auto& d : diags)
    found = found || d.find("missing from symbol table") != std::string::npos;
  CHECK(found);
}

TEST_CASE("json round-trip is byte-stable on lowered fixtures") {
  for (const char* name : {"chain", "softmax", "split", "matmul", "transformer"}) {
    CAPTURE(name);
    auto fw = disc::testing::load_fixture(name);
    auto [g, cs] = lower_to_dhlo(fw);
    std::string once = to_json(g);
    std::string twice = to_json(dhlo_from_json(once));
    CHECK(once == twice);
  }
}

TEST_CASE("lowered fixtures verify") {
  for (const char* name :
       {"chain", "softmax", "split", "reshape", "matmul", "diamond", "empty", "transformer"}) {
    CAPTURE(name);
    auto fw = disc::testing::load_fixture(name);
    auto [g, cs] = lower_to_dhlo(fw);
    auto diags = verify(g);
    for (const auto& d : diags) CAPTURE(d);
    CHECK(diags.empty());
  }
}

TEST_CASE("textual dump matches the golden softmax IR") {
  auto fw = disc::testing::load_fixture("softmax");
  auto [g, cs] = lower_to_dhlo(fw);
  std::string got = print_text(g);
  std::string want = disc::testing::read_file(std::string(DISC_GOLDEN_DIR) + "/softmax_ir.txt");
  CHECK(got == want);
}

TEST_CASE("json dump matches the golden softmax serialization") {
  auto fw = disc::testing::load_fixture("softmax");
  auto [g, cs] = lower_to_dhlo(fw);
  std::string want =
      disc::testing::read_file(std::string(DISC_GOLDEN_DIR) + "/softmax_dhlo.json");
  CHECK(to_json(g) == want);
}

TEST_CASE("run_pipeline: empty pass list leaves the graph byte-identical") {
  auto fw = disc::testing::load_fixture("softmax");
  auto [g, cs] = lower_to_dhlo(fw);
  std::string before = to_json(g);
  PassState state = run_pipeline({g, cs}, {});
  CHECK(to_json(state.graph) == before);
}

TEST_CASE("run_pipeline: a pass that breaks the graph aborts with its name") {
  auto fw = disc::testing::load_fixture("softmax");
  auto [g, cs] = lower_to_dhlo(fw);
  Pass breaker{"breaker", [](PassState& s) { s.graph.ops[0].inputs = {"nope"}; }};
  CHECK_THROWS_WITH_AS(run_pipeline({g, cs}, {breaker}), doctest::Contains("breaker"),
                       CompileError);
}

TEST_CASE("simplify_broadcast removes provably redundant broadcasts") {
  // Two chained broadcasts whose shapes the add grounds to x's own shape;
  // both disappear in one pass run.
  auto fw = parse_graph(R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 4], "dtype": "f32"}],
    "outputs": ["z"],
    "nodes": [
      {"id": "b1", "op": "Broadcast", "inputs": ["x"],
       "attrs": {"shape": ["S0", 4], "broadcast_dims": [0, 1]}},
      {"id": "b2", "op": "Broadcast", "inputs": ["b1"],
       "attrs": {"shape": ["S0", 4], "broadcast_dims": [0, 1]}},
      {"id": "z", "op": "Add", "inputs": ["b2", "x"]}
    ]
  })");
  auto [g, seed] = lower_to_dhlo(fw);
  ConstraintSet cs = infer(g, seed);
  DhloGraph canon = canonicalize_dims(g, cs);
  simplify_broadcast(canon, cs);
  CHECK(canon.find_op("b1") == nullptr);
  CHECK(canon.find_op("b2") == nullptr);
  CHECK(canon.find_op("z")->inputs == std::vector<std::string>{"x", "x"});
  CHECK(verify(canon).empty());

  // [1,4] -> [S0,4] is not provably an identity and must stay.
  auto fw2 = parse_graph(R"({
    "name": "g",
    "inputs": [
      {"id": "x", "shape": ["S0", 4], "dtype": "f32"},
      {"id": "y", "shape": [1, 4], "dtype": "f32"}
    ],
    "outputs": ["z"],
    "nodes": [
      {"id": "b", "op": "Broadcast", "inputs": ["y"],
       "attrs": {"shape": ["S0", 4], "broadcast_dims": [0, 1]}},
      {"id": "z", "op": "Add", "inputs": ["x", "b"]}
    ]
  })");
  auto [g2, seed2] = lower_to_dhlo(fw2);
  ConstraintSet cs2 = infer(g2, seed2);
  DhloGraph canon2 = canonicalize_dims(g2, cs2);
  simplify_broadcast(canon2, cs2);
  CHECK(canon2.find_op("b") != nullptr);
}
