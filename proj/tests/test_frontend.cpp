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

#include "disc/error.hpp"
#include "disc/framework.hpp"
#include "testutil.hpp"

using namespace disc;

namespace {

FrameworkGraph parse(const std::string& text) { return parse_graph(text); }

const char* kMinimalAdd = R"({
  "name": "g",
  "inputs": [
    {"id": "a", "shape": ["S0", 4], "dtype": "f32"},
    {"id": "b", "shape": ["S0", 4], "dtype": "f32"}
  ],
  "outputs": ["c"],
  "nodes": [{"id": "c", "op": "Add", "inputs": ["a", "b"]}]
})";

}  // namespace

TEST_CASE("parse: minimal well-formed add graph") {
  FrameworkGraph g = parse(kMinimalAdd);
  CHECK(g.nodes.size() == 1);
  CHECK(g.inputs.size() == 2);
  CHECK(g.outputs.size() == 1);
  // Identical symbol strings intern to one symbol.
  CHECK(g.inputs[0].shape.dims[0].sym_id() == g.inputs[1].shape.dims[0].sym_id());
  CHECK(g.shape_of("c").rank() == 2);
}

TEST_CASE("parse: undefined tensor is rejected") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "a", "shape": [4], "dtype": "f32"}],
    "outputs": ["b"],
    "nodes": [{"id": "b", "op": "Exp", "inputs": ["x"]}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("undefined tensor x"), ValidationError);
}

TEST_CASE("parse: split arity mismatch") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 8], "dtype": "f32"}],
    "outputs": ["s0"],
    "nodes": [{"id": "s", "op": "Split", "inputs": ["x"],
               "attrs": {"num_splits": 2, "axis": 1},
               "outputs": ["s0", "s1", "s2"]}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("Split arity mismatch"), ValidationError);
}

TEST_CASE("parse: split attrs validated") {
  const char* bad_splits = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 8], "dtype": "f32"}],
    "outputs": ["s:0"],
    "nodes": [{"id": "s", "op": "Split", "inputs": ["x"],
               "attrs": {"num_splits": 1, "axis": 1}}]
  })";
  CHECK_THROWS_AS(parse(bad_splits), ValidationError);

  const char* bad_axis = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 8], "dtype": "f32"}],
    "outputs": ["s:0"],
    "nodes": [{"id": "s", "op": "Split", "inputs": ["x"],
               "attrs": {"num_splits": 2, "axis": 5}}]
  })";
  CHECK_THROWS_AS(parse(bad_axis), ValidationError);

  const char* indivisible = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": ["S0", 7], "dtype": "f32"}],
    "outputs": ["s:0"],
    "nodes": [{"id": "s", "op": "Split", "inputs": ["x"],
               "attrs": {"num_splits": 2, "axis": 1}}]
  })";
  CHECK_THROWS_AS(parse(indivisible), ValidationError);
}

TEST_CASE("parse: unknown attr keys are rejected") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [4], "dtype": "f32"}],
    "outputs": ["y"],
    "nodes": [{"id": "y", "op": "Exp", "inputs": ["x"], "attrs": {"axis": 0}}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("unknown attr"), ValidationError);
}

TEST_CASE("parse: duplicate tensor id") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [4], "dtype": "f32"}],
    "outputs": ["x"],
    "nodes": [{"id": "x", "op": "Exp", "inputs": ["x"]}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("duplicate tensor id"), ValidationError);
}

TEST_CASE("parse: unsupported op named in the error") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [4], "dtype": "f32"}],
    "outputs": ["y"],
    "nodes": [{"id": "y", "op": "Conv2D", "inputs": ["x"]}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("Conv2D"), ValidationError);
}

TEST_CASE("parse: malformed json reports a parse error") {
  CHECK_THROWS_AS(parse("{\"name\": "), ParseError);
}

TEST_CASE("parse: rank mismatch in elementwise op") {
  const char* text = R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": ["S0", 4], "dtype": "f32"},
      {"id": "b", "shape": [4], "dtype": "f32"}
    ],
    "outputs": ["c"],
    "nodes": [{"id": "c", "op": "Add", "inputs": ["a", "b"]}]
  })";
  CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("rank mismatch"), ValidationError);
}

TEST_CASE("parse: const dim conflict in elementwise op") {
  const char* text = R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": [3, 4], "dtype": "f32"},
      {"id": "b", "shape": [5, 4], "dtype": "f32"}
    ],
    "outputs": ["c"],
    "nodes": [{"id": "c", "op": "Add", "inputs": ["a", "b"]}]
  })";
  CHECK_THROWS_AS(parse(text), ValidationError);
}

TEST_CASE("parse: only f32 inputs") {
  const char* text = R"({
    "name": "g",
    "inputs": [{"id": "x", "shape": [4], "dtype": "i64"}],
    "outputs": ["x"],
    "nodes": []
  })";
  CHECK_THROWS_AS(parse(text), ValidationError);
}

TEST_CASE("parse: shape propagation through matmul, transpose, reduce") {
  const char* text = R"({
    "name": "g",
    "inputs": [
      {"id": "a", "shape": ["S0", 6], "dtype": "f32"},
      {"id": "b", "shape": [6, "S1"], "dtype": "f32"}
    ],
    "outputs": ["r"],
    "nodes": [
      {"id": "m", "op": "MatMul", "inputs": ["a", "b"]},
      {"id": "t", "op": "Transpose", "inputs": ["m"], "attrs": {"perm": [1, 0]}},
      {"id": "r", "op": "ReduceSum", "inputs": ["t"], "attrs": {"axes": [1]}}
    ]
  })";
  FrameworkGraph g = parse(text);
  CHECK(g.shape_of("m").dims[0].is_sym());
  CHECK(g.shape_of("t").dims[1].is_sym());
  CHECK(g.shape_of("t").dims[0] == g.shape_of("m").dims[1]);
  CHECK(g.shape_of("r").rank() == 1);
}

TEST_CASE("parse: all fixtures load and validate") {
  for (const char* name :
       {"chain", "softmax", "split", "reshape", "matmul", "diamond", "empty", "transformer"}) {
    CAPTURE(name);
    CHECK_NOTHROW(disc::testing::load_fixture(name));
  }
}

TEST_CASE("parse: random graphs are valid by construction") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    disc::testing::RandomGraphGen gen(seed);
    CHECK_NOTHROW(gen.generate());
  }
}
