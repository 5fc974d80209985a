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

#include <json.hpp>

#include "disc/dhlo.hpp"
#include "disc/error.hpp"

namespace disc {

using nlohmann::json;

namespace {

json shape_to_json(const ShapeVector& s) {
  json a = json::array();
  for (const auto& d : s.dims) {
    if (d.is_const())
      a.push_back(d.size());
    else
      a.push_back("s" + std::to_string(d.sym_id()));
  }
  return a;
}

ShapeVector shape_from_json(const json& a) {
  ShapeVector s;
  for (const auto& e : a) {
    if (e.is_number_integer())
      s.dims.push_back(SymbolicDim::Const(e.get<int64_t>()));
    else {
      std::string t = e.get<std::string>();
      if (t.empty() || t[0] != 's') throw ParseError("bad symbolic dim: " + t);
      s.dims.push_back(SymbolicDim::Sym(std::stoi(t.substr(1))));
    }
  }
  return s;
}

}  // namespace

std::string to_json(const DhloGraph& g) {
  json j;
  j["name"] = g.name;
  json inputs = json::array();
  for (const auto& in : g.inputs) {
    inputs.push_back({{"id", in.id},
                      {"shape", shape_to_json(in.shape)},
                      {"dtype", element_type_name(in.etype)}});
  }
  j["inputs"] = inputs;
  j["outputs"] = g.outputs;
  json ops = json::array();
  for (const auto& op : g.ops) {
    json o;
    o["id"] = op.id;
    o["kind"] = dhlo_kind_name(op.kind);
    o["inputs"] = op.inputs;
    o["shape"] = shape_to_json(op.shape);
    o["dtype"] = element_type_name(op.etype);
    if (!op.dims_attr.empty()) o["dims"] = op.dims_attr;
    if (op.kind == DhloOpKind::kConcat) o["axis"] = op.axis;
    if (op.kind == DhloOpKind::kExtractDim) o["index"] = op.index;
    if (op.kind == DhloOpKind::kScalarArith) o["arith"] = scalar_arith_name(op.arith);
    if (op.kind == DhloOpKind::kConstant) {
      json lit;
      lit["dtype"] = element_type_name(op.literal.etype);
      lit["dims"] = op.literal.dims;
      if (op.literal.etype == ElementType::kF32)
        lit["f32"] = op.literal.f32;
      else
        lit["i64"] = op.literal.i64;
      o["literal"] = lit;
    }
    ops.push_back(o);
  }
  j["ops"] = ops;
  json syms = json::array();
  for (const auto& s : g.symbols) {
    json e;
    e["kind"] = s.kind == SymbolOrigin::Kind::kInputDim ? "input_dim" : "derived";
    if (s.kind == SymbolOrigin::Kind::kInputDim) {
      e["input"] = s.input;
      e["dim"] = s.dim;
    } else {
      e["op"] = s.op_id;
      e["dim"] = s.dim;
    }
    syms.push_back(e);
  }
  j["symbols"] = syms;
  return j.dump(2);
}

DhloGraph dhlo_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dhlo json: ") + e.what());
  }
  DhloGraph g;
  g.name = j.value("name", "");
  for (const auto& in : j.at("inputs")) {
    GraphValue v;
    v.id = in.at("id").get<std::string>();
    v.shape = shape_from_json(in.at("shape"));
    v.etype = in.value("dtype", "f32") == "f32" ? ElementType::kF32 : ElementType::kI64;
    g.inputs.push_back(v);
  }
  g.outputs = j.at("outputs").get<std::vector<std::string>>();
  for (const auto& o : j.at("ops")) {
    DhloOp op;
    op.id = o.at("id").get<std::string>();
    auto kind = dhlo_kind_from_name(o.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown dhlo op kind: " + o.at("kind").get<std::string>());
    op.kind = *kind;
    op.inputs = o.at("inputs").get<std::vector<std::string>>();
    op.shape = shape_from_json(o.at("shape"));
    op.etype = o.value("dtype", "f32") == "f32" ? ElementType::kF32 : ElementType::kI64;
    if (o.contains("dims")) op.dims_attr = o["dims"].get<std::vector<int64_t>>();
    op.axis = o.value("axis", int64_t{0});
    op.index = o.value("index", int64_t{0});
    if (o.contains("arith")) {
      auto a = scalar_arith_from_name(o["arith"].get<std::string>());
      if (!a) throw ParseError("unknown scalar_arith kind");
      op.arith = *a;
    }
    if (o.contains("literal")) {
      const auto& lit = o["literal"];
      op.literal.etype =
          lit.value("dtype", "f32") == "f32" ? ElementType::kF32 : ElementType::kI64;
      op.literal.dims = lit.at("dims").get<std::vector<int64_t>>();
      if (op.literal.etype == ElementType::kF32)
        op.literal.f32 = lit.at("f32").get<std::vector<float>>();
      else
        op.literal.i64 = lit.at("i64").get<std::vector<int64_t>>();
    }
    g.ops.push_back(op);
  }
  for (const auto& s : j.value("symbols", json::array())) {
    SymbolOrigin so;
    if (s.at("kind") == "input_dim") {
      so.kind = SymbolOrigin::Kind::kInputDim;
      so.input = s.at("input").get<int>();
      so.dim = s.at("dim").get<int>();
    } else {
      so.kind = SymbolOrigin::Kind::kDerived;
      so.op_id = s.at("op").get<std::string>();
      so.dim = s.at("dim").get<int>();
    }
    g.symbols.push_back(so);
  }
  return g;
}

}  // namespace disc
