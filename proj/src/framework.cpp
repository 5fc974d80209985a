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

#include "disc/framework.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "disc/error.hpp"

namespace disc {

using nlohmann::json;

namespace {

struct FwOpInfo {
  FwOpKind kind;
  const char* name;
  int arity;  // -1: variadic (>= 1)
  std::set<std::string> required_attrs;
  std::set<std::string> optional_attrs;
};

const std::vector<FwOpInfo>& op_table() {
  static const std::vector<FwOpInfo> table = {
      {FwOpKind::kAdd, "Add", 2, {}, {}},
      {FwOpKind::kSub, "Sub", 2, {}, {}},
      {FwOpKind::kMul, "Mul", 2, {}, {}},
      {FwOpKind::kDiv, "Div", 2, {}, {}},
      {FwOpKind::kExp, "Exp", 1, {}, {}},
      {FwOpKind::kTanh, "Tanh", 1, {}, {}},
      {FwOpKind::kNeg, "Neg", 1, {}, {}},
      {FwOpKind::kMaximum, "Maximum", 2, {}, {}},
      {FwOpKind::kReduceSum, "ReduceSum", 1, {"axes"}, {}},
      {FwOpKind::kReduceMax, "ReduceMax", 1, {"axes"}, {}},
      {FwOpKind::kTranspose, "Transpose", 1, {"perm"}, {}},
      {FwOpKind::kReshape, "Reshape", 1, {"shape"}, {}},
      {FwOpKind::kBroadcast, "Broadcast", 1, {"shape"}, {"broadcast_dims"}},
      {FwOpKind::kSlice, "Slice", 1, {"starts", "limits", "strides"}, {}},
      {FwOpKind::kPad, "Pad", 1, {"low", "high", "interior", "value"}, {}},
      {FwOpKind::kSplit, "Split", 1, {"num_splits", "axis"}, {}},
      {FwOpKind::kConcat, "Concat", -1, {"axis"}, {}},
      {FwOpKind::kMatMul, "MatMul", 2, {}, {}},
      {FwOpKind::kSoftmax, "Softmax", 1, {}, {}},
  };
  return table;
}

const FwOpInfo* lookup_op(const std::string& name) {
  for (const auto& info : op_table())
    if (name == info.name) return &info;
  return nullptr;
}

[[noreturn]] void fail(const std::string& node, const std::string& msg) {
  throw ValidationError("node " + node + ": " + msg);
}

std::vector<int64_t> int_list(const json& j, const std::string& node, const std::string& key) {
  if (!j.is_array()) fail(node, "attr " + key + " must be an integer list");
  std::vector<int64_t> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) fail(node, "attr " + key + " must be an integer list");
    out.push_back(e.get<int64_t>());
  }
  return out;
}

}  // namespace

const char* fw_op_name(FwOpKind k) {
  for (const auto& info : op_table())
    if (info.kind == k) return info.name;
  return "?";
}

const ShapeVector& FrameworkGraph::shape_of(const std::string& id) const {
  auto it = tensor_shapes.find(id);
  if (it == tensor_shapes.end()) throw InternalError("unknown tensor id: " + id);
  return it->second;
}

bool FrameworkGraph::is_input(const std::string& id) const {
  for (const auto& in : inputs)
    if (in.id == id) return true;
  return false;
}

namespace {

// Shared symbol interning for shape entries in the JSON file.
struct SymbolSpace {
  std::vector<std::string>* names;
  std::map<std::string, int> by_name;

  int named(const std::string& name) {
    auto it = by_name.find(name);
    if (it != by_name.end()) return it->second;
    int id = static_cast<int>(names->size());
    names->push_back(name);
    by_name.emplace(name, id);
    return id;
  }
  int anon(const std::string& hint) {
    int id = static_cast<int>(names->size());
    names->push_back("?" + hint);
    return id;
  }
};

SymbolicDim parse_dim_entry(const json& e, SymbolSpace& syms, const std::string& where) {
  if (e.is_number_integer()) {
    int64_t v = e.get<int64_t>();
    if (v < 0) throw ValidationError(where + ": negative dimension " + std::to_string(v));
    return SymbolicDim::Const(v);
  }
  if (e.is_string()) return SymbolicDim::Sym(syms.named(e.get<std::string>()));
  throw ValidationError(where + ": shape entries must be non-negative ints or symbol strings");
}

// Framework-level shape propagation for one node. Fills node result shapes
// into g.tensor_shapes; emits validation errors for rank/attr violations.
void propagate_node(FrameworkGraph& g, FrameworkNode& n, SymbolSpace& syms) {
  auto in_shape = [&](int i) -> const ShapeVector& { return g.shape_of(n.inputs[i]); };
  auto set_out = [&](int i, ShapeVector s) { g.tensor_shapes[n.outputs[i]] = std::move(s); };

  switch (n.op) {
    case FwOpKind::kAdd:
    case FwOpKind::kSub:
    case FwOpKind::kMul:
    case FwOpKind::kDiv:
    case FwOpKind::kMaximum: {
      const ShapeVector &a = in_shape(0), &b = in_shape(1);
      if (a.rank() != b.rank()) fail(n.id, "rank mismatch");
      ShapeVector out;
      for (int i = 0; i < a.rank(); ++i) {
        const SymbolicDim &da = a.dims[i], &db = b.dims[i];
        if (da.is_const() && db.is_const() && da.size() != db.size())
          fail(n.id, "dim " + std::to_string(i) + " mismatch: " + da.str() + " vs " + db.str());
        out.dims.push_back(da.is_const() ? da : db.is_const() ? db : da);
      }
      set_out(0, out);
      break;
    }
    case FwOpKind::kExp:
    case FwOpKind::kTanh:
    case FwOpKind::kNeg:
      set_out(0, in_shape(0));
      break;
    case FwOpKind::kReduceSum:
    case FwOpKind::kReduceMax: {
      const ShapeVector& a = in_shape(0);
      std::set<int64_t> axes;
      for (int64_t ax : n.attrs.axes) {
        if (ax < 0 || ax >= a.rank()) fail(n.id, "reduce axis out of range");
        if (!axes.insert(ax).second) fail(n.id, "duplicate reduce axis");
      }
      if (axes.empty()) fail(n.id, "empty reduce axes");
      n.attrs.axes.assign(axes.begin(), axes.end());
      ShapeVector out;
      for (int i = 0; i < a.rank(); ++i)
        if (!axes.count(i)) out.dims.push_back(a.dims[i]);
      set_out(0, out);
      break;
    }
    case FwOpKind::kTranspose: {
      const ShapeVector& a = in_shape(0);
      if (static_cast<int>(n.attrs.perm.size()) != a.rank())
        fail(n.id, "perm length != rank");
      std::vector<int64_t> sorted = n.attrs.perm;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < a.rank(); ++i)
        if (sorted[i] != i) fail(n.id, "perm is not a permutation");
      ShapeVector out;
      for (int64_t p : n.attrs.perm) out.dims.push_back(a.dims[p]);
      set_out(0, out);
      break;
    }
    case FwOpKind::kReshape: {
      const ShapeVector& a = in_shape(0);
      if (a.is_static()) {
        bool target_static = true;
        int64_t prod = 1;
        for (const auto& d : n.attrs.target_shape) {
          if (d.is_const())
            prod *= d.size();
          else
            target_static = false;
        }
        if (target_static && prod != a.static_numel())
          fail(n.id, "reshape element count mismatch");
      }
      set_out(0, ShapeVector(n.attrs.target_shape));
      break;
    }
    case FwOpKind::kBroadcast: {
      const ShapeVector& a = in_shape(0);
      ShapeVector out(n.attrs.target_shape);
      if (n.attrs.broadcast_dims.empty()) {
        // Default: right-aligned mapping.
        for (int i = 0; i < a.rank(); ++i)
          n.attrs.broadcast_dims.push_back(out.rank() - a.rank() + i);
      }
      if (static_cast<int>(n.attrs.broadcast_dims.size()) != a.rank())
        fail(n.id, "broadcast_dims length != operand rank");
      for (int i = 0; i < a.rank(); ++i) {
        int64_t bd = n.attrs.broadcast_dims[i];
        if (bd < 0 || bd >= out.rank()) fail(n.id, "broadcast_dims entry out of range");
        if (i > 0 && bd <= n.attrs.broadcast_dims[i - 1])
          fail(n.id, "broadcast_dims must be strictly increasing");
        const SymbolicDim& din = a.dims[i];
        const SymbolicDim& dout = out.dims[bd];
        if (din.is_const() && din.size() != 1 && dout.is_const() && dout.size() != din.size())
          fail(n.id, "broadcast dim " + std::to_string(i) + " incompatible");
      }
      set_out(0, out);
      break;
    }
    case FwOpKind::kSlice: {
      const ShapeVector& a = in_shape(0);
      int r = a.rank();
      if (static_cast<int>(n.attrs.starts.size()) != r ||
          static_cast<int>(n.attrs.limits.size()) != r ||
          static_cast<int>(n.attrs.strides.size()) != r)
        fail(n.id, "starts/limits/strides length != rank");
      ShapeVector out;
      for (int i = 0; i < r; ++i) {
        int64_t st = n.attrs.starts[i], li = n.attrs.limits[i], sd = n.attrs.strides[i];
        if (st < 0) fail(n.id, "slice start < 0");
        if (sd <= 0) fail(n.id, "slice stride <= 0");
        if (a.dims[i].is_const() && li > a.dims[i].size())
          fail(n.id, "slice limit out of range");
        // Constant attrs pin the extent even over a symbolic input dim.
        int64_t extent = std::max<int64_t>(li - st, 0);
        out.dims.push_back(SymbolicDim::Const((extent + sd - 1) / sd));
      }
      set_out(0, out);
      break;
    }
    case FwOpKind::kPad: {
      const ShapeVector& a = in_shape(0);
      int r = a.rank();
      if (static_cast<int>(n.attrs.low.size()) != r ||
          static_cast<int>(n.attrs.high.size()) != r ||
          static_cast<int>(n.attrs.interior.size()) != r)
        fail(n.id, "low/high/interior length != rank");
      ShapeVector out;
      for (int i = 0; i < r; ++i) {
        if (n.attrs.low[i] < 0 || n.attrs.high[i] < 0 || n.attrs.interior[i] < 0)
          fail(n.id, "negative padding");
        if (a.dims[i].is_const()) {
          int64_t in = a.dims[i].size();
          int64_t d = n.attrs.low[i] + n.attrs.high[i] + in +
                      (in > 0 ? (in - 1) * n.attrs.interior[i] : 0);
          out.dims.push_back(SymbolicDim::Const(d));
        } else {
          out.dims.push_back(SymbolicDim::Sym(syms.anon(n.id)));
        }
      }
      set_out(0, out);
      break;
    }
    case FwOpKind::kSplit: {
      const ShapeVector& a = in_shape(0);
      int64_t ns = n.attrs.num_splits, ax = n.attrs.axis;
      if (ns < 2) fail(n.id, "num_splits must be >= 2");
      if (ax < 0 || ax >= a.rank()) fail(n.id, "axis out of range");
      if (static_cast<int64_t>(n.outputs.size()) != ns) fail(n.id, "Split arity mismatch");
      if (a.dims[ax].is_const() && a.dims[ax].size() % ns != 0)
        fail(n.id, "split dim not divisible by num_splits");
      for (int64_t j = 0; j < ns; ++j) {
        ShapeVector out;
        for (int i = 0; i < a.rank(); ++i) {
          if (i == ax) {
            if (a.dims[i].is_const())
              out.dims.push_back(SymbolicDim::Const(a.dims[i].size() / ns));
            else
              out.dims.push_back(SymbolicDim::Sym(syms.anon(n.id)));
          } else {
            out.dims.push_back(a.dims[i]);
          }
        }
        set_out(static_cast<int>(j), out);
      }
      break;
    }
    case FwOpKind::kConcat: {
      const ShapeVector& first = in_shape(0);
      int r = first.rank();
      int64_t ax = n.attrs.axis;
      if (ax < 0 || ax >= r) fail(n.id, "axis out of range");
      ShapeVector out = first;
      bool axis_static = first.dims[ax].is_const();
      int64_t axis_sum = axis_static ? first.dims[ax].size() : 0;
      for (size_t k = 1; k < n.inputs.size(); ++k) {
        const ShapeVector& s = in_shape(static_cast<int>(k));
        if (s.rank() != r) fail(n.id, "concat rank mismatch");
        for (int i = 0; i < r; ++i) {
          if (i == ax) continue;
          if (s.dims[i].is_const() && out.dims[i].is_const() &&
              s.dims[i].size() != out.dims[i].size())
            fail(n.id, "concat non-axis dim mismatch");
          if (out.dims[i].is_sym() && s.dims[i].is_const()) out.dims[i] = s.dims[i];
        }
        if (s.dims[ax].is_const() && axis_static)
          axis_sum += s.dims[ax].size();
        else
          axis_static = false;
      }
      out.dims[ax] = axis_static ? SymbolicDim::Const(axis_sum)
                                 : SymbolicDim::Sym(syms.anon(n.id));
      set_out(0, out);
      break;
    }
    case FwOpKind::kMatMul: {
      const ShapeVector &a = in_shape(0), &b = in_shape(1);
      if (a.rank() != 2 || b.rank() != 2) fail(n.id, "matmul inputs must be rank-2");
      if (a.dims[1].is_const() && b.dims[0].is_const() && a.dims[1].size() != b.dims[0].size())
        fail(n.id, "matmul inner dim mismatch");
      ShapeVector out;
      out.dims = {a.dims[0], b.dims[1]};
      set_out(0, out);
      break;
    }
    case FwOpKind::kSoftmax: {
      const ShapeVector& a = in_shape(0);
      if (a.rank() < 1) fail(n.id, "softmax needs rank >= 1");
      set_out(0, a);
      break;
    }
  }
}

}  // namespace

FrameworkGraph parse_graph(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("graph json must be an object");

  FrameworkGraph g;
  SymbolSpace syms{&g.symbol_names, {}};
  g.name = j.value("name", "graph");

  if (!j.contains("inputs") || !j.contains("outputs") || !j.contains("nodes"))
    throw ValidationError("graph requires inputs, outputs and nodes");

  std::set<std::string> defined;
  for (const auto& in : j["inputs"]) {
    GraphValue v;
    v.id = in.at("id").get<std::string>();
    std::string dtype = in.value("dtype", "f32");
    if (dtype != "f32")
      throw ValidationError("input " + v.id + ": only dtype f32 is supported");
    v.etype = ElementType::kF32;
    for (const auto& e : in.at("shape")) v.shape.dims.push_back(parse_dim_entry(e, syms, "input " + v.id));
    if (!defined.insert(v.id).second)
      throw ValidationError("duplicate tensor id " + v.id);
    g.tensor_shapes[v.id] = v.shape;
    g.inputs.push_back(std::move(v));
  }

  for (const auto& nj : j["nodes"]) {
    FrameworkNode n;
    for (const auto& [key, _] : nj.items()) {
      if (key != "id" && key != "op" && key != "inputs" && key != "attrs" && key != "outputs")
        throw ValidationError("node field " + key + " not recognized");
    }
    n.id = nj.at("id").get<std::string>();
    std::string opname = nj.at("op").get<std::string>();
    const FwOpInfo* info = lookup_op(opname);
    if (!info) fail(n.id, "unsupported op " + opname);
    n.op = info->kind;
    n.inputs = nj.at("inputs").get<std::vector<std::string>>();

    if (info->arity >= 0 && static_cast<int>(n.inputs.size()) != info->arity)
      fail(n.id, opname + " expects " + std::to_string(info->arity) + " inputs");
    if (info->arity < 0 && n.inputs.empty()) fail(n.id, opname + " expects >= 1 inputs");

    // Attr keys are exactly those defined for the op.
    json attrs = nj.value("attrs", json::object());
    for (const auto& [key, _] : attrs.items()) {
      if (!info->required_attrs.count(key) && !info->optional_attrs.count(key))
        fail(n.id, "unknown attr " + key + " for op " + opname);
    }
    for (const auto& key : info->required_attrs)
      if (!attrs.contains(key)) fail(n.id, "missing attr " + key);

    switch (n.op) {
      case FwOpKind::kReduceSum:
      case FwOpKind::kReduceMax:
        n.attrs.axes = int_list(attrs["axes"], n.id, "axes");
        break;
      case FwOpKind::kTranspose:
        n.attrs.perm = int_list(attrs["perm"], n.id, "perm");
        break;
      case FwOpKind::kReshape:
      case FwOpKind::kBroadcast: {
        for (const auto& e : attrs["shape"]) {
          if (e.is_number_integer() && e.get<int64_t>() == -1)
            n.attrs.target_shape.push_back(SymbolicDim::Sym(syms.anon(n.id)));
          else
            n.attrs.target_shape.push_back(parse_dim_entry(e, syms, "node " + n.id));
        }
        if (n.op == FwOpKind::kBroadcast && attrs.contains("broadcast_dims"))
          n.attrs.broadcast_dims = int_list(attrs["broadcast_dims"], n.id, "broadcast_dims");
        break;
      }
      case FwOpKind::kSlice:
        n.attrs.starts = int_list(attrs["starts"], n.id, "starts");
        n.attrs.limits = int_list(attrs["limits"], n.id, "limits");
        n.attrs.strides = int_list(attrs["strides"], n.id, "strides");
        break;
      case FwOpKind::kPad:
        n.attrs.low = int_list(attrs["low"], n.id, "low");
        n.attrs.high = int_list(attrs["high"], n.id, "high");
        n.attrs.interior = int_list(attrs["interior"], n.id, "interior");
        if (!attrs["value"].is_number()) fail(n.id, "pad value must be a number");
        n.attrs.pad_value = attrs["value"].get<float>();
        break;
      case FwOpKind::kSplit:
        if (!attrs["num_splits"].is_number_integer()) fail(n.id, "num_splits must be an int");
        if (!attrs["axis"].is_number_integer()) fail(n.id, "axis must be an int");
        n.attrs.num_splits = attrs["num_splits"].get<int64_t>();
        n.attrs.axis = attrs["axis"].get<int64_t>();
        break;
      case FwOpKind::kConcat:
        if (!attrs["axis"].is_number_integer()) fail(n.id, "axis must be an int");
        n.attrs.axis = attrs["axis"].get<int64_t>();
        break;
      default:
        break;
    }

    // Result tensor ids. Split declares its outputs (or gets derived names);
    // single-output ops define the node id.
    if (nj.contains("outputs")) {
      n.outputs = nj["outputs"].get<std::vector<std::string>>();
      if (n.op != FwOpKind::kSplit && n.outputs.size() != 1)
        fail(n.id, "only Split may declare multiple outputs");
    } else if (n.op == FwOpKind::kSplit) {
      for (int64_t k = 0; k < n.attrs.num_splits; ++k)
        n.outputs.push_back(n.id + ":" + std::to_string(k));
    } else {
      n.outputs.push_back(n.id);
    }
    if (n.op == FwOpKind::kSplit && n.attrs.num_splits >= 2 &&
        static_cast<int64_t>(n.outputs.size()) != n.attrs.num_splits)
      fail(n.id, "Split arity mismatch");

    for (const auto& arg : n.inputs)
      if (!defined.count(arg)) fail(n.id, "undefined tensor " + arg);
    for (const auto& out : n.outputs)
      if (!defined.insert(out).second) fail(n.id, "duplicate tensor id " + out);

    g.nodes.push_back(std::move(n));
    propagate_node(g, g.nodes.back(), syms);
  }

  for (const auto& out : j["outputs"]) {
    std::string id = out.get<std::string>();
    if (!defined.count(id)) throw ValidationError("graph output " + id + " is not defined");
    g.outputs.push_back(id);
  }
  if (g.outputs.empty()) throw ValidationError("graph has no outputs");

  return g;
}

}  // namespace disc
