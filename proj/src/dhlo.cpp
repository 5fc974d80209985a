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

#include "disc/dhlo.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "disc/error.hpp"

namespace disc {

namespace {

struct KindName {
  DhloOpKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {DhloOpKind::kAdd, "add"},
    {DhloOpKind::kSub, "sub"},
    {DhloOpKind::kMul, "mul"},
    {DhloOpKind::kDiv, "div"},
    {DhloOpKind::kMaximum, "maximum"},
    {DhloOpKind::kExp, "exp"},
    {DhloOpKind::kTanh, "tanh"},
    {DhloOpKind::kNeg, "neg"},
    {DhloOpKind::kReduceSum, "reduce_sum"},
    {DhloOpKind::kReduceMax, "reduce_max"},
    {DhloOpKind::kTranspose, "transpose"},
    {DhloOpKind::kDynamicBroadcastInDim, "dynamic_broadcast_in_dim"},
    {DhloOpKind::kDynamicReshape, "dynamic_reshape"},
    {DhloOpKind::kDynamicSlice, "dynamic_slice"},
    {DhloOpKind::kDynamicPad, "dynamic_pad"},
    {DhloOpKind::kConcat, "concat"},
    {DhloOpKind::kMatMul, "matmul"},
    {DhloOpKind::kConstant, "constant"},
    {DhloOpKind::kShapeOf, "shape_of"},
    {DhloOpKind::kExtractDim, "extract_dim"},
    {DhloOpKind::kScalarArith, "scalar_arith"},
};

constexpr const char* kArithNames[] = {"add", "sub", "mul", "div", "ceil_div"};

}  // namespace

const char* dhlo_kind_name(DhloOpKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "?";
}

std::optional<DhloOpKind> dhlo_kind_from_name(const std::string& name) {
  for (const auto& kn : kKindNames)
    if (name == kn.name) return kn.kind;
  return std::nullopt;
}

const char* scalar_arith_name(ScalarArithKind k) {
  return kArithNames[static_cast<int>(k)];
}

std::optional<ScalarArithKind> scalar_arith_from_name(const std::string& name) {
  for (int i = 0; i < 5; ++i)
    if (name == kArithNames[i]) return static_cast<ScalarArithKind>(i);
  return std::nullopt;
}

bool is_elementwise_binary(DhloOpKind k) {
  switch (k) {
    case DhloOpKind::kAdd:
    case DhloOpKind::kSub:
    case DhloOpKind::kMul:
    case DhloOpKind::kDiv:
    case DhloOpKind::kMaximum:
      return true;
    default:
      return false;
  }
}

bool is_elementwise_unary(DhloOpKind k) {
  switch (k) {
    case DhloOpKind::kExp:
    case DhloOpKind::kTanh:
    case DhloOpKind::kNeg:
      return true;
    default:
      return false;
  }
}

bool is_reduce(DhloOpKind k) {
  return k == DhloOpKind::kReduceSum || k == DhloOpKind::kReduceMax;
}

bool is_index_plumbing(DhloOpKind k) {
  switch (k) {
    case DhloOpKind::kShapeOf:
    case DhloOpKind::kExtractDim:
    case DhloOpKind::kScalarArith:
    case DhloOpKind::kConstant:
      return true;
    default:
      return false;
  }
}

const ShapeVector& DhloGraph::value_shape(const std::string& id) const {
  if (const GraphValue* in = find_input(id)) return in->shape;
  if (const DhloOp* op = find_op(id)) return op->shape;
  throw InternalError("unknown value id: " + id);
}

ElementType DhloGraph::value_etype(const std::string& id) const {
  if (const GraphValue* in = find_input(id)) return in->etype;
  if (const DhloOp* op = find_op(id)) return op->etype;
  throw InternalError("unknown value id: " + id);
}

namespace {

bool const_rank1_len(const DhloGraph& g, const std::string& id, int64_t* len) {
  const ShapeVector& s = g.value_shape(id);
  if (s.rank() != 1 || !s.dims[0].is_const()) return false;
  *len = s.dims[0].size();
  return true;
}

}  // namespace

std::vector<std::string> verify(const DhloGraph& g) {
  std::vector<std::string> diags;
  auto diag = [&](const std::string& where, const std::string& msg) {
    diags.push_back(where + ": " + msg);
  };

  std::set<std::string> defined;
  for (const auto& in : g.inputs) {
    if (!defined.insert(in.id).second) diag(in.id, "duplicate input id");
  }

  int num_syms = static_cast<int>(g.symbols.size());
  auto check_shape_syms = [&](const std::string& where, const ShapeVector& s) {
    for (const auto& d : s.dims)
      if (d.is_sym() && d.sym_id() >= num_syms)
        diag(where, "symbol s" + std::to_string(d.sym_id()) + " missing from symbol table");
  };
  for (const auto& in : g.inputs) check_shape_syms(in.id, in.shape);

  for (const auto& op : g.ops) {
    if (defined.count(op.id)) {
      diag(op.id, "duplicate definition (SSA violation)");
      continue;
    }
    for (const auto& arg : op.inputs) {
      if (!defined.count(arg)) {
        bool exists = g.find_op(arg) != nullptr || g.find_input(arg) != nullptr;
        diag(op.id, exists ? ("dominance violation: uses %" + arg + " before definition")
                           : ("uses undefined tensor " + arg));
      }
    }
    defined.insert(op.id);
    check_shape_syms(op.id, op.shape);

    auto arity = [&](size_t n) {
      if (op.inputs.size() != n)
        diag(op.id, std::string(dhlo_kind_name(op.kind)) + " expects " + std::to_string(n) +
                        " operands, got " + std::to_string(op.inputs.size()));
      return op.inputs.size() == n;
    };
    auto operand_ok = [&](const std::string& id) {
      return g.find_op(id) != nullptr || g.find_input(id) != nullptr;
    };
    auto rank_of = [&](const std::string& id) { return g.value_shape(id).rank(); };
    auto etype_of = [&](const std::string& id) { return g.value_etype(id); };
    // Index operands: rank-1 i64 tensors with a compile-time-constant length.
    auto check_index_operand = [&](const std::string& id, int64_t want_len, const char* role) {
      if (!operand_ok(id)) return;
      if (etype_of(id) != ElementType::kI64) {
        diag(op.id, std::string(role) + " operand must be i64");
        return;
      }
      const ShapeVector& s = g.value_shape(id);
      if (s.rank() != 1) {
        diag(op.id, std::string(role) + " index operand must be rank-1");
        return;
      }
      int64_t len = 0;
      if (!const_rank1_len(g, id, &len)) {
        diag(op.id, std::string(role) + " operand length must be a compile-time constant");
        return;
      }
      if (want_len >= 0 && len != want_len)
        diag(op.id, std::string(role) + " operand length " + std::to_string(len) +
                        " != expected " + std::to_string(want_len));
    };

    bool operands_known = true;
    for (const auto& arg : op.inputs) operands_known = operands_known && operand_ok(arg);
    if (!operands_known) continue;

    switch (op.kind) {
      case DhloOpKind::kAdd:
      case DhloOpKind::kSub:
      case DhloOpKind::kMul:
      case DhloOpKind::kDiv:
      case DhloOpKind::kMaximum:
        if (arity(2)) {
          if (rank_of(op.inputs[0]) != rank_of(op.inputs[1]) ||
              rank_of(op.inputs[0]) != op.shape.rank())
            diag(op.id, "elementwise rank mismatch");
        }
        break;
      case DhloOpKind::kExp:
      case DhloOpKind::kTanh:
      case DhloOpKind::kNeg:
        if (arity(1) && rank_of(op.inputs[0]) != op.shape.rank())
          diag(op.id, "elementwise rank mismatch");
        break;
      case DhloOpKind::kReduceSum:
      case DhloOpKind::kReduceMax:
        if (arity(1)) {
          int r = rank_of(op.inputs[0]);
          if (op.dims_attr.empty()) diag(op.id, "reduce with empty axes");
          for (int64_t a : op.dims_attr)
            if (a < 0 || a >= r) diag(op.id, "reduce axis out of range");
          if (op.shape.rank() != r - static_cast<int>(op.dims_attr.size()))
            diag(op.id, "reduce result rank mismatch");
        }
        break;
      case DhloOpKind::kTranspose:
        if (arity(1)) {
          int r = rank_of(op.inputs[0]);
          if (static_cast<int>(op.dims_attr.size()) != r) {
            diag(op.id, "transpose permutation length mismatch");
          } else {
            std::vector<int64_t> perm = op.dims_attr;
            std::sort(perm.begin(), perm.end());
            for (int i = 0; i < r; ++i)
              if (perm[i] != i) {
                diag(op.id, "transpose permutation is not a permutation");
                break;
              }
          }
        }
        break;
      case DhloOpKind::kDynamicBroadcastInDim:
        if (arity(2)) {
          check_index_operand(op.inputs[1], op.shape.rank(), "shape");
          if (static_cast<int>(op.dims_attr.size()) != rank_of(op.inputs[0]))
            diag(op.id, "broadcast_dims length != operand rank");
          for (int64_t d : op.dims_attr)
            if (d < 0 || d >= op.shape.rank()) diag(op.id, "broadcast_dims entry out of range");
        }
        break;
      case DhloOpKind::kDynamicReshape:
        if (arity(2)) check_index_operand(op.inputs[1], op.shape.rank(), "shape");
        break;
      case DhloOpKind::kDynamicSlice:
        if (arity(4)) {
          int r = rank_of(op.inputs[0]);
          check_index_operand(op.inputs[1], r, "start_indices");
          check_index_operand(op.inputs[2], r, "limit_indices");
          check_index_operand(op.inputs[3], r, "strides");
          if (op.shape.rank() != r) diag(op.id, "slice result rank mismatch");
        }
        break;
      case DhloOpKind::kDynamicPad:
        if (arity(5)) {
          int r = rank_of(op.inputs[0]);
          if (rank_of(op.inputs[1]) != 0) diag(op.id, "pad value must be scalar");
          check_index_operand(op.inputs[2], r, "edge_padding_low");
          check_index_operand(op.inputs[3], r, "edge_padding_high");
          check_index_operand(op.inputs[4], r, "interior_padding");
          if (op.shape.rank() != r) diag(op.id, "pad result rank mismatch");
        }
        break;
      case DhloOpKind::kConcat: {
        if (op.inputs.empty()) {
          diag(op.id, "concat with no operands");
          break;
        }
        int r = rank_of(op.inputs[0]);
        for (const auto& arg : op.inputs)
          if (rank_of(arg) != r) diag(op.id, "concat rank mismatch");
        if (op.axis < 0 || op.axis >= r) diag(op.id, "concat axis out of range");
        break;
      }
      case DhloOpKind::kMatMul:
        if (arity(2)) {
          if (rank_of(op.inputs[0]) != 2 || rank_of(op.inputs[1]) != 2)
            diag(op.id, "matmul inputs must be rank-2");
          else {
            const auto& a = g.value_shape(op.inputs[0]);
            const auto& b = g.value_shape(op.inputs[1]);
            if (a.dims[1].is_const() && b.dims[0].is_const() &&
                a.dims[1].size() != b.dims[0].size())
              diag(op.id, "matmul inner dims do not unify");
          }
        }
        break;
      case DhloOpKind::kConstant: {
        arity(0);
        int64_t len = op.etype == ElementType::kF32 ? static_cast<int64_t>(op.literal.f32.size())
                                                    : static_cast<int64_t>(op.literal.i64.size());
        if (len != op.literal.numel()) diag(op.id, "constant literal length mismatch");
        if (op.literal.etype != op.etype) diag(op.id, "constant literal dtype mismatch");
        break;
      }
      case DhloOpKind::kShapeOf:
        if (arity(1)) {
          if (op.etype != ElementType::kI64) diag(op.id, "shape_of result must be i64");
          if (op.shape.rank() != 1 || !op.shape.dims[0].is_const() ||
              op.shape.dims[0].size() != rank_of(op.inputs[0]))
            diag(op.id, "shape_of result must be [operand rank]");
        }
        break;
      case DhloOpKind::kExtractDim:
        if (arity(1)) {
          int64_t len = 0;
          if (!const_rank1_len(g, op.inputs[0], &len) || etype_of(op.inputs[0]) != ElementType::kI64)
            diag(op.id, "extract_dim operand must be a constant-length rank-1 i64 tensor");
          else if (op.index < 0 || op.index >= len)
            diag(op.id, "extract_dim index out of range");
        }
        break;
      case DhloOpKind::kScalarArith:
        if (arity(2)) {
          int64_t len = 0;
          for (const auto& arg : op.inputs)
            if (!const_rank1_len(g, arg, &len) || len != 1 ||
                etype_of(arg) != ElementType::kI64)
              diag(op.id, "scalar_arith operands must be [1] i64 tensors");
        }
        break;
    }
  }

  for (const auto& out : g.outputs)
    if (!defined.count(out)) diag(out, "graph output is not defined");

  return diags;
}

std::string print_text(const DhloGraph& g) {
  std::ostringstream os;
  os << "graph " << g.name << " {\n";
  for (const auto& in : g.inputs)
    os << "  input %" << in.id << " : " << in.shape.str() << "x"
       << element_type_name(in.etype) << "\n";
  for (const auto& op : g.ops) {
    os << "  %" << op.id << " = " << dhlo_kind_name(op.kind) << "(";
    for (size_t i = 0; i < op.inputs.size(); ++i) {
      if (i) os << ", ";
      os << "%" << op.inputs[i];
    }
    os << ")";
    switch (op.kind) {
      case DhloOpKind::kReduceSum:
      case DhloOpKind::kReduceMax: {
        os << " {axes=[";
        for (size_t i = 0; i < op.dims_attr.size(); ++i)
          os << (i ? "," : "") << op.dims_attr[i];
        os << "]}";
        break;
      }
      case DhloOpKind::kTranspose: {
        os << " {perm=[";
        for (size_t i = 0; i < op.dims_attr.size(); ++i)
          os << (i ? "," : "") << op.dims_attr[i];
        os << "]}";
        break;
      }
      case DhloOpKind::kDynamicBroadcastInDim: {
        os << " {broadcast_dims=[";
        for (size_t i = 0; i < op.dims_attr.size(); ++i)
          os << (i ? "," : "") << op.dims_attr[i];
        os << "]}";
        break;
      }
      case DhloOpKind::kConcat:
        os << " {axis=" << op.axis << "}";
        break;
      case DhloOpKind::kExtractDim:
        os << " {index=" << op.index << "}";
        break;
      case DhloOpKind::kScalarArith:
        os << " {" << scalar_arith_name(op.arith) << "}";
        break;
      case DhloOpKind::kConstant: {
        os << " {";
        if (op.etype == ElementType::kF32) {
          os << "f32=[";
          for (size_t i = 0; i < op.literal.f32.size() && i < 8; ++i)
            os << (i ? "," : "") << op.literal.f32[i];
          if (op.literal.f32.size() > 8) os << ",...";
        } else {
          os << "i64=[";
          for (size_t i = 0; i < op.literal.i64.size() && i < 8; ++i)
            os << (i ? "," : "") << op.literal.i64[i];
          if (op.literal.i64.size() > 8) os << ",...";
        }
        os << "]}";
        break;
      }
      default:
        break;
    }
    os << " : " << op.shape.str() << "x" << element_type_name(op.etype) << "\n";
  }
  os << "  outputs:";
  for (const auto& out : g.outputs) os << " %" << out;
  os << "\n}\n";
  return os.str();
}

}  // namespace disc
