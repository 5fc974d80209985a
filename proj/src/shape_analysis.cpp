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

#include "disc/shape_analysis.hpp"

#include <algorithm>

#include "disc/error.hpp"

namespace disc {

OpClass op_class(DhloOpKind k) {
  switch (k) {
    case DhloOpKind::kAdd:
    case DhloOpKind::kSub:
    case DhloOpKind::kMul:
    case DhloOpKind::kDiv:
    case DhloOpKind::kMaximum:
      return OpClass::kElementwiseSameShape;
    case DhloOpKind::kExp:
    case DhloOpKind::kTanh:
    case DhloOpKind::kNeg:
      return OpClass::kUnaryShapePreserving;
    case DhloOpKind::kTranspose:
      return OpClass::kTranspose;
    case DhloOpKind::kReduceSum:
    case DhloOpKind::kReduceMax:
      return OpClass::kReduce;
    case DhloOpKind::kMatMul:
      return OpClass::kMatMul;
    case DhloOpKind::kConcat:
      return OpClass::kConcat;
    case DhloOpKind::kDynamicReshape:
      return OpClass::kSizePreservingOnly;
    case DhloOpKind::kDynamicBroadcastInDim:
      return OpClass::kBroadcast;
    case DhloOpKind::kDynamicSlice:
    case DhloOpKind::kDynamicPad:
      return OpClass::kOpaque;
    case DhloOpKind::kShapeOf:
    case DhloOpKind::kExtractDim:
    case DhloOpKind::kScalarArith:
    case DhloOpKind::kConstant:
      return OpClass::kIndexPlumbing;
  }
  throw InternalError("unclassified op kind");
}

ConstraintSet infer(const DhloGraph& g, const ConstraintSet& seed) {
  ConstraintSet cs = seed;
  // Rules only add unions, so one sweep reaches the fixed point via
  // union-find transitivity; a second sweep guards rule interactions.
  for (int round = 0; round < 2; ++round) {
    for (const auto& op : g.ops) {
      if (op.etype == ElementType::kI64) continue;  // plumbing shapes are static
      switch (op_class(op.kind)) {
        case OpClass::kElementwiseSameShape: {
          const ShapeVector& a = g.value_shape(op.inputs[0]);
          const ShapeVector& b = g.value_shape(op.inputs[1]);
          for (int i = 0; i < op.shape.rank(); ++i) {
            cs.union_dims(a.dims[i], b.dims[i], op.id);
            cs.union_dims(a.dims[i], op.shape.dims[i], op.id);
          }
          break;
        }
        case OpClass::kUnaryShapePreserving: {
          const ShapeVector& a = g.value_shape(op.inputs[0]);
          for (int i = 0; i < op.shape.rank(); ++i)
            cs.union_dims(a.dims[i], op.shape.dims[i], op.id);
          break;
        }
        case OpClass::kTranspose: {
          const ShapeVector& a = g.value_shape(op.inputs[0]);
          for (int i = 0; i < op.shape.rank(); ++i)
            cs.union_dims(op.shape.dims[i], a.dims[op.dims_attr[i]], op.id);
          cs.link_size(a, op.shape);
          break;
        }
        case OpClass::kReduce: {
          const ShapeVector& a = g.value_shape(op.inputs[0]);
          std::set<int64_t> axes(op.dims_attr.begin(), op.dims_attr.end());
          int j = 0;
          for (int i = 0; i < a.rank(); ++i) {
            if (axes.count(i)) continue;
            cs.union_dims(op.shape.dims[j], a.dims[i], op.id);
            ++j;
          }
          break;
        }
        case OpClass::kMatMul: {
          const ShapeVector& a = g.value_shape(op.inputs[0]);
          const ShapeVector& b = g.value_shape(op.inputs[1]);
          cs.union_dims(a.dims[1], b.dims[0], op.id);
          cs.union_dims(op.shape.dims[0], a.dims[0], op.id);
          cs.union_dims(op.shape.dims[1], b.dims[1], op.id);
          break;
        }
        case OpClass::kConcat: {
          for (const auto& arg : op.inputs) {
            const ShapeVector& s = g.value_shape(arg);
            for (int i = 0; i < op.shape.rank(); ++i) {
              if (i == op.axis) continue;
              cs.union_dims(op.shape.dims[i], s.dims[i], op.id);
            }
          }
          break;
        }
        case OpClass::kSizePreservingOnly:
          cs.link_size(g.value_shape(op.inputs[0]), op.shape);
          break;
        case OpClass::kBroadcast:
        case OpClass::kOpaque:
        case OpClass::kIndexPlumbing:
          break;
      }
    }
  }
  return cs;
}

DhloGraph canonicalize_dims(const DhloGraph& g, const ConstraintSet& cs) {
  DhloGraph out = g;
  auto rewrite = [&](ShapeVector& s) {
    for (auto& d : s.dims) d = cs.canonical(d);
  };
  for (auto& in : out.inputs) rewrite(in.shape);
  for (auto& op : out.ops) rewrite(op.shape);
  return out;
}

// --- ShapeProgramBuilder ---------------------------------------------------

ShapeProgramBuilder::ShapeProgramBuilder(const DhloGraph& g, const ConstraintSet& cs)
    : g_(g), cs_(cs) {}

int ShapeProgramBuilder::materialize(const ScalarRef& r, const std::string& lit_tensor,
                                     int lit_index) {
  if (!r.is_const) return r.reg;
  if (!lit_tensor.empty()) {
    // Value lives in a constant op's literal: read it at runtime.
    ShapeInstr instr;
    instr.kind = ShapeInstrKind::kReadScalar;
    instr.tensor = lit_tensor;
    instr.index = lit_index;
    instr.dest = fresh_reg();
    program_.instrs.push_back(instr);
    literals_.insert(lit_tensor);
    return instr.dest;
  }
  auto it = const_regs_.find(r.value);
  if (it != const_regs_.end()) return it->second;
  ShapeInstr instr;
  instr.kind = ShapeInstrKind::kLoadConst;
  instr.value = r.value;
  instr.dest = fresh_reg();
  program_.instrs.push_back(instr);
  const_regs_.emplace(r.value, instr.dest);
  return instr.dest;
}

ScalarRef ShapeProgramBuilder::binop(ShapeBinOp op, ScalarRef a, ScalarRef b) {
  if (a.is_const && b.is_const) {
    int64_t x = a.value, y = b.value;
    switch (op) {
      case ShapeBinOp::kAdd: return ScalarRef::Const(x + y);
      case ShapeBinOp::kSub: return ScalarRef::Const(x - y);
      case ShapeBinOp::kMul: return ScalarRef::Const(x * y);
      case ShapeBinOp::kDivFloor:
        if (y == 0) throw CompileError("shape program: division by zero");
        return ScalarRef::Const(x / y);
      case ShapeBinOp::kCeilDiv:
        if (y <= 0) throw CompileError("shape program: ceil_div by non-positive");
        return ScalarRef::Const((x + y - 1) / y);
      case ShapeBinOp::kMax: return ScalarRef::Const(std::max(x, y));
    }
  }
  ShapeInstr instr;
  instr.kind = ShapeInstrKind::kBinOp;
  instr.op = op;
  instr.lhs = materialize(a);
  instr.rhs = materialize(b);
  instr.dest = fresh_reg();
  program_.instrs.push_back(instr);
  return ScalarRef::Reg(instr.dest);
}

ScalarRef ShapeProgramBuilder::dim_ref(const SymbolicDim& d) {
  SymbolicDim c = cs_.canonical(d);
  if (c.is_const()) return ScalarRef::Const(c.size());
  auto it = program_.sym_reg.find(c.sym_id());
  if (it == program_.sym_reg.end())
    throw CompileError("shape program: symbol s" + std::to_string(c.sym_id()) +
                       " referenced before binding");
  return ScalarRef::Reg(it->second);
}

ScalarRef ShapeProgramBuilder::resolve_scalar(const std::string& tensor_id, int index) {
  const DhloOp* op = g_.find_op(tensor_id);
  if (!op)
    throw CompileError("index operand " + tensor_id +
                       " is not computable from graph inputs and constants");
  switch (op->kind) {
    case DhloOpKind::kConstant:
      if (index < 0 || index >= static_cast<int>(op->literal.i64.size()))
        throw CompileError("index operand " + tensor_id + ": element out of range");
      return ScalarRef::Const(op->literal.i64[index]);
    case DhloOpKind::kShapeOf:
      return dim_ref(g_.value_shape(op->inputs[0]).dims[index]);
    case DhloOpKind::kExtractDim:
      return resolve_scalar(op->inputs[0], static_cast<int>(op->index));
    case DhloOpKind::kScalarArith: {
      ScalarRef a = resolve_scalar(op->inputs[0], 0);
      ScalarRef b = resolve_scalar(op->inputs[1], 0);
      ShapeBinOp bk = ShapeBinOp::kAdd;
      switch (op->arith) {
        case ScalarArithKind::kAdd: bk = ShapeBinOp::kAdd; break;
        case ScalarArithKind::kSub: bk = ShapeBinOp::kSub; break;
        case ScalarArithKind::kMul: bk = ShapeBinOp::kMul; break;
        case ScalarArithKind::kDiv: bk = ShapeBinOp::kDivFloor; break;
        case ScalarArithKind::kCeilDiv: bk = ShapeBinOp::kCeilDiv; break;
      }
      // Keep constant-vs-register mixes honest: the constant side reads
      // from its literal when it has one.
      if (a.is_const != b.is_const) {
        auto* c = a.is_const ? &a : &b;
        const std::string& src = a.is_const ? op->inputs[0] : op->inputs[1];
        const DhloOp* producer = g_.find_op(src);
        if (producer && producer->kind == DhloOpKind::kConstant)
          *c = ScalarRef::Reg(materialize(*c, src, 0));
      }
      return binop(bk, a, b);
    }
    case DhloOpKind::kConcat: {
      int64_t offset = index;
      for (const auto& arg : op->inputs) {
        const ShapeVector& s = g_.value_shape(arg);
        int64_t len = s.dims[0].size();
        if (offset < len) return resolve_scalar(arg, static_cast<int>(offset));
        offset -= len;
      }
      throw CompileError("index operand " + tensor_id + ": element out of range");
    }
    default:
      throw CompileError("index operand " + tensor_id + " (" + dhlo_kind_name(op->kind) +
                         ") is not computable from graph inputs and constants");
  }
}

void ShapeProgramBuilder::bind_derived(const DhloOp& op) {
  for (int d = 0; d < op.shape.rank(); ++d) {
    const SymbolicDim& dim = op.shape.dims[d];
    if (!dim.is_sym()) continue;
    SymbolicDim c = cs_.canonical(dim);
    if (c.is_const() || program_.sym_reg.count(c.sym_id())) continue;

    ScalarRef value;
    switch (op.kind) {
      case DhloOpKind::kDynamicSlice: {
        ScalarRef start = resolve_scalar(op.inputs[1], d);
        ScalarRef limit = resolve_scalar(op.inputs[2], d);
        ScalarRef stride = resolve_scalar(op.inputs[3], d);
        ScalarRef extent = binop(ShapeBinOp::kMax, binop(ShapeBinOp::kSub, limit, start),
                                 ScalarRef::Const(0));
        value = binop(ShapeBinOp::kCeilDiv, extent, stride);
        break;
      }
      case DhloOpKind::kDynamicPad: {
        ScalarRef in = dim_ref(g_.value_shape(op.inputs[0]).dims[d]);
        ScalarRef low = resolve_scalar(op.inputs[2], d);
        ScalarRef high = resolve_scalar(op.inputs[3], d);
        ScalarRef interior = resolve_scalar(op.inputs[4], d);
        ScalarRef inner = binop(ShapeBinOp::kMax, binop(ShapeBinOp::kSub, in, ScalarRef::Const(1)),
                                ScalarRef::Const(0));
        value = binop(ShapeBinOp::kAdd, binop(ShapeBinOp::kAdd, low, high),
                      binop(ShapeBinOp::kAdd, in, binop(ShapeBinOp::kMul, inner, interior)));
        break;
      }
      case DhloOpKind::kDynamicReshape:
      case DhloOpKind::kDynamicBroadcastInDim:
        value = resolve_scalar(op.inputs[1], d);
        break;
      case DhloOpKind::kConcat: {
        if (d != op.axis)
          throw CompileError("unbindable symbol s" + std::to_string(c.sym_id()) +
                             " needed by op " + op.id);
        value = ScalarRef::Const(0);
        for (const auto& arg : op.inputs)
          value = binop(ShapeBinOp::kAdd, value, dim_ref(g_.value_shape(arg).dims[d]));
        break;
      }
      default:
        throw CompileError("unbindable symbol s" + std::to_string(c.sym_id()) +
                           " needed by op " + op.id);
    }

    ShapeInstr bind;
    bind.kind = ShapeInstrKind::kBindDim;
    bind.sym = c.sym_id();
    bind.lhs = materialize(value);
    program_.instrs.push_back(bind);
    program_.sym_reg[c.sym_id()] = bind.lhs;
  }
}

void ShapeProgramBuilder::bind_all() {
  // Input-origin classes first, in input order.
  for (size_t i = 0; i < g_.inputs.size(); ++i) {
    const ShapeVector& s = g_.inputs[i].shape;
    for (int d = 0; d < s.rank(); ++d) {
      if (!s.dims[d].is_sym()) continue;
      SymbolicDim c = cs_.canonical(s.dims[d]);
      if (c.is_const() || program_.sym_reg.count(c.sym_id())) continue;
      ShapeInstr read;
      read.kind = ShapeInstrKind::kReadInputDim;
      read.input = static_cast<int>(i);
      read.axis = d;
      read.dest = fresh_reg();
      program_.instrs.push_back(read);
      ShapeInstr bind;
      bind.kind = ShapeInstrKind::kBindDim;
      bind.sym = c.sym_id();
      bind.lhs = read.dest;
      program_.instrs.push_back(bind);
      program_.sym_reg[c.sym_id()] = read.dest;
    }
  }
  // Derived classes in producer order; operand symbols are already bound.
  for (const auto& op : g_.ops) {
    if (op.etype == ElementType::kI64) continue;
    bool any_unbound = false;
    for (const auto& d : op.shape.dims) {
      if (!d.is_sym()) continue;
      SymbolicDim c = cs_.canonical(d);
      if (!c.is_const() && !program_.sym_reg.count(c.sym_id())) any_unbound = true;
    }
    if (any_unbound) bind_derived(op);
  }
}

ShapeProgram emit_shape_program(const DhloGraph& g, const ConstraintSet& cs) {
  ShapeProgramBuilder builder(g, cs);
  builder.bind_all();
  return builder.program();
}

}  // namespace disc
