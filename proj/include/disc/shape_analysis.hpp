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

#ifndef DISC_SHAPE_ANALYSIS_HPP_
#define DISC_SHAPE_ANALYSIS_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "disc/constraint_set.hpp"
#include "disc/dhlo.hpp"

namespace disc {

// Shape-propagation classes; ops in one class share fusion and inference
// behavior, so rules are stated once per class. The table is total.
enum class OpClass {
  kElementwiseSameShape,   // add, sub, mul, div, maximum
  kUnaryShapePreserving,   // exp, tanh, neg
  kTranspose,
  kReduce,
  kMatMul,
  kConcat,
  kSizePreservingOnly,     // dynamic_reshape
  kBroadcast,              // dynamic_broadcast_in_dim
  kOpaque,                 // dynamic_slice, dynamic_pad -> fresh symbols
  kIndexPlumbing,          // shape_of, extract_dim, scalar_arith, constant
};

OpClass op_class(DhloOpKind k);

// Fixed point of every op's propagation rule over the seed constraints.
// Throws CompileError (naming the op) when two distinct constants unify.
ConstraintSet infer(const DhloGraph& g, const ConstraintSet& seed);

// Rewrites every ShapeVector to canonical dims: symbols proven equal to a
// constant fold to Const, others collapse onto the class representative.
DhloGraph canonicalize_dims(const DhloGraph& g, const ConstraintSet& cs);

// --- runtime shape program ----------------------------------------------

enum class ShapeInstrKind { kReadInputDim, kReadScalar, kLoadConst, kBinOp, kBindDim };
enum class ShapeBinOp { kAdd, kSub, kMul, kDivFloor, kCeilDiv, kMax };

struct ShapeInstr {
  ShapeInstrKind kind{ShapeInstrKind::kLoadConst};
  int dest{-1};        // register written (all kinds except BindDim)
  int input{-1};       // ReadInputDim: graph input index
  int axis{0};         // ReadInputDim: dim index
  std::string tensor;  // ReadScalar: constant tensor id (plan literal pool)
  int index{0};        // ReadScalar: element index
  int64_t value{0};    // LoadConst
  ShapeBinOp op{ShapeBinOp::kAdd};
  int lhs{-1}, rhs{-1};  // BinOp operands; BindDim uses lhs as source reg
  int sym{-1};           // BindDim: symbol bound
};

struct ShapeProgram {
  std::vector<ShapeInstr> instrs;
  int num_regs{0};
  std::map<int, int> sym_reg;  // canonical symbol -> register
  bool empty() const { return instrs.empty(); }
};

// A runtime scalar: either a compile-time constant or a shape register.
struct ScalarRef {
  bool is_const{true};
  int64_t value{0};
  int reg{-1};

  static ScalarRef Const(int64_t v) { return {true, v, -1}; }
  static ScalarRef Reg(int r) { return {false, 0, r}; }
};

// Builds the shape program: binds every runtime-live symbol (one
// representative per union-find class, all members alias it) and resolves
// index-operand scalars into registers or folded constants. Codegen keeps
// the builder around to resolve kernel operand references; everything lands
// in one program evaluated by a single EvalShape per run.
class ShapeProgramBuilder {
 public:
  ShapeProgramBuilder(const DhloGraph& g, const ConstraintSet& cs);

  // Emits bindings for all input-origin and derived symbols.
  void bind_all();

  // Scalar value of element `index` of an index-operand tensor.
  ScalarRef resolve_scalar(const std::string& tensor_id, int index);

  // Scalar value of one (canonicalized) dim.
  ScalarRef dim_ref(const SymbolicDim& d);

  ScalarRef binop(ShapeBinOp op, ScalarRef a, ScalarRef b);

  const ShapeProgram& program() const { return program_; }
  const std::set<std::string>& referenced_literals() const { return literals_; }

 private:
  int fresh_reg() { return program_.num_regs++; }
  int materialize(const ScalarRef& r, const std::string& lit_tensor = "", int lit_index = 0);
  void bind_derived(const DhloOp& op);

  const DhloGraph& g_;
  const ConstraintSet& cs_;
  ShapeProgram program_;
  std::set<std::string> literals_;
  std::map<int64_t, int> const_regs_;
};

// The spec-level operation: bindings only.
ShapeProgram emit_shape_program(const DhloGraph& g, const ConstraintSet& cs);

}  // namespace disc

#endif  // DISC_SHAPE_ANALYSIS_HPP_
