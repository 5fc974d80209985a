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

#ifndef DISC_DHLO_HPP_
#define DISC_DHLO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "disc/shape.hpp"

namespace disc {

// The dynamic-shape dialect. Shape-bearing attributes are tensor operands:
// dynamic_slice/dynamic_pad take rank-1 i64 index operands, and
// dynamic_broadcast_in_dim/dynamic_reshape take the output shape as a rank-1
// i64 operand. Scalar shape arithmetic (shape_of, extract_dim, scalar_arith)
// lives in the same dialect; scalars are represented as rank-1 [1] tensors so
// concat can assemble shape tensors.
enum class DhloOpKind {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMaximum,
  kExp,
  kTanh,
  kNeg,
  kReduceSum,
  kReduceMax,
  kTranspose,
  kDynamicBroadcastInDim,
  kDynamicReshape,
  kDynamicSlice,
  kDynamicPad,
  kConcat,
  kMatMul,
  kConstant,
  kShapeOf,
  kExtractDim,
  kScalarArith,
};

enum class ScalarArithKind { kAdd, kSub, kMul, kDiv, kCeilDiv };

const char* dhlo_kind_name(DhloOpKind k);
std::optional<DhloOpKind> dhlo_kind_from_name(const std::string& name);
const char* scalar_arith_name(ScalarArithKind k);
std::optional<ScalarArithKind> scalar_arith_from_name(const std::string& name);

// Inline literal for constant ops; dims are always concrete.
struct Literal {
  ElementType etype{ElementType::kF32};
  std::vector<int64_t> dims;
  std::vector<float> f32;
  std::vector<int64_t> i64;

  int64_t numel() const {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return n;
  }
};

struct DhloOp {
  std::string id;
  DhloOpKind kind{DhloOpKind::kAdd};
  std::vector<std::string> inputs;
  ShapeVector shape;  // result shape
  ElementType etype{ElementType::kF32};

  // kind-specific payload
  std::vector<int64_t> dims_attr;  // reduce axes / transpose perm / broadcast_dims
  int64_t axis{0};                 // concat
  int64_t index{0};                // extract_dim
  ScalarArithKind arith{ScalarArithKind::kAdd};
  Literal literal;                 // constant
};

// Where a symbol's runtime value comes from: a graph-input dimension, or a
// dimension of a data-dependent producer op (slice, pad, concat, reshape).
struct SymbolOrigin {
  enum class Kind { kInputDim, kDerived };
  Kind kind{Kind::kInputDim};
  int input{-1};       // kInputDim: graph input index
  int dim{-1};         // kInputDim: dim index; kDerived: result dim index
  std::string op_id;   // kDerived: producing op
};

// SSA op graph in the dynamic-shape dialect; ops are topologically ordered.
struct DhloGraph {
  std::string name;
  std::vector<GraphValue> inputs;
  std::vector<std::string> outputs;
  std::vector<DhloOp> ops;
  std::vector<SymbolOrigin> symbols;  // indexed by symbol id

  int new_symbol(SymbolOrigin origin) {
    symbols.push_back(origin);
    return static_cast<int>(symbols.size()) - 1;
  }

  const DhloOp* find_op(const std::string& id) const {
    for (const auto& op : ops)
      if (op.id == id) return &op;
    return nullptr;
  }
  const GraphValue* find_input(const std::string& id) const {
    for (const auto& in : inputs)
      if (in.id == id) return &in;
    return nullptr;
  }
  // Shape/dtype of any value id (input or op result); throws if unknown.
  const ShapeVector& value_shape(const std::string& id) const;
  ElementType value_etype(const std::string& id) const;
};

// Returns all invariant violations; empty means the graph is valid.
std::vector<std::string> verify(const DhloGraph& g);

// Textual IR: one op per line, `%id = kind(%args) {attrs} : shape`.
std::string print_text(const DhloGraph& g);

// Stable JSON round trip for persistence.
std::string to_json(const DhloGraph& g);
DhloGraph dhlo_from_json(const std::string& text);

bool is_elementwise_binary(DhloOpKind k);
bool is_elementwise_unary(DhloOpKind k);
bool is_reduce(DhloOpKind k);
// shape_of / extract_dim / scalar_arith / constant: host-side index plumbing,
// never launched and never buffered.
bool is_index_plumbing(DhloOpKind k);
// Ops that produce data tensors (one eager launch each).
inline bool is_compute_op(DhloOpKind k) { return !is_index_plumbing(k); }

}  // namespace disc

#endif  // DISC_DHLO_HPP_
