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

#ifndef DISC_FRAMEWORK_HPP_
#define DISC_FRAMEWORK_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "disc/shape.hpp"

namespace disc {

enum class FwOpKind {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kExp,
  kTanh,
  kNeg,
  kMaximum,
  kReduceSum,
  kReduceMax,
  kTranspose,
  kReshape,
  kBroadcast,
  kSlice,
  kPad,
  kSplit,
  kConcat,
  kMatMul,
  kSoftmax,
};

const char* fw_op_name(FwOpKind k);

// Typed, validated attrs. Only the fields defined for the node's op are set.
struct NodeAttrs {
  std::vector<int64_t> axes;            // ReduceSum/ReduceMax
  std::vector<int64_t> perm;            // Transpose
  std::vector<int64_t> starts, limits, strides;  // Slice
  std::vector<int64_t> low, high, interior;      // Pad
  float pad_value{0.0f};                         // Pad
  std::vector<int64_t> broadcast_dims;  // Broadcast (defaulted if absent)
  std::vector<SymbolicDim> target_shape;  // Reshape/Broadcast, over frontend syms
  int64_t num_splits{0};                // Split
  int64_t axis{0};                      // Split/Concat
};

struct FrameworkNode {
  std::string id;
  FwOpKind op{FwOpKind::kAdd};
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // result tensor ids; one entry except Split
  NodeAttrs attrs;
};

// Validated framework-level graph. Shapes use a dense frontend symbol space:
// named symbols (shared by the string name across the file) come first,
// anonymous data-derived dims (split/slice/pad/concat/reshape results) are
// appended during shape propagation.
struct FrameworkGraph {
  std::string name;
  std::vector<GraphValue> inputs;
  std::vector<std::string> outputs;
  std::vector<FrameworkNode> nodes;
  std::vector<std::string> symbol_names;           // per frontend sym id
  std::map<std::string, ShapeVector> tensor_shapes;  // every tensor id

  const ShapeVector& shape_of(const std::string& id) const;
  bool is_input(const std::string& id) const;
};

// Parses and validates per the graph JSON schema. Throws ParseError with
// position info for malformed JSON; ValidationError naming the offending
// node and rule otherwise.
FrameworkGraph parse_graph(const std::string& json_text);

}  // namespace disc

#endif  // DISC_FRAMEWORK_HPP_
