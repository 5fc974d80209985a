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

#ifndef DISC_INTERPRETER_HPP_
#define DISC_INTERPRETER_HPP_

#include <map>
#include <string>
#include <vector>

#include "disc/dhlo.hpp"
#include "disc/framework.hpp"
#include "disc/tensor.hpp"

namespace disc {

// Eager, node-by-node oracle. One "launch" per compute node; intentionally
// unoptimized so it doubles as the launch-count and peak-memory baseline.
struct EagerStats {
  int64_t op_count{0};    // compute ops executed (index plumbing excluded)
  int64_t peak_bytes{0};  // refcounted high-water over compute outputs
};

using Binding = std::map<std::string, ConcreteTensor>;

std::vector<ConcreteTensor> eval_eager(const FrameworkGraph& g, const Binding& inputs,
                                       EagerStats* stats = nullptr);
std::vector<ConcreteTensor> eval_eager(const DhloGraph& g, const Binding& inputs,
                                       EagerStats* stats = nullptr);

// Evaluates one DHLO op given concrete operands (shared dynamic-op
// semantics; also used directly by tests).
ConcreteTensor eval_dhlo_op(const DhloOp& op, const std::vector<const ConcreteTensor*>& args);

}  // namespace disc

#endif  // DISC_INTERPRETER_HPP_
