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

#ifndef DISC_LOWERING_HPP_
#define DISC_LOWERING_HPP_

#include <utility>

#include "disc/constraint_set.hpp"
#include "disc/dhlo.hpp"
#include "disc/framework.hpp"

namespace disc {

struct LoweringOptions {
  // Replace every graph-input dim (constants included) with a fresh symbol,
  // so one compiled plan serves any input shapes of the declared ranks.
  // The static pipeline turns this off.
  bool symbolize_inputs{true};
  // Record frontend shape constraints that are lost in lowering (Split
  // output equality, Reshape size equality).
  bool inject_constraints{true};
};

// Lowers a validated framework graph into the hub IR. Split becomes
// num_splits dynamic_slice ops whose index operands are emitted shape
// computations; Softmax becomes reduce_max/sub/exp/reduce_sum/div with
// broadcasts; Reshape becomes dynamic_reshape plus a tensor-size link.
std::pair<DhloGraph, ConstraintSet> lower_to_dhlo(const FrameworkGraph& g,
                                                  const LoweringOptions& options = {});

}  // namespace disc

#endif  // DISC_LOWERING_HPP_
