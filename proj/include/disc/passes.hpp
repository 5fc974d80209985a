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

#ifndef DISC_PASSES_HPP_
#define DISC_PASSES_HPP_

#include <functional>
#include <string>
#include <vector>

#include "disc/constraint_set.hpp"
#include "disc/dhlo.hpp"

namespace disc {

struct PassState {
  DhloGraph graph;
  ConstraintSet constraints;
};

// A graph-to-graph transform that may also update the constraint set. Every
// pass preserves eager-evaluation semantics.
struct Pass {
  std::string name;
  std::function<void(PassState&)> run;
};

// Called after each pass with the stage name; hooks IR dumping.
using StageObserver = std::function<void(const std::string&, const PassState&)>;

// Applies passes in order, verifying the graph after each one. A failing
// pass (or a graph that stops verifying) aborts with the pass name.
PassState run_pipeline(PassState state, const std::vector<Pass>& passes,
                       const StageObserver& observer = nullptr);

// Removes every dynamic_broadcast_in_dim whose input shape is provably
// dimension-wise equal to its output shape; chains fall in one run.
void simplify_broadcast(DhloGraph& g, const ConstraintSet& cs);

Pass make_simplify_broadcast_pass();

}  // namespace disc

#endif  // DISC_PASSES_HPP_
