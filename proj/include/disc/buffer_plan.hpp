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

#ifndef DISC_BUFFER_PLAN_HPP_
#define DISC_BUFFER_PLAN_HPP_

#include <map>
#include <string>
#include <vector>

#include "disc/constraint_set.hpp"
#include "disc/dhlo.hpp"

namespace disc {

// One entry of the execution schedule (a fused-kernel launch or a library
// call). Values interior to a fusion group never appear here and get no
// buffer.
struct SchedulePoint {
  enum class Kind { kKernel, kLibrary };
  Kind kind{Kind::kKernel};
  int kernel_id{-1};                  // kKernel
  std::string op_id;                  // kLibrary: the matmul op
  std::vector<std::string> inputs;    // value ids consumed
  std::vector<std::string> outputs;   // value ids produced
};

// Liveness-based alloc/dealloc placement with shape-compatibility reuse.
struct BufferAssignment {
  struct LogicalBuffer {
    int id{0};
    std::string value_id;
    ShapeVector shape;        // element count expression (bytes = numel * 4)
    bool is_output{false};    // graph outputs are never deallocated or aliased
    int def_point{-1};
    int last_use_point{-1};   // -1: live to the end
    int alias_of{-1};         // reuse a dead buffer instead of allocating
  };
  std::vector<LogicalBuffer> buffers;
  std::map<std::string, int> buffer_of_value;
  std::map<int, std::vector<int>> deallocs_after_point;  // point -> buffer ids
  int aliased_allocs{0};
};

// Alloc sits immediately before the defining point, dealloc immediately
// after the last use. A new alloc whose shape is same_size-provable with an
// already-dead buffer aliases it (first fit over the dead list in dealloc
// order).
BufferAssignment plan_buffers(const DhloGraph& g, const std::vector<SchedulePoint>& schedule,
                              const ConstraintSet& cs);

}  // namespace disc

#endif  // DISC_BUFFER_PLAN_HPP_
