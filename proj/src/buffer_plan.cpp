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

#include "disc/buffer_plan.hpp"

#include <algorithm>
#include <set>

#include "disc/error.hpp"

namespace disc {

BufferAssignment plan_buffers(const DhloGraph& g, const std::vector<SchedulePoint>& schedule,
                              const ConstraintSet& cs) {
  BufferAssignment ba;
  std::set<std::string> graph_outputs(g.outputs.begin(), g.outputs.end());

  // One logical buffer per produced value; graph inputs are caller-bound.
  for (size_t p = 0; p < schedule.size(); ++p) {
    for (const auto& out : schedule[p].outputs) {
      BufferAssignment::LogicalBuffer buf;
      buf.id = static_cast<int>(ba.buffers.size());
      buf.value_id = out;
      buf.shape = g.value_shape(out);
      buf.is_output = graph_outputs.count(out) > 0;
      buf.def_point = static_cast<int>(p);
      ba.buffer_of_value[out] = buf.id;
      ba.buffers.push_back(std::move(buf));
    }
  }
  for (size_t p = 0; p < schedule.size(); ++p) {
    for (const auto& in : schedule[p].inputs) {
      auto it = ba.buffer_of_value.find(in);
      if (it == ba.buffer_of_value.end()) continue;  // graph input
      ba.buffers[it->second].last_use_point =
          std::max(ba.buffers[it->second].last_use_point, static_cast<int>(p));
    }
  }
  // A value never read and not an output dies right after its def.
  for (auto& buf : ba.buffers)
    if (!buf.is_output && buf.last_use_point < 0) buf.last_use_point = buf.def_point;

  // Simulated execution: first fit over the dead list (in dealloc order)
  // for any alloc whose shape is provably the same size.
  std::vector<int> dead;
  for (size_t p = 0; p < schedule.size(); ++p) {
    for (const auto& out : schedule[p].outputs) {
      auto& buf = ba.buffers[ba.buffer_of_value[out]];
      if (buf.is_output) continue;  // outputs never alias the reusable pool
      for (size_t d = 0; d < dead.size(); ++d) {
        const auto& cand = ba.buffers[dead[d]];
        if (cs.same_size(cand.shape, buf.shape)) {
          buf.alias_of = cand.id;
          ba.aliased_allocs++;
          dead.erase(dead.begin() + static_cast<long>(d));
          break;
        }
      }
    }
    for (auto& buf : ba.buffers) {
      if (buf.is_output || buf.last_use_point != static_cast<int>(p)) continue;
      ba.deallocs_after_point[static_cast<int>(p)].push_back(buf.id);
      dead.push_back(buf.id);
    }
  }
  return ba;
}

}  // namespace disc
