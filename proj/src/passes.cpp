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

#include "disc/passes.hpp"

#include <map>

#include "disc/error.hpp"

namespace disc {

PassState run_pipeline(PassState state, const std::vector<Pass>& passes,
                       const StageObserver& observer) {
  auto check = [&](const std::string& stage) {
    std::vector<std::string> diags = verify(state.graph);
    if (!diags.empty())
      throw CompileError("pass " + stage + ": graph no longer verifies: " + diags.front());
  };
  check("input");
  for (const auto& pass : passes) {
    try {
      pass.run(state);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw CompileError("pass " + pass.name + ": " + e.what());
    }
    check(pass.name);
    if (observer) observer(pass.name, state);
  }
  return state;
}

void simplify_broadcast(DhloGraph& g, const ConstraintSet& cs) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::string, std::string> replace;
    std::vector<DhloOp> kept;
    kept.reserve(g.ops.size());
    for (const auto& op : g.ops) {
      if (op.kind == DhloOpKind::kDynamicBroadcastInDim) {
        const ShapeVector& in_shape = g.value_shape(op.inputs[0]);
        bool is_output = false;
        for (const auto& out : g.outputs) is_output = is_output || out == op.id;
        if (!is_output && cs.same_dims(in_shape, op.shape)) {
          replace[op.id] = op.inputs[0];
          changed = true;
          continue;
        }
      }
      kept.push_back(op);
    }
    if (!changed) break;
    // Rewire uses through (possibly chained) replacements.
    auto resolve = [&](std::string id) {
      while (replace.count(id)) id = replace[id];
      return id;
    };
    for (auto& op : kept)
      for (auto& arg : op.inputs) arg = resolve(arg);
    g.ops = std::move(kept);
  }
}

Pass make_simplify_broadcast_pass() {
  return Pass{"simplify_broadcast",
              [](PassState& s) { simplify_broadcast(s.graph, s.constraints); }};
}

}  // namespace disc
