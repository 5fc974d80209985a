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

#ifndef DISC_CODEGEN_HPP_
#define DISC_CODEGEN_HPP_

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "disc/buffer_plan.hpp"
#include "disc/framework.hpp"
#include "disc/passes.hpp"
#include "disc/runtime_program.hpp"

namespace disc {

struct CompileOptions {
  bool inject_constraints{true};
  bool enable_fusion{true};
  bool static_fallback{false};  // specialize when all shapes are constant
};

// Receives a textual dump of every named pipeline stage (for dump-ir and
// DISC_DUMP_DIR).
using TextDumper = std::function<void(const std::string& stage, const std::string& text)>;

// Runs the whole pipeline: lower -> infer -> simplify_broadcast -> fuse ->
// specialize -> emit_shape_program -> plan_buffers -> codegen.
CompiledPlan compile_graph(const FrameworkGraph& g, const CompileOptions& opts = {},
                           const TextDumper& dump = nullptr);

// Fully static plan: every dim constant, zero EvalShape instructions,
// version selection and launch configs resolved at compile time. Throws
// CompileError("not static: ...") if any symbol survives.
CompiledPlan static_specialize(const FrameworkGraph& g, const CompileOptions& opts = {},
                               const TextDumper& dump = nullptr);

// Shape-agnostic cache key (framework level): excludes every concrete input
// dim value and symbol name; includes op attrs, literals-in-attrs, tensor
// ids, the symbol-sharing partition, and the option flags.
std::string cache_key(const FrameworkGraph& g, const CompileOptions& opts);

struct CompilerStats {
  int64_t compile_count{0};
  int64_t cache_hits{0};
};

// Compilation entry with a shape-agnostic plan cache. Concurrent compiles of
// one signature coalesce: one thread compiles, the rest wait for the plan.
class Compiler {
 public:
  explicit Compiler(CompileOptions defaults = {}) : defaults_(defaults) {}

  std::shared_ptr<const CompiledPlan> compile(const FrameworkGraph& g);
  std::shared_ptr<const CompiledPlan> compile(const FrameworkGraph& g,
                                              const CompileOptions& opts);

  CompilerStats stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
  }

 private:
  CompileOptions defaults_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const CompiledPlan>>> cache_;
  CompilerStats stats_;
};

}  // namespace disc

#endif  // DISC_CODEGEN_HPP_
