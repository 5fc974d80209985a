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

#ifndef DISC_EXECUTOR_HPP_
#define DISC_EXECUTOR_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "disc/interpreter.hpp"
#include "disc/runtime_program.hpp"
#include "disc/tensor.hpp"

namespace disc {

struct ExecStats {
  int64_t launch_count{0};
  int64_t library_calls{0};
  int64_t host_instruction_count{0};
  int64_t peak_bytes{0};
  int64_t alloc_calls{0};
  int64_t allocator_cache_hits{0};
  int64_t aliased_allocs{0};
  double host_ms{0.0};    // instruction dispatch minus kernel bodies
  double kernel_ms{0.0};  // kernel + library body time
};

// Per-logical-buffer instrumentation: which physical block backed it and
// over which instruction interval it was live.
struct BufferEvent {
  int logical{-1};
  int physical{-1};
  int alloc_instr{-1};
  int dealloc_instr{-1};  // -1: live until the end of the run
};

struct ExecResult {
  std::vector<ConcreteTensor> outputs;
  ExecStats stats;
  std::vector<BufferEvent> buffer_events;
};

// Exact-byte-size free-list allocator; freed blocks are reused for later
// allocations of the same size class. Blocks are 16-byte aligned.
class CachedAllocator {
 public:
  int alloc(int64_t bytes, ExecStats& stats);
  void free(int block_id);
  float* data(int block_id);

 private:
  struct Block {
    std::unique_ptr<float[]> storage;
    int64_t bytes{0};
  };
  std::vector<Block> blocks_;
  std::map<int64_t, std::vector<int>> free_list_;
};

// Executes a CompiledPlan. The executor owns a cached allocator that
// persists across runs; one executor per thread (plans themselves are
// immutable and safely shared).
class Executor {
 public:
  ExecResult run(const CompiledPlan& plan, const Binding& inputs);

 private:
  CachedAllocator allocator_;
};

// Runs one kernel (used by the executor; exposed for version-agreement
// tests). `regs` is the evaluated shape register file.
std::vector<ConcreteTensor> run_kernel(const KernelArtifact& art, const VersionArtifact& version,
                                       const std::vector<const ConcreteTensor*>& externals,
                                       const std::vector<int64_t>& regs);

// Guard evaluation against bound registers (first match wins at SelectVersion).
bool guard_passes(const KernelArtifact& art, const VersionArtifact& version,
                  const std::vector<int64_t>& regs);

int64_t resolve_ref(const ScalarRef& r, const std::vector<int64_t>& regs);

}  // namespace disc

#endif  // DISC_EXECUTOR_HPP_
