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

#ifndef DISC_RUNTIME_PROGRAM_HPP_
#define DISC_RUNTIME_PROGRAM_HPP_

#include <map>
#include <string>
#include <vector>

#include "disc/fusion.hpp"
#include "disc/shape_analysis.hpp"

namespace disc {

// --- compiled kernels -------------------------------------------------------

// Reference to a kernel operand: an external input of the group (by
// position) or an earlier tape entry.
struct TapeRef {
  enum class Kind { kExternal, kMember };
  Kind kind{Kind::kExternal};
  int index{0};
};

// One member of a fused kernel, compiled to a self-contained record: the
// executor needs no access to the graph.
struct TapeInstr {
  std::string op_id;  // for diagnostics and dumps
  DhloOpKind kind{DhloOpKind::kAdd};
  std::vector<TapeRef> args;
  std::vector<ScalarRef> out_dims;
  std::vector<int64_t> dims;  // reduce axes / transpose perm / broadcast_dims
  std::vector<ScalarRef> slice_starts, slice_strides;        // dynamic_slice
  std::vector<ScalarRef> pad_low, pad_high, pad_interior;    // dynamic_pad
  float pad_value{0.0f};
  int64_t axis{0};  // concat
};

struct GuardTest {
  enum class Kind { kTotalDivisibleBy4, kRefEqual, kNever, kAlways };
  Kind kind{Kind::kAlways};
  ScalarRef a, b;
};

struct VersionArtifact {
  int id{0};
  bool vectorized4{false};
  bool implicit_broadcast{false};
  std::vector<GuardTest> guards;  // conjunction
};

// A fused kernel (or a standalone memory op lowered the same way) ready to
// run: loop-nest space, member tape, version table.
struct KernelArtifact {
  int kernel_id{0};
  std::string name;
  RootKind root{RootKind::kElementwiseLoop};
  bool standalone{false};
  std::vector<TapeInstr> tape;
  std::vector<std::vector<ScalarRef>> external_input_dims;  // per external input
  std::vector<int> output_tape_indices;                     // external outputs, in order
  std::vector<ScalarRef> space_dims;  // iteration space (pre-reduce space)
  std::vector<VersionArtifact> versions;
  std::string signature;
};

// --- host instructions ------------------------------------------------------

// Buffer byte size as a shape expression: 4 * const_elems * prod(regs).
struct SizeExpr {
  int64_t const_elems{1};
  std::vector<int> regs;
};

enum class InstrKind {
  kBindInput,
  kEvalShape,
  kAlloc,
  kDealloc,
  kAlias,
  kSelectVersion,
  kComputeLaunch,
  kLaunch,
  kLibraryCall,
  kBindOutput,
};

struct Instr {
  InstrKind kind{InstrKind::kBindInput};
  int a{-1};  // BindInput/BindOutput: io index; Select/Compute/Launch/Alias: kernel or src buffer
  int b{-1};  // buffer id
  SizeExpr size;                 // Alloc
  std::vector<int> arg_bufs;     // Launch/LibraryCall inputs
  std::vector<int> out_bufs;     // Launch/LibraryCall outputs
  int fixed_version{-1};         // Launch: statically selected version
  int64_t fixed_tile{-1}, fixed_blocks{-1};  // Launch: static launch config
  std::vector<ScalarRef> lib_dims;  // LibraryCall: m, k, n
  // Dealloc only: the block is promised to a later Alias, so it must not
  // enter the allocator free list (the alias takes ownership directly).
  bool reserve{false};
};

const char* instr_kind_name(InstrKind k);

// The complete host program plus everything launches refer to. Executing a
// plan touches only these tables; the DhloGraph is not part of it.
struct CompiledPlan {
  int plan_version{1};
  std::string graph_name;
  std::string signature_digest;
  int64_t eager_op_count{0};  // compute ops in the lowered graph (the
                              // one-launch-per-node baseline)

  struct PlanInput {
    std::string id;
    std::vector<std::string> declared;  // framework-level entries ("S0" or "4")
    std::vector<ScalarRef> dims;        // for runtime symbol-consistency asserts
  };
  struct PlanOutput {
    std::string id;
    int buffer{-1};
    std::vector<ScalarRef> dims;
  };

  std::vector<PlanInput> inputs;
  std::vector<PlanOutput> outputs;
  ShapeProgram shape_program;
  std::map<std::string, std::vector<int64_t>> literals;  // ReadScalar pool
  std::vector<KernelArtifact> kernels;
  std::vector<Instr> instrs;
  int num_buffers{0};
  std::vector<std::string> buffer_values;  // buffer id -> value id (debug/instrumentation)

  int64_t host_instruction_count() const { return static_cast<int64_t>(instrs.size()); }
  int eval_shape_count() const {
    int n = 0;
    for (const auto& i : instrs) n += i.kind == InstrKind::kEvalShape ? 1 : 0;
    return n;
  }
};

std::string plan_to_json(const CompiledPlan& plan);
CompiledPlan plan_from_json(const std::string& text);

// Static validity checks: registers written before read, buffers allocated
// and not yet deallocated at every use. Violations are compiler bugs.
std::vector<std::string> check_plan(const CompiledPlan& plan);

}  // namespace disc

#endif  // DISC_RUNTIME_PROGRAM_HPP_
