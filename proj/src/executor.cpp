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

#include "disc/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <set>

#include "disc/error.hpp"
#include "disc/kernels.hpp"

namespace disc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int64_t> resolve_dims(const std::vector<ScalarRef>& refs,
                                  const std::vector<int64_t>& regs) {
  std::vector<int64_t> dims;
  dims.reserve(refs.size());
  for (const auto& r : refs) dims.push_back(resolve_ref(r, regs));
  return dims;
}

}  // namespace

int64_t resolve_ref(const ScalarRef& r, const std::vector<int64_t>& regs) {
  if (r.is_const) return r.value;
  if (r.reg < 0 || r.reg >= static_cast<int>(regs.size()))
    throw InternalError("shape register out of range");
  return regs[r.reg];
}

int CachedAllocator::alloc(int64_t bytes, ExecStats& stats) {
  auto it = free_list_.find(bytes);
  if (it != free_list_.end() && !it->second.empty()) {
    int id = it->second.back();
    it->second.pop_back();
    stats.allocator_cache_hits++;
    return id;
  }
  stats.alloc_calls++;
  Block b;
  // 16-byte alignment: round the float count up to a multiple of 4.
  int64_t floats = std::max<int64_t>((bytes + 3) / 4, 1);
  floats = (floats + 3) / 4 * 4;
  b.storage.reset(new float[static_cast<size_t>(floats)]);
  b.bytes = bytes;
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

void CachedAllocator::free(int block_id) {
  free_list_[blocks_[block_id].bytes].push_back(block_id);
}

float* CachedAllocator::data(int block_id) { return blocks_[block_id].storage.get(); }

bool guard_passes(const KernelArtifact& art, const VersionArtifact& version,
                  const std::vector<int64_t>& regs) {
  for (const auto& t : version.guards) {
    switch (t.kind) {
      case GuardTest::Kind::kTotalDivisibleBy4: {
        int64_t total = 1;
        for (const auto& d : art.space_dims) total *= resolve_ref(d, regs);
        if (total % 4 != 0) return false;
        break;
      }
      case GuardTest::Kind::kRefEqual:
        if (resolve_ref(t.a, regs) != resolve_ref(t.b, regs)) return false;
        break;
      case GuardTest::Kind::kNever:
        return false;
      case GuardTest::Kind::kAlways:
        break;
    }
  }
  return true;
}

namespace {

void elementwise_loop(DhloOpKind kind, bool vec4, const ConcreteTensor* a,
                      const ConcreteTensor* b, ConcreteTensor& out) {
  int64_t n = out.numel();
  if (b) {
    if (a->numel() != n || b->numel() != n)
      throw RuntimeError("fused elementwise operand size mismatch");
    if (vec4) {
      if (n % 4 != 0) throw InternalError("vectorized kernel launched with ragged extent");
      for (int64_t i = 0; i < n; i += 4) {
        out.f32[i] = apply_binary(kind, a->f32[i], b->f32[i]);
        out.f32[i + 1] = apply_binary(kind, a->f32[i + 1], b->f32[i + 1]);
        out.f32[i + 2] = apply_binary(kind, a->f32[i + 2], b->f32[i + 2]);
        out.f32[i + 3] = apply_binary(kind, a->f32[i + 3], b->f32[i + 3]);
      }
    } else {
      for (int64_t i = 0; i < n; ++i) out.f32[i] = apply_binary(kind, a->f32[i], b->f32[i]);
    }
  } else {
    if (a->numel() != n) throw RuntimeError("fused elementwise operand size mismatch");
    if (vec4) {
      if (n % 4 != 0) throw InternalError("vectorized kernel launched with ragged extent");
      for (int64_t i = 0; i < n; i += 4) {
        out.f32[i] = apply_unary(kind, a->f32[i]);
        out.f32[i + 1] = apply_unary(kind, a->f32[i + 1]);
        out.f32[i + 2] = apply_unary(kind, a->f32[i + 2]);
        out.f32[i + 3] = apply_unary(kind, a->f32[i + 3]);
      }
    } else {
      for (int64_t i = 0; i < n; ++i) out.f32[i] = apply_unary(kind, a->f32[i]);
    }
  }
}

}  // namespace

std::vector<ConcreteTensor> run_kernel(const KernelArtifact& art, const VersionArtifact& version,
                                       const std::vector<const ConcreteTensor*>& externals,
                                       const std::vector<int64_t>& regs) {
  std::vector<ConcreteTensor> scratch(art.tape.size());
  auto arg_tensor = [&](const TapeRef& ref) -> const ConcreteTensor& {
    if (ref.kind == TapeRef::Kind::kExternal) return *externals.at(ref.index);
    return scratch.at(ref.index);
  };

  for (size_t t = 0; t < art.tape.size(); ++t) {
    const TapeInstr& instr = art.tape[t];
    std::vector<int64_t> out_dims = resolve_dims(instr.out_dims, regs);
    switch (instr.kind) {
      case DhloOpKind::kAdd:
      case DhloOpKind::kSub:
      case DhloOpKind::kMul:
      case DhloOpKind::kDiv:
      case DhloOpKind::kMaximum: {
        ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
        elementwise_loop(instr.kind, version.vectorized4, &arg_tensor(instr.args[0]),
                         &arg_tensor(instr.args[1]), out);
        scratch[t] = std::move(out);
        break;
      }
      case DhloOpKind::kExp:
      case DhloOpKind::kTanh:
      case DhloOpKind::kNeg: {
        ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
        elementwise_loop(instr.kind, version.vectorized4, &arg_tensor(instr.args[0]), nullptr,
                         out);
        scratch[t] = std::move(out);
        break;
      }
      case DhloOpKind::kReduceSum:
      case DhloOpKind::kReduceMax:
        scratch[t] = eval_reduce(instr.kind, arg_tensor(instr.args[0]), instr.dims);
        break;
      case DhloOpKind::kDynamicBroadcastInDim: {
        const ConcreteTensor& in = arg_tensor(instr.args[0]);
        if (version.implicit_broadcast) {
          scratch[t] = eval_broadcast(in, out_dims, instr.dims);
        } else {
          // Guard proved the broadcast is an identity at runtime.
          if (in.numel() != ConcreteTensor::zeros_f32(out_dims).numel())
            throw InternalError("no-broadcast version launched with non-identity shape");
          ConcreteTensor out = in;
          out.dims = out_dims;
          scratch[t] = std::move(out);
        }
        break;
      }
      case DhloOpKind::kDynamicSlice:
        scratch[t] = eval_slice_gather(arg_tensor(instr.args[0]),
                                       resolve_dims(instr.slice_starts, regs),
                                       resolve_dims(instr.slice_strides, regs), out_dims);
        break;
      case DhloOpKind::kTranspose:
        scratch[t] = eval_transpose(arg_tensor(instr.args[0]), instr.dims);
        break;
      case DhloOpKind::kDynamicReshape:
        scratch[t] = eval_reshape(arg_tensor(instr.args[0]), out_dims);
        break;
      case DhloOpKind::kDynamicPad:
        scratch[t] = eval_pad(arg_tensor(instr.args[0]), instr.pad_value,
                              resolve_dims(instr.pad_low, regs),
                              resolve_dims(instr.pad_high, regs),
                              resolve_dims(instr.pad_interior, regs));
        break;
      case DhloOpKind::kConcat: {
        std::vector<const ConcreteTensor*> parts;
        for (const auto& a : instr.args) parts.push_back(&arg_tensor(a));
        scratch[t] = eval_concat(parts, instr.axis);
        break;
      }
      default:
        throw InternalError("unexpected op in kernel tape");
    }
  }

  std::vector<ConcreteTensor> outputs;
  for (int idx : art.output_tape_indices) outputs.push_back(scratch.at(idx));
  return outputs;
}

ExecResult Executor::run(const CompiledPlan& plan, const Binding& inputs) {
  ExecResult result;
  ExecStats& stats = result.stats;
  stats.host_instruction_count = plan.host_instruction_count();

  auto t_run = Clock::now();
  double kernel_ms = 0.0;

  std::vector<int64_t> regs(plan.shape_program.num_regs, 0);
  struct Slot {
    const ConcreteTensor* input{nullptr};
    int block{-1};
    int64_t bytes{0};
  };
  std::vector<Slot> slots(plan.num_buffers);
  std::map<int, int> version_table;
  std::map<int, std::pair<int64_t, int64_t>> launch_table;  // kernel -> (tile, blocks)
  int64_t live_bytes = 0;

  std::map<int, BufferEvent> events;  // logical buffer -> event

  auto input_asserts = [&]() {
    for (size_t i = 0; i < plan.inputs.size(); ++i) {
      const auto& pi = plan.inputs[i];
      const ConcreteTensor& t = *slots[i].input;
      for (size_t d = 0; d < pi.dims.size(); ++d) {
        int64_t expect = resolve_ref(pi.dims[d], regs);
        if (t.dims[d] != expect)
          throw RuntimeError("input " + pi.id + " dim " + std::to_string(d) +
                             " violates a shape constraint: expected " +
                             std::to_string(expect) + ", got " + std::to_string(t.dims[d]));
      }
    }
  };

  auto tensor_from_slot = [&](int buf, const std::vector<int64_t>& dims) {
    const Slot& slot = slots[buf];
    if (slot.input) {
      const ConcreteTensor& t = *slot.input;
      if (t.dims != dims) {
        ConcreteTensor view = t;
        view.dims = dims;
        return view;
      }
      return t;
    }
    int64_t numel = 1;
    for (int64_t d : dims) numel *= d;
    ConcreteTensor t;
    t.etype = ElementType::kF32;
    t.dims = dims;
    t.f32.assign(allocator_.data(slot.block), allocator_.data(slot.block) + numel);
    return t;
  };

  auto write_to_slot = [&](int buf, const ConcreteTensor& t) {
    Slot& slot = slots[buf];
    if (slot.input) throw InternalError("write into an input buffer");
    int64_t bytes = t.numel() * 4;
    if (bytes > slot.bytes)
      throw InternalError("kernel output exceeds planned buffer size");
    if (bytes > 0)
      std::memcpy(allocator_.data(slot.block), t.f32.data(), static_cast<size_t>(bytes));
  };

  bool shapes_ready = plan.shape_program.empty();
  result.outputs.resize(plan.outputs.size());

  for (size_t pc = 0; pc < plan.instrs.size(); ++pc) {
    const Instr& in = plan.instrs[pc];
    switch (in.kind) {
      case InstrKind::kBindInput: {
        const auto& pi = plan.inputs[in.a];
        auto it = inputs.find(pi.id);
        if (it == inputs.end()) throw RuntimeError("missing input " + pi.id);
        if (it->second.rank() != static_cast<int>(pi.dims.size()))
          throw RuntimeError("input " + pi.id + " rank mismatch");
        if (it->second.etype != ElementType::kF32)
          throw RuntimeError("input " + pi.id + " must be f32");
        slots[in.b].input = &it->second;
        break;
      }
      case InstrKind::kEvalShape: {
        for (int k = in.a; k < in.b; ++k) {
          const ShapeInstr& si = plan.shape_program.instrs[k];
          switch (si.kind) {
            case ShapeInstrKind::kReadInputDim:
              regs[si.dest] = slots[si.input].input->dims[si.axis];
              break;
            case ShapeInstrKind::kReadScalar:
              regs[si.dest] = plan.literals.at(si.tensor).at(si.index);
              break;
            case ShapeInstrKind::kLoadConst:
              regs[si.dest] = si.value;
              break;
            case ShapeInstrKind::kBinOp: {
              int64_t a = regs[si.lhs], b = regs[si.rhs];
              switch (si.op) {
                case ShapeBinOp::kAdd: regs[si.dest] = a + b; break;
                case ShapeBinOp::kSub: regs[si.dest] = a - b; break;
                case ShapeBinOp::kMul: regs[si.dest] = a * b; break;
                case ShapeBinOp::kDivFloor:
                  if (b == 0) throw RuntimeError("shape computation divided by zero");
                  regs[si.dest] = a / b;
                  break;
                case ShapeBinOp::kCeilDiv:
                  if (b <= 0) throw RuntimeError("shape ceil_div by non-positive stride");
                  regs[si.dest] = (a + b - 1) / b;
                  break;
                case ShapeBinOp::kMax: regs[si.dest] = std::max(a, b); break;
              }
              break;
            }
            case ShapeInstrKind::kBindDim:
              break;  // the register already carries the symbol's value
          }
        }
        shapes_ready = true;
        input_asserts();
        break;
      }
      case InstrKind::kAlloc: {
        int64_t elems = in.size.const_elems;
        for (int r : in.size.regs) elems *= regs[r];
        int64_t bytes = elems * 4;
        Slot& slot = slots[in.b];
        slot.block = allocator_.alloc(bytes, stats);
        slot.bytes = bytes;
        live_bytes += bytes;
        stats.peak_bytes = std::max(stats.peak_bytes, live_bytes);
        BufferEvent ev;
        ev.logical = in.b;
        ev.physical = slot.block;
        ev.alloc_instr = static_cast<int>(pc);
        events[in.b] = ev;
        break;
      }
      case InstrKind::kDealloc: {
        Slot& slot = slots[in.b];
        // Blocks promised to a later alias bypass the free list; the memory
        // stays held until the alias's own lifetime ends.
        if (!in.reserve) {
          allocator_.free(slot.block);
          live_bytes -= slot.bytes;
        }
        events[in.b].dealloc_instr = static_cast<int>(pc);
        break;
      }
      case InstrKind::kAlias: {
        Slot& slot = slots[in.b];
        slot.block = slots[in.a].block;
        slot.bytes = slots[in.a].bytes;
        stats.aliased_allocs++;
        BufferEvent ev;
        ev.logical = in.b;
        ev.physical = slot.block;
        ev.alloc_instr = static_cast<int>(pc);
        events[in.b] = ev;
        break;
      }
      case InstrKind::kSelectVersion: {
        const KernelArtifact& art = plan.kernels[in.a];
        int chosen = -1;
        for (const auto& v : art.versions) {
          if (guard_passes(art, v, regs)) {
            chosen = v.id;
            break;
          }
        }
        if (chosen < 0) throw RuntimeError("no kernel version guard matched");
        version_table[in.a] = chosen;
        break;
      }
      case InstrKind::kComputeLaunch: {
        const KernelArtifact& art = plan.kernels[in.a];
        int64_t total = 1;
        for (const auto& d : art.space_dims) total *= resolve_ref(d, regs);
        int64_t tile = KernelSpec::tile_for(total);
        launch_table[in.a] = {tile, total == 0 ? 0 : (total + tile - 1) / tile};
        break;
      }
      case InstrKind::kLaunch: {
        if (!shapes_ready && !plan.shape_program.empty())
          throw InternalError("launch before shape evaluation");
        const KernelArtifact& art = plan.kernels[in.a];
        int version_id = in.fixed_version >= 0 ? in.fixed_version : version_table.at(in.a);
        const VersionArtifact* version = nullptr;
        for (const auto& v : art.versions)
          if (v.id == version_id) version = &v;
        if (!version) throw InternalError("unknown kernel version selected");

        std::vector<ConcreteTensor> ext_storage;
        ext_storage.reserve(in.arg_bufs.size());
        for (size_t a = 0; a < in.arg_bufs.size(); ++a)
          ext_storage.push_back(
              tensor_from_slot(in.arg_bufs[a], resolve_dims(art.external_input_dims[a], regs)));
        std::vector<const ConcreteTensor*> ext;
        for (const auto& t : ext_storage) ext.push_back(&t);

        auto t0 = Clock::now();
        std::vector<ConcreteTensor> outs = run_kernel(art, *version, ext, regs);
        kernel_ms += ms_since(t0);
        stats.launch_count++;
        for (size_t o = 0; o < in.out_bufs.size(); ++o) write_to_slot(in.out_bufs[o], outs[o]);
        break;
      }
      case InstrKind::kLibraryCall: {
        int64_t m = resolve_ref(in.lib_dims[0], regs);
        int64_t k = resolve_ref(in.lib_dims[1], regs);
        int64_t n = resolve_ref(in.lib_dims[2], regs);
        ConcreteTensor a = tensor_from_slot(in.arg_bufs[0], {m, k});
        ConcreteTensor b = tensor_from_slot(in.arg_bufs[1], {k, n});
        auto t0 = Clock::now();
        ConcreteTensor c = eval_matmul(a, b);
        kernel_ms += ms_since(t0);
        stats.library_calls++;
        write_to_slot(in.out_bufs[0], c);
        break;
      }
      case InstrKind::kBindOutput: {
        const auto& po = plan.outputs[in.a];
        result.outputs[in.a] = tensor_from_slot(in.b, resolve_dims(po.dims, regs));
        break;
      }
    }
  }

  // Static plans have constant input expectations; check them too.
  if (plan.shape_program.empty()) input_asserts();

  // Outputs were copied out above; every block still held (outputs and any
  // alias survivors) goes back to the allocator for the next run.
  {
    std::set<int> returned;
    for (const auto& [logical, ev] : events) {
      if (ev.dealloc_instr >= 0) continue;
      if (returned.insert(ev.physical).second) allocator_.free(ev.physical);
    }
  }

  stats.kernel_ms = kernel_ms;
  stats.host_ms = ms_since(t_run) - kernel_ms;
  for (const auto& [_, ev] : events) result.buffer_events.push_back(ev);
  return result;
}

}  // namespace disc
