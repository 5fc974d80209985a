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

#include "disc/codegen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "disc/error.hpp"
#include "disc/fusion.hpp"
#include "disc/lowering.hpp"
#include "disc/shape_analysis.hpp"

namespace disc {

namespace {

bool is_runtime_value(const DhloOp& op) {
  return op.etype == ElementType::kF32 && is_compute_op(op.kind);
}

std::string groups_dump(const std::vector<FusionGroup>& groups,
                        const std::vector<KernelSpec>& specs) {
  std::ostringstream os;
  for (const auto& group : groups) {
    os << "group " << group.id << " ["
       << (group.root == RootKind::kReduceRoot ? "reduce-root" : "elementwise-loop") << "]";
    os << " members:";
    for (const auto& m : group.members) os << " %" << m;
    os << " inputs:";
    for (const auto& i : group.external_inputs) os << " %" << i;
    os << " outputs:";
    for (const auto& o : group.external_outputs) os << " %" << o;
    os << "\n  signature: " << digest_hex(group.signature) << "\n";
    for (const auto& spec : specs) {
      if (spec.kernel_id != group.id) continue;
      for (const auto& v : spec.versions) {
        os << "  version " << v.id << (v.vectorized4 ? " vectorized4" : "")
           << (v.implicit_broadcast ? " implicit-broadcast" : "") << " guards:";
        for (auto gk : v.guards) {
          switch (gk) {
            case GuardKind::kTotalDivisibleBy4: os << " total%4==0"; break;
            case GuardKind::kBroadcastIdentity: os << " broadcast-identity"; break;
            case GuardKind::kAlways: os << " always"; break;
          }
        }
        os << "\n";
      }
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Plan construction shared by the dynamic and static pipelines.

class PlanBuilder {
 public:
  PlanBuilder(const FrameworkGraph& fw, const DhloGraph& g, const ConstraintSet& cs,
              const std::vector<FusionGroup>& groups, const std::vector<KernelSpec>& specs,
              bool static_mode)
      : fw_(fw), g_(g), cs_(cs), groups_(groups), specs_(specs), static_mode_(static_mode),
        spb_(g, cs) {}

  CompiledPlan build() {
    spb_.bind_all();
    build_schedule();
    assignment_ = plan_buffers(g_, schedule_, cs_);
    build_kernels();
    emit_instrs();
    finalize_metadata();
    std::vector<std::string> diags = check_plan(plan_);
    if (!diags.empty())
      throw InternalError("generated plan failed validity checks: " + diags.front());
    return std::move(plan_);
  }

  const BufferAssignment& assignment() const { return assignment_; }

 private:
  const FrameworkGraph& fw_;
  const DhloGraph& g_;
  const ConstraintSet& cs_;
  const std::vector<FusionGroup>& groups_;
  const std::vector<KernelSpec>& specs_;
  bool static_mode_;
  ShapeProgramBuilder spb_;

  std::vector<SchedulePoint> schedule_;
  std::map<int, const KernelSpec*> spec_by_group_;
  std::map<int, int> artifact_of_point_;  // schedule point -> kernel artifact
  BufferAssignment assignment_;
  std::set<int> alias_targets_;  // logical buffers a later alias will take over
  CompiledPlan plan_;

  std::vector<ScalarRef> dims_refs(const ShapeVector& s) {
    std::vector<ScalarRef> refs;
    refs.reserve(s.dims.size());
    for (const auto& d : s.dims) refs.push_back(spb_.dim_ref(d));
    return refs;
  }

  // --- scheduling --------------------------------------------------------

  void build_schedule() {
    for (const auto& spec : specs_) spec_by_group_[spec.group.id] = &spec;

    struct Point {
      SchedulePoint sp;
      int min_member_index;
    };
    std::vector<Point> points;
    std::map<std::string, int> op_index;
    for (size_t i = 0; i < g_.ops.size(); ++i) op_index[g_.ops[i].id] = static_cast<int>(i);
    std::set<std::string> outputs_set(g_.outputs.begin(), g_.outputs.end());

    std::set<std::string> in_group;
    for (const auto& group : groups_)
      for (const auto& m : group.members) in_group.insert(m);

    for (const auto& group : groups_) {
      if (group.external_outputs.empty()) continue;  // dead code
      SchedulePoint sp;
      sp.kind = SchedulePoint::Kind::kKernel;
      sp.kernel_id = group.id;
      sp.inputs = group.external_inputs;
      sp.outputs = group.external_outputs;
      int min_idx = op_index[group.members.front()];
      for (const auto& m : group.members) min_idx = std::min(min_idx, op_index[m]);
      points.push_back({sp, min_idx});
    }
    for (const auto& op : g_.ops) {
      if (!is_runtime_value(op) || in_group.count(op.id)) continue;
      if (op.kind == DhloOpKind::kConstant) continue;  // literals, embedded
      bool used = outputs_set.count(op.id) > 0;
      for (const auto& other : g_.ops)
        for (const auto& arg : other.inputs)
          if (arg == op.id && is_runtime_value(other)) used = true;
      if (!used) continue;  // dead code
      SchedulePoint sp;
      if (op.kind == DhloOpKind::kMatMul) {
        sp.kind = SchedulePoint::Kind::kLibrary;
        sp.op_id = op.id;
        sp.inputs = {op.inputs[0], op.inputs[1]};
      } else {
        sp.kind = SchedulePoint::Kind::kKernel;
        sp.kernel_id = -1;  // standalone; artifact assigned later
        sp.op_id = op.id;
        size_t data_args = op.kind == DhloOpKind::kDynamicPad       ? 1
                           : op.kind == DhloOpKind::kDynamicReshape ? 1
                           : op.kind == DhloOpKind::kTranspose      ? 1
                           : op.inputs.size();  // concat: all args
        for (size_t a = 0; a < data_args; ++a) {
          const DhloOp* producer = g_.find_op(op.inputs[a]);
          if (producer && producer->kind == DhloOpKind::kConstant) continue;
          sp.inputs.push_back(op.inputs[a]);
        }
      }
      sp.outputs = {op.id};
      points.push_back({sp, op_index[op.id]});
    }

    // Topological order over points (a point consumes another's output),
    // smallest member index first for determinism.
    std::map<std::string, int> producer_point;
    for (size_t i = 0; i < points.size(); ++i)
      for (const auto& out : points[i].sp.outputs) producer_point[out] = static_cast<int>(i);
    int n = static_cast<int>(points.size());
    std::vector<std::set<int>> deps(n);
    std::vector<std::set<int>> users(n);
    for (int i = 0; i < n; ++i) {
      for (const auto& in : points[i].sp.inputs) {
        auto it = producer_point.find(in);
        if (it != producer_point.end() && it->second != i) {
          deps[i].insert(it->second);
          users[it->second].insert(i);
        }
      }
    }
    std::vector<int> remaining(n);
    std::set<std::pair<int, int>> ready;  // (min_member_index, point)
    for (int i = 0; i < n; ++i) {
      remaining[i] = static_cast<int>(deps[i].size());
      if (remaining[i] == 0) ready.insert({points[i].min_member_index, i});
    }
    while (!ready.empty()) {
      auto [_, p] = *ready.begin();
      ready.erase(ready.begin());
      schedule_.push_back(points[p].sp);
      for (int u : users[p])
        if (--remaining[u] == 0) ready.insert({points[u].min_member_index, u});
    }
    if (static_cast<int>(schedule_.size()) != n)
      throw InternalError("schedule has a cycle");
  }

  // --- kernels -----------------------------------------------------------

  TapeInstr make_tape_instr(const DhloOp& op, const std::map<std::string, int>& member_ord,
                            const std::map<std::string, int>& external_ord) {
    TapeInstr t;
    t.op_id = op.id;
    t.kind = op.kind;
    t.out_dims = dims_refs(op.shape);
    size_t data_args = op.kind == DhloOpKind::kDynamicSlice            ? 1
                       : op.kind == DhloOpKind::kDynamicBroadcastInDim ? 1
                       : op.kind == DhloOpKind::kDynamicPad            ? 1
                       : op.kind == DhloOpKind::kDynamicReshape        ? 1
                                                                       : op.inputs.size();
    for (size_t a = 0; a < data_args; ++a) {
      const std::string& arg = op.inputs[a];
      TapeRef ref;
      auto mit = member_ord.find(arg);
      if (mit != member_ord.end()) {
        ref.kind = TapeRef::Kind::kMember;
        ref.index = mit->second;
      } else {
        ref.kind = TapeRef::Kind::kExternal;
        ref.index = external_ord.at(arg);
      }
      t.args.push_back(ref);
    }
    switch (op.kind) {
      case DhloOpKind::kReduceSum:
      case DhloOpKind::kReduceMax:
      case DhloOpKind::kTranspose:
      case DhloOpKind::kDynamicBroadcastInDim:
        t.dims = op.dims_attr;
        break;
      case DhloOpKind::kDynamicSlice: {
        int r = op.shape.rank();
        for (int d = 0; d < r; ++d) {
          t.slice_starts.push_back(spb_.resolve_scalar(op.inputs[1], d));
          t.slice_strides.push_back(spb_.resolve_scalar(op.inputs[3], d));
        }
        break;
      }
      case DhloOpKind::kDynamicPad: {
        const DhloOp* value = g_.find_op(op.inputs[1]);
        if (!value || value->kind != DhloOpKind::kConstant)
          throw CompileError("pad value of " + op.id + " must be a constant");
        t.pad_value = value->literal.f32.at(0);
        int r = op.shape.rank();
        for (int d = 0; d < r; ++d) {
          t.pad_low.push_back(spb_.resolve_scalar(op.inputs[2], d));
          t.pad_high.push_back(spb_.resolve_scalar(op.inputs[3], d));
          t.pad_interior.push_back(spb_.resolve_scalar(op.inputs[4], d));
        }
        break;
      }
      case DhloOpKind::kConcat:
        t.axis = op.axis;
        break;
      default:
        break;
    }
    return t;
  }

  std::vector<GuardTest> concretize_guards(const KernelVersion& version,
                                           const FusionGroup& group) {
    std::vector<GuardTest> tests;
    for (GuardKind gk : version.guards) {
      switch (gk) {
        case GuardKind::kTotalDivisibleBy4: {
          GuardTest t;
          t.kind = GuardTest::Kind::kTotalDivisibleBy4;
          tests.push_back(t);
          break;
        }
        case GuardKind::kBroadcastIdentity: {
          for (const auto& id : group.members) {
            const DhloOp* op = g_.find_op(id);
            if (op->kind != DhloOpKind::kDynamicBroadcastInDim) continue;
            const ShapeVector& in = g_.value_shape(op->inputs[0]);
            if (in.rank() != op->shape.rank()) {
              GuardTest t;
              t.kind = GuardTest::Kind::kNever;
              tests.push_back(t);
              continue;
            }
            for (int d = 0; d < in.rank(); ++d) {
              GuardTest t;
              t.kind = GuardTest::Kind::kRefEqual;
              t.a = spb_.dim_ref(in.dims[d]);
              t.b = spb_.dim_ref(op->shape.dims[d]);
              tests.push_back(t);
            }
          }
          break;
        }
        case GuardKind::kAlways: {
          GuardTest t;
          t.kind = GuardTest::Kind::kAlways;
          tests.push_back(t);
          break;
        }
      }
    }
    return tests;
  }

  KernelArtifact build_group_artifact(const KernelSpec& spec) {
    const FusionGroup& group = spec.group;
    KernelArtifact art;
    art.kernel_id = static_cast<int>(plan_.kernels.size());
    art.name = group.members.back();
    art.root = group.root;
    art.standalone = false;
    art.signature = digest_hex(group.signature);

    std::map<std::string, int> member_ord, external_ord;
    for (size_t i = 0; i < group.members.size(); ++i)
      member_ord[group.members[i]] = static_cast<int>(i);
    for (size_t i = 0; i < group.external_inputs.size(); ++i) {
      external_ord[group.external_inputs[i]] = static_cast<int>(i);
      art.external_input_dims.push_back(dims_refs(g_.value_shape(group.external_inputs[i])));
    }
    for (const auto& id : group.members)
      art.tape.push_back(make_tape_instr(*g_.find_op(id), member_ord, external_ord));
    for (const auto& out : group.external_outputs)
      art.output_tape_indices.push_back(member_ord.at(out));

    if (group.root == RootKind::kReduceRoot)
      art.space_dims = dims_refs(g_.value_shape(g_.find_op(group.reduce_member)->inputs[0]));
    else
      art.space_dims = dims_refs(g_.value_shape(group.external_outputs.front()));

    for (const auto& version : spec.versions) {
      VersionArtifact va;
      va.id = version.id;
      va.vectorized4 = version.vectorized4;
      va.implicit_broadcast = version.implicit_broadcast;
      va.guards = concretize_guards(version, group);
      art.versions.push_back(va);
    }
    return art;
  }

  KernelArtifact build_standalone_artifact(const DhloOp& op,
                                           const std::vector<std::string>& data_inputs) {
    KernelArtifact art;
    art.kernel_id = static_cast<int>(plan_.kernels.size());
    art.name = op.id;
    art.root = RootKind::kElementwiseLoop;
    art.standalone = true;
    art.signature = digest_hex(pattern_signature(g_, {op.id}));

    std::map<std::string, int> member_ord, external_ord;
    member_ord[op.id] = 0;
    for (size_t i = 0; i < data_inputs.size(); ++i) {
      external_ord[data_inputs[i]] = static_cast<int>(i);
      art.external_input_dims.push_back(dims_refs(g_.value_shape(data_inputs[i])));
    }
    art.tape.push_back(make_tape_instr(op, member_ord, external_ord));
    art.output_tape_indices = {0};
    art.space_dims = dims_refs(op.shape);

    VersionArtifact scalar;
    scalar.id = 0;
    GuardTest always;
    always.kind = GuardTest::Kind::kAlways;
    scalar.guards = {always};
    art.versions.push_back(scalar);
    return art;
  }

  void build_kernels() {
    for (size_t p = 0; p < schedule_.size(); ++p) {
      SchedulePoint& sp = schedule_[p];
      if (sp.kind != SchedulePoint::Kind::kKernel) continue;
      if (sp.kernel_id >= 0) {
        const KernelSpec* spec = spec_by_group_.at(sp.kernel_id);
        artifact_of_point_[static_cast<int>(p)] = static_cast<int>(plan_.kernels.size());
        plan_.kernels.push_back(build_group_artifact(*spec));
      } else {
        const DhloOp* op = g_.find_op(sp.op_id);
        artifact_of_point_[static_cast<int>(p)] = static_cast<int>(plan_.kernels.size());
        plan_.kernels.push_back(build_standalone_artifact(*op, sp.inputs));
      }
    }
  }

  // --- guard/launch folding for the static path --------------------------

  static int64_t const_value(const ScalarRef& r) {
    if (!r.is_const) throw CompileError("not static: register-valued shape survived");
    return r.value;
  }

  int64_t static_total(const KernelArtifact& art) {
    int64_t total = 1;
    for (const auto& d : art.space_dims) total *= const_value(d);
    return total;
  }

  bool eval_guard_static(const KernelArtifact& art, const VersionArtifact& v) {
    for (const auto& t : v.guards) {
      switch (t.kind) {
        case GuardTest::Kind::kTotalDivisibleBy4:
          if (static_total(art) % 4 != 0) return false;
          break;
        case GuardTest::Kind::kRefEqual:
          if (const_value(t.a) != const_value(t.b)) return false;
          break;
        case GuardTest::Kind::kNever:
          return false;
        case GuardTest::Kind::kAlways:
          break;
      }
    }
    return true;
  }

  // --- instruction emission ----------------------------------------------

  int buffer_id_of_value(const std::string& value) {
    auto it = assignment_.buffer_of_value.find(value);
    if (it != assignment_.buffer_of_value.end())
      return static_cast<int>(g_.inputs.size()) + it->second;
    for (size_t i = 0; i < g_.inputs.size(); ++i)
      if (g_.inputs[i].id == value) return static_cast<int>(i);
    throw InternalError("no buffer for value " + value);
  }

  SizeExpr size_expr_of(const ShapeVector& shape) {
    SizeExpr e;
    for (const auto& d : shape.dims) {
      ScalarRef r = spb_.dim_ref(d);
      if (r.is_const)
        e.const_elems *= r.value;
      else
        e.regs.push_back(r.reg);
    }
    return e;
  }

  void emit_instrs() {
    int n_inputs = static_cast<int>(g_.inputs.size());
    for (const auto& buf : assignment_.buffers)
      if (buf.alias_of >= 0) alias_targets_.insert(buf.alias_of);
    for (int i = 0; i < n_inputs; ++i) {
      Instr in;
      in.kind = InstrKind::kBindInput;
      in.a = i;
      in.b = i;
      plan_.instrs.push_back(in);
    }
    // All shape work runs once per execution, hoisted to the earliest point
    // its operands (the freshly bound inputs) are available.
    const ShapeProgram& sp = spb_.program();
    if (!sp.instrs.empty()) {
      if (static_mode_)
        throw CompileError("not static: shape program is not empty");
      Instr in;
      in.kind = InstrKind::kEvalShape;
      in.a = 0;
      in.b = static_cast<int>(sp.instrs.size());
      plan_.instrs.push_back(in);
    }

    for (size_t p = 0; p < schedule_.size(); ++p) {
      const SchedulePoint& point = schedule_[p];
      for (const auto& out : point.outputs) {
        const auto& buf = assignment_.buffers[assignment_.buffer_of_value.at(out)];
        Instr in;
        if (buf.alias_of >= 0) {
          in.kind = InstrKind::kAlias;
          in.a = n_inputs + buf.alias_of;
          in.b = n_inputs + buf.id;
        } else {
          in.kind = InstrKind::kAlloc;
          in.b = n_inputs + buf.id;
          in.size = size_expr_of(buf.shape);
        }
        plan_.instrs.push_back(in);
      }

      if (point.kind == SchedulePoint::Kind::kKernel) {
        int art_id = artifact_of_point_.at(static_cast<int>(p));
        const KernelArtifact& art = plan_.kernels[art_id];
        Instr launch;
        launch.kind = InstrKind::kLaunch;
        launch.a = art_id;
        for (const auto& in : point.inputs) launch.arg_bufs.push_back(buffer_id_of_value(in));
        for (const auto& out : point.outputs) launch.out_bufs.push_back(buffer_id_of_value(out));

        if (static_mode_) {
          int chosen = -1;
          for (const auto& v : art.versions) {
            if (eval_guard_static(art, v)) {
              chosen = v.id;
              break;
            }
          }
          if (chosen < 0) throw InternalError("no version guard matched statically");
          int64_t total = static_total(art);
          launch.fixed_version = chosen;
          launch.fixed_tile = KernelSpec::tile_for(total);
          launch.fixed_blocks = total == 0 ? 0 : (total + launch.fixed_tile - 1) / launch.fixed_tile;
        } else {
          if (art.versions.size() > 1) {
            Instr sel;
            sel.kind = InstrKind::kSelectVersion;
            sel.a = art_id;
            plan_.instrs.push_back(sel);
          } else {
            launch.fixed_version = art.versions.front().id;
          }
          Instr cl;
          cl.kind = InstrKind::kComputeLaunch;
          cl.a = art_id;
          plan_.instrs.push_back(cl);
        }
        plan_.instrs.push_back(launch);
      } else {
        const DhloOp* op = g_.find_op(point.op_id);
        Instr lib;
        lib.kind = InstrKind::kLibraryCall;
        for (const auto& in : point.inputs) lib.arg_bufs.push_back(buffer_id_of_value(in));
        lib.out_bufs = {buffer_id_of_value(point.op_id)};
        const ShapeVector& a = g_.value_shape(op->inputs[0]);
        const ShapeVector& b = g_.value_shape(op->inputs[1]);
        lib.lib_dims = {spb_.dim_ref(a.dims[0]), spb_.dim_ref(a.dims[1]),
                        spb_.dim_ref(b.dims[1])};
        plan_.instrs.push_back(lib);
      }

      auto it = assignment_.deallocs_after_point.find(static_cast<int>(p));
      if (it != assignment_.deallocs_after_point.end()) {
        for (int buf : it->second) {
          Instr in;
          in.kind = InstrKind::kDealloc;
          in.b = n_inputs + buf;
          in.reserve = alias_targets_.count(buf) > 0;
          plan_.instrs.push_back(in);
        }
      }
    }

    for (size_t o = 0; o < g_.outputs.size(); ++o) {
      Instr in;
      in.kind = InstrKind::kBindOutput;
      in.a = static_cast<int>(o);
      in.b = buffer_id_of_value(g_.outputs[o]);
      plan_.instrs.push_back(in);
    }
    plan_.num_buffers = n_inputs + static_cast<int>(assignment_.buffers.size());
    plan_.buffer_values.resize(plan_.num_buffers);
    for (int i = 0; i < n_inputs; ++i) plan_.buffer_values[i] = g_.inputs[i].id;
    for (const auto& buf : assignment_.buffers)
      plan_.buffer_values[n_inputs + buf.id] = buf.value_id;
  }

  void finalize_metadata() {
    plan_.graph_name = g_.name;
    for (size_t i = 0; i < fw_.inputs.size(); ++i) {
      CompiledPlan::PlanInput pi;
      pi.id = fw_.inputs[i].id;
      for (const auto& d : fw_.inputs[i].shape.dims)
        pi.declared.push_back(d.is_const() ? std::to_string(d.size())
                                           : fw_.symbol_names[d.sym_id()]);
      pi.dims = dims_refs(g_.inputs[i].shape);
      plan_.inputs.push_back(pi);
    }
    for (size_t o = 0; o < g_.outputs.size(); ++o) {
      CompiledPlan::PlanOutput po;
      po.id = g_.outputs[o];
      po.buffer = buffer_id_of_value(g_.outputs[o]);
      po.dims = dims_refs(g_.value_shape(g_.outputs[o]));
      plan_.outputs.push_back(po);
    }
    plan_.shape_program = spb_.program();
    for (const auto& lit : spb_.referenced_literals()) {
      const DhloOp* op = g_.find_op(lit);
      if (!op || op->kind != DhloOpKind::kConstant)
        throw InternalError("literal pool entry is not a constant: " + lit);
      plan_.literals[lit] = op->literal.i64;
    }
  }
};

std::vector<FusionGroup> singleton_groups(const DhloGraph& g) {
  std::vector<FusionGroup> groups;
  std::set<std::string> outputs_set(g.outputs.begin(), g.outputs.end());
  for (const auto& op : g.ops) {
    if (!(op.etype == ElementType::kF32 && is_fusible_kind(op.kind))) continue;
    FusionGroup group;
    group.id = static_cast<int>(groups.size());
    group.members = {op.id};
    if (is_reduce(op.kind)) {
      group.root = RootKind::kReduceRoot;
      group.reduce_member = op.id;
    }
    size_t data_args = op.kind == DhloOpKind::kDynamicSlice            ? 1
                       : op.kind == DhloOpKind::kDynamicBroadcastInDim ? 1
                                                                       : op.inputs.size();
    for (size_t a = 0; a < data_args; ++a) group.external_inputs.push_back(op.inputs[a]);
    bool used = outputs_set.count(op.id) > 0;
    for (const auto& other : g.ops)
      for (const auto& arg : other.inputs)
        if (arg == op.id && other.etype == ElementType::kF32 && is_compute_op(other.kind))
          used = true;
    if (used) group.external_outputs = {op.id};
    group.signature = pattern_signature(g, group.members);
    groups.push_back(std::move(group));
  }
  return groups;
}

CompiledPlan run_full_pipeline(const FrameworkGraph& fw, const CompileOptions& opts,
                               bool static_mode, const TextDumper& dump) {
  LoweringOptions lopts;
  lopts.symbolize_inputs = !static_mode;
  lopts.inject_constraints = opts.inject_constraints;
  auto [graph, seed] = lower_to_dhlo(fw, lopts);
  if (dump) dump("dhlo", print_text(graph));
  int64_t eager_ops = 0;
  for (const auto& op : graph.ops)
    if (is_compute_op(op.kind) && op.etype == ElementType::kF32) eager_ops++;

  std::vector<Pass> passes;
  passes.push_back(Pass{"infer", [](PassState& s) { s.constraints = infer(s.graph, s.constraints); }});
  passes.push_back(Pass{"canonicalize_dims",
                        [](PassState& s) { s.graph = canonicalize_dims(s.graph, s.constraints); }});
  passes.push_back(make_simplify_broadcast_pass());

  StageObserver observer = nullptr;
  if (dump)
    observer = [&dump](const std::string& stage, const PassState& s) {
      if (stage == "infer")
        dump("constraints", s.constraints.dump());
      else if (stage == "simplify_broadcast")
        dump("simplified", print_text(s.graph));
    };

  PassState state = run_pipeline({std::move(graph), std::move(seed)}, passes, observer);

  if (static_mode) {
    auto check_static = [&](const ShapeVector& s, const std::string& what) {
      for (const auto& d : s.dims) {
        if (!d.is_sym()) continue;
        std::string name = "s" + std::to_string(d.sym_id());
        // Report the user-facing symbol name when the dim came from the file.
        if (d.sym_id() < static_cast<int>(state.graph.symbols.size())) {
          const SymbolOrigin& origin = state.graph.symbols[d.sym_id()];
          if (origin.kind == SymbolOrigin::Kind::kInputDim) {
            const SymbolicDim& fd = fw.inputs[origin.input].shape.dims[origin.dim];
            if (fd.is_sym()) name = fw.symbol_names[fd.sym_id()];
          }
        }
        throw CompileError("not static: " + name + " (" + what + ")");
      }
    };
    for (const auto& in : state.graph.inputs) check_static(in.shape, "input " + in.id);
    for (const auto& op : state.graph.ops) check_static(op.shape, "op " + op.id);
  }

  std::vector<FusionGroup> groups = opts.enable_fusion
                                        ? fuse(state.graph, state.constraints)
                                        : singleton_groups(state.graph);
  std::vector<KernelSpec> specs = specialize(state.graph, groups, state.constraints);
  if (dump) dump("fused", groups_dump(groups, specs));

  PlanBuilder builder(fw, state.graph, state.constraints, groups, specs, static_mode);
  CompiledPlan plan = builder.build();
  plan.eager_op_count = eager_ops;
  plan.signature_digest = digest_hex(cache_key(fw, opts) + (static_mode ? "|static" : ""));
  if (dump) dump("program", plan_to_json(plan));
  return plan;
}

}  // namespace

CompiledPlan compile_graph(const FrameworkGraph& g, const CompileOptions& opts,
                           const TextDumper& dump) {
  if (opts.static_fallback) {
    bool all_static = true;
    for (const auto& in : g.inputs) all_static = all_static && in.shape.is_static();
    if (all_static) return run_full_pipeline(g, opts, /*static_mode=*/true, dump);
  }
  return run_full_pipeline(g, opts, /*static_mode=*/false, dump);
}

CompiledPlan static_specialize(const FrameworkGraph& g, const CompileOptions& opts,
                               const TextDumper& dump) {
  return run_full_pipeline(g, opts, /*static_mode=*/true, dump);
}

std::string cache_key(const FrameworkGraph& g, const CompileOptions& opts) {
  std::ostringstream os;
  std::map<int, int> sym_ord;
  auto dim_token = [&](const SymbolicDim& d) {
    if (d.is_const()) return std::string("c");  // value excluded: plans adapt
    auto [pos, _] = sym_ord.emplace(d.sym_id(), static_cast<int>(sym_ord.size()));
    return "p" + std::to_string(pos->second);
  };
  os << "graph:" << g.name << "|inputs:";
  for (const auto& in : g.inputs) {
    os << in.id << "[";
    for (const auto& d : in.shape.dims) os << dim_token(d) << ",";
    os << "]";
    if (opts.static_fallback && in.shape.is_static()) {
      os << "=(";
      for (const auto& d : in.shape.dims) os << d.size() << ",";
      os << ")";
    }
  }
  os << "|nodes:";
  for (const auto& n : g.nodes) {
    os << n.id << "=" << fw_op_name(n.op) << "(";
    for (const auto& in : n.inputs) os << in << ",";
    os << ")->(";
    for (const auto& out : n.outputs) os << out << ",";
    os << "){";
    auto ints = [&](const char* key, const std::vector<int64_t>& v) {
      if (v.empty()) return;
      os << key << "[";
      for (int64_t x : v) os << x << ",";
      os << "]";
    };
    ints("axes", n.attrs.axes);
    ints("perm", n.attrs.perm);
    ints("starts", n.attrs.starts);
    ints("limits", n.attrs.limits);
    ints("strides", n.attrs.strides);
    ints("low", n.attrs.low);
    ints("high", n.attrs.high);
    ints("interior", n.attrs.interior);
    ints("bdims", n.attrs.broadcast_dims);
    if (!n.attrs.target_shape.empty()) {
      os << "target[";
      for (const auto& d : n.attrs.target_shape)
        os << (d.is_const() ? std::to_string(d.size()) : dim_token(d)) << ",";
      os << "]";
    }
    if (n.op == FwOpKind::kSplit) os << "ns" << n.attrs.num_splits << "ax" << n.attrs.axis;
    if (n.op == FwOpKind::kConcat) os << "ax" << n.attrs.axis;
    if (n.op == FwOpKind::kPad) os << "v" << n.attrs.pad_value;
    os << "};";
  }
  os << "|outputs:";
  for (const auto& out : g.outputs) os << out << ",";
  os << "|opts:" << (opts.inject_constraints ? "i" : "-") << (opts.enable_fusion ? "f" : "-")
     << (opts.static_fallback ? "s" : "-");
  return os.str();
}

std::shared_ptr<const CompiledPlan> Compiler::compile(const FrameworkGraph& g) {
  return compile(g, defaults_);
}

std::shared_ptr<const CompiledPlan> Compiler::compile(const FrameworkGraph& g,
                                                      const CompileOptions& opts) {
  std::string key = cache_key(g, opts);
  std::shared_future<std::shared_ptr<const CompiledPlan>> fut;
  std::promise<std::shared_ptr<const CompiledPlan>> promise;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      stats_.cache_hits++;
      fut = it->second;
    } else {
      fut = promise.get_future().share();
      cache_.emplace(key, fut);
      owner = true;
    }
  }
  if (!owner) return fut.get();

  try {
    auto plan = std::make_shared<const CompiledPlan>(compile_graph(g, opts));
    {
      std::lock_guard<std::mutex> lock(mu_);
      stats_.compile_count++;
    }
    promise.set_value(plan);
    return plan;
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      cache_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

}  // namespace disc
