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

#include "disc/interpreter.hpp"

#include <algorithm>
#include <cmath>

#include "disc/error.hpp"
#include "disc/kernels.hpp"

namespace disc {

namespace {

// Tracks refcounted peak bytes over compute-op outputs.
class PeakTracker {
 public:
  void alloc(const std::string& id, int64_t bytes) {
    live_[id] = bytes;
    current_ += bytes;
    peak_ = std::max(peak_, current_);
  }
  void release(const std::string& id) {
    auto it = live_.find(id);
    if (it == live_.end()) return;
    current_ -= it->second;
    live_.erase(it);
  }
  int64_t peak() const { return peak_; }

 private:
  std::map<std::string, int64_t> live_;
  int64_t current_{0};
  int64_t peak_{0};
};

// Binds concrete input dims against declared shapes; named symbols must be
// consistent everywhere they appear.
std::map<int, int64_t> bind_symbols(const std::vector<GraphValue>& decls,
                                    const Binding& inputs, const std::string& what) {
  std::map<int, int64_t> sym_values;
  for (const auto& decl : decls) {
    auto it = inputs.find(decl.id);
    if (it == inputs.end()) throw RuntimeError(what + ": missing input " + decl.id);
    const ConcreteTensor& t = it->second;
    if (t.rank() != decl.shape.rank())
      throw RuntimeError(what + ": input " + decl.id + " rank mismatch");
    for (int i = 0; i < t.rank(); ++i) {
      const SymbolicDim& d = decl.shape.dims[i];
      if (d.is_const()) {
        if (t.dims[i] != d.size())
          throw RuntimeError(what + ": input " + decl.id + " dim " + std::to_string(i) +
                             " expected " + std::to_string(d.size()) + ", got " +
                             std::to_string(t.dims[i]));
      } else {
        auto [pos, inserted] = sym_values.emplace(d.sym_id(), t.dims[i]);
        if (!inserted && pos->second != t.dims[i])
          throw RuntimeError(what + ": inconsistent symbol binding for " + d.str() +
                             " at input " + decl.id);
      }
    }
  }
  return sym_values;
}

std::vector<int64_t> i64_values(const ConcreteTensor& t) { return t.i64; }

}  // namespace

ConcreteTensor eval_dhlo_op(const DhloOp& op, const std::vector<const ConcreteTensor*>& args) {
  switch (op.kind) {
    case DhloOpKind::kAdd:
    case DhloOpKind::kSub:
    case DhloOpKind::kMul:
    case DhloOpKind::kDiv:
    case DhloOpKind::kMaximum: {
      const ConcreteTensor &a = *args[0], &b = *args[1];
      if (a.dims != b.dims)
        throw RuntimeError("op " + op.id + ": elementwise shape mismatch " + a.shape_str() +
                           " vs " + b.shape_str());
      ConcreteTensor out = ConcreteTensor::zeros_f32(a.dims);
      for (int64_t i = 0; i < out.numel(); ++i)
        out.f32[i] = apply_binary(op.kind, a.f32[i], b.f32[i]);
      return out;
    }
    case DhloOpKind::kExp:
    case DhloOpKind::kTanh:
    case DhloOpKind::kNeg: {
      const ConcreteTensor& a = *args[0];
      ConcreteTensor out = ConcreteTensor::zeros_f32(a.dims);
      for (int64_t i = 0; i < out.numel(); ++i) out.f32[i] = apply_unary(op.kind, a.f32[i]);
      return out;
    }
    case DhloOpKind::kReduceSum:
    case DhloOpKind::kReduceMax:
      return eval_reduce(op.kind, *args[0], op.dims_attr);
    case DhloOpKind::kTranspose:
      return eval_transpose(*args[0], op.dims_attr);
    case DhloOpKind::kDynamicBroadcastInDim:
      return eval_broadcast(*args[0], i64_values(*args[1]), op.dims_attr);
    case DhloOpKind::kDynamicReshape:
      return eval_reshape(*args[0], i64_values(*args[1]));
    case DhloOpKind::kDynamicSlice:
      return eval_slice(*args[0], i64_values(*args[1]), i64_values(*args[2]),
                        i64_values(*args[3]));
    case DhloOpKind::kDynamicPad: {
      const ConcreteTensor& value = *args[1];
      if (value.rank() != 0) throw RuntimeError("op " + op.id + ": pad value must be scalar");
      return eval_pad(*args[0], value.f32[0], i64_values(*args[2]), i64_values(*args[3]),
                      i64_values(*args[4]));
    }
    case DhloOpKind::kConcat:
      return eval_concat(args, op.axis);
    case DhloOpKind::kMatMul:
      return eval_matmul(*args[0], *args[1]);
    case DhloOpKind::kConstant: {
      ConcreteTensor t;
      t.etype = op.literal.etype;
      t.dims = op.literal.dims;
      t.f32 = op.literal.f32;
      t.i64 = op.literal.i64;
      t.check();
      return t;
    }
    case DhloOpKind::kShapeOf: {
      const ConcreteTensor& a = *args[0];
      return ConcreteTensor::from_i64({a.rank()}, a.dims);
    }
    case DhloOpKind::kExtractDim: {
      const ConcreteTensor& a = *args[0];
      if (op.index < 0 || op.index >= a.numel())
        throw RuntimeError("op " + op.id + ": extract_dim index out of range");
      return ConcreteTensor::from_i64({1}, {a.i64[op.index]});
    }
    case DhloOpKind::kScalarArith: {
      const ConcreteTensor &a = *args[0], &b = *args[1];
      return ConcreteTensor::from_i64({1}, {apply_scalar_arith(op.arith, a.i64[0], b.i64[0])});
    }
  }
  throw InternalError("unhandled dhlo op kind");
}

std::vector<ConcreteTensor> eval_eager(const DhloGraph& g, const Binding& inputs,
                                       EagerStats* stats) {
  bind_symbols(g.inputs, inputs, "dhlo eval");
  std::map<std::string, ConcreteTensor> env;
  for (const auto& in : g.inputs) env[in.id] = inputs.at(in.id);

  // Remaining-use counts for peak accounting.
  std::map<std::string, int> uses;
  for (const auto& op : g.ops)
    for (const auto& arg : op.inputs) uses[arg]++;
  for (const auto& out : g.outputs) uses[out]++;

  PeakTracker peak;
  EagerStats local;
  for (const auto& op : g.ops) {
    std::vector<const ConcreteTensor*> args;
    args.reserve(op.inputs.size());
    for (const auto& arg : op.inputs) {
      auto it = env.find(arg);
      if (it == env.end()) throw RuntimeError("op " + op.id + ": missing operand " + arg);
      args.push_back(&it->second);
    }
    ConcreteTensor result = eval_dhlo_op(op, args);
    if (is_compute_op(op.kind) && op.etype == ElementType::kF32) {
      local.op_count++;
      peak.alloc(op.id, result.byte_size());
    }
    env[op.id] = std::move(result);
    for (const auto& arg : op.inputs) {
      if (--uses[arg] == 0 && g.find_op(arg) != nullptr) peak.release(arg);
    }
  }
  local.peak_bytes = peak.peak();
  if (stats) *stats = local;

  std::vector<ConcreteTensor> outs;
  for (const auto& out : g.outputs) {
    auto it = env.find(out);
    if (it == env.end()) throw RuntimeError("missing graph output " + out);
    outs.push_back(it->second);
  }
  return outs;
}

namespace {

// Framework softmax mirrors the fixed lowering (max-subtract form) so the
// two levels agree numerically.
ConcreteTensor eval_fw_softmax(const ConcreteTensor& x) {
  std::vector<int64_t> axes = {x.rank() - 1};
  ConcreteTensor mx = eval_reduce(DhloOpKind::kReduceMax, x, axes);
  std::vector<int64_t> bdims;
  for (int i = 0; i + 1 < x.rank(); ++i) bdims.push_back(i);
  ConcreteTensor mxb = eval_broadcast(mx, x.dims, bdims);
  ConcreteTensor shifted = ConcreteTensor::zeros_f32(x.dims);
  for (int64_t i = 0; i < x.numel(); ++i)
    shifted.f32[i] = std::exp(x.f32[i] - mxb.f32[i]);
  ConcreteTensor denom = eval_reduce(DhloOpKind::kReduceSum, shifted, axes);
  ConcreteTensor denomb = eval_broadcast(denom, x.dims, bdims);
  ConcreteTensor out = ConcreteTensor::zeros_f32(x.dims);
  for (int64_t i = 0; i < x.numel(); ++i) out.f32[i] = shifted.f32[i] / denomb.f32[i];
  return out;
}

}  // namespace

std::vector<ConcreteTensor> eval_eager(const FrameworkGraph& g, const Binding& inputs,
                                       EagerStats* stats) {
  std::map<int, int64_t> sym_values = bind_symbols(g.inputs, inputs, "eager eval");
  std::map<std::string, ConcreteTensor> env;
  for (const auto& in : g.inputs) env[in.id] = inputs.at(in.id);

  std::map<std::string, int> uses;
  for (const auto& n : g.nodes)
    for (const auto& arg : n.inputs) uses[arg]++;
  for (const auto& out : g.outputs) uses[out]++;
  std::map<std::string, bool> is_node_output;

  auto resolve_target = [&](const std::vector<SymbolicDim>& target, int64_t in_numel,
                            const std::string& node, bool allow_infer) {
    std::vector<int64_t> dims(target.size(), -1);
    int64_t known = 1;
    int unknown = -1;
    for (size_t i = 0; i < target.size(); ++i) {
      if (target[i].is_const()) {
        dims[i] = target[i].size();
      } else {
        auto it = sym_values.find(target[i].sym_id());
        if (it != sym_values.end()) dims[i] = it->second;
      }
      if (dims[i] >= 0)
        known *= dims[i];
      else if (unknown < 0)
        unknown = static_cast<int>(i);
      else
        throw RuntimeError("node " + node + ": more than one unresolved target dim");
    }
    if (unknown >= 0) {
      if (!allow_infer) throw RuntimeError("node " + node + ": unresolved target dim");
      dims[unknown] = known == 0 ? 0 : in_numel / known;
    }
    return dims;
  };

  PeakTracker peak;
  EagerStats local;
  for (const auto& n : g.nodes) {
    std::vector<const ConcreteTensor*> args;
    for (const auto& arg : n.inputs) args.push_back(&env.at(arg));
    std::vector<ConcreteTensor> results;

    switch (n.op) {
      case FwOpKind::kAdd:
      case FwOpKind::kSub:
      case FwOpKind::kMul:
      case FwOpKind::kDiv:
      case FwOpKind::kMaximum: {
        DhloOp op;
        op.id = n.id;
        switch (n.op) {
          case FwOpKind::kAdd: op.kind = DhloOpKind::kAdd; break;
          case FwOpKind::kSub: op.kind = DhloOpKind::kSub; break;
          case FwOpKind::kMul: op.kind = DhloOpKind::kMul; break;
          case FwOpKind::kDiv: op.kind = DhloOpKind::kDiv; break;
          default: op.kind = DhloOpKind::kMaximum; break;
        }
        results.push_back(eval_dhlo_op(op, args));
        break;
      }
      case FwOpKind::kExp:
      case FwOpKind::kTanh:
      case FwOpKind::kNeg: {
        DhloOp op;
        op.id = n.id;
        op.kind = n.op == FwOpKind::kExp   ? DhloOpKind::kExp
                  : n.op == FwOpKind::kTanh ? DhloOpKind::kTanh
                                            : DhloOpKind::kNeg;
        results.push_back(eval_dhlo_op(op, args));
        break;
      }
      case FwOpKind::kReduceSum:
        results.push_back(eval_reduce(DhloOpKind::kReduceSum, *args[0], n.attrs.axes));
        break;
      case FwOpKind::kReduceMax:
        results.push_back(eval_reduce(DhloOpKind::kReduceMax, *args[0], n.attrs.axes));
        break;
      case FwOpKind::kTranspose:
        results.push_back(eval_transpose(*args[0], n.attrs.perm));
        break;
      case FwOpKind::kReshape: {
        auto dims = resolve_target(n.attrs.target_shape, args[0]->numel(), n.id, true);
        results.push_back(eval_reshape(*args[0], dims));
        break;
      }
      case FwOpKind::kBroadcast: {
        auto dims = resolve_target(n.attrs.target_shape, args[0]->numel(), n.id, false);
        results.push_back(eval_broadcast(*args[0], dims, n.attrs.broadcast_dims));
        break;
      }
      case FwOpKind::kSlice:
        results.push_back(eval_slice(*args[0], n.attrs.starts, n.attrs.limits, n.attrs.strides));
        break;
      case FwOpKind::kPad:
        results.push_back(eval_pad(*args[0], n.attrs.pad_value, n.attrs.low, n.attrs.high,
                                   n.attrs.interior));
        break;
      case FwOpKind::kSplit: {
        const ConcreteTensor& x = *args[0];
        int64_t ax = n.attrs.axis, ns = n.attrs.num_splits;
        if (x.dims[ax] % ns != 0)
          throw RuntimeError("node " + n.id + ": split dim not divisible at runtime");
        int64_t extent = x.dims[ax] / ns;
        for (int64_t part = 0; part < ns; ++part) {
          std::vector<int64_t> starts(x.rank(), 0), limits = x.dims, strides(x.rank(), 1);
          starts[ax] = part * extent;
          limits[ax] = (part + 1) * extent;
          results.push_back(eval_slice(x, starts, limits, strides));
        }
        break;
      }
      case FwOpKind::kConcat:
        results.push_back(eval_concat(args, n.attrs.axis));
        break;
      case FwOpKind::kMatMul:
        results.push_back(eval_matmul(*args[0], *args[1]));
        break;
      case FwOpKind::kSoftmax:
        results.push_back(eval_fw_softmax(*args[0]));
        break;
    }

    // Bind symbols observed in node outputs for later target resolution,
    // and check declared symbolic shapes stay consistent.
    for (size_t k = 0; k < results.size(); ++k) {
      const ShapeVector& declared = g.shape_of(n.outputs[k]);
      const ConcreteTensor& r = results[k];
      if (declared.rank() != r.rank())
        throw RuntimeError("node " + n.id + ": result rank mismatch");
      for (int i = 0; i < r.rank(); ++i) {
        if (declared.dims[i].is_const()) {
          if (declared.dims[i].size() != r.dims[i])
            throw RuntimeError("node " + n.id + ": result dim mismatch");
        } else {
          auto [pos, inserted] = sym_values.emplace(declared.dims[i].sym_id(), r.dims[i]);
          if (!inserted && pos->second != r.dims[i])
            throw RuntimeError("node " + n.id + ": inconsistent symbol binding");
        }
      }
      local.op_count++;
      peak.alloc(n.outputs[k], r.byte_size());
      is_node_output[n.outputs[k]] = true;
      env[n.outputs[k]] = std::move(results[k]);
    }
    for (const auto& arg : n.inputs)
      if (--uses[arg] == 0 && is_node_output.count(arg)) peak.release(arg);
  }
  local.peak_bytes = peak.peak();
  if (stats) *stats = local;

  std::vector<ConcreteTensor> outs;
  for (const auto& out : g.outputs) outs.push_back(env.at(out));
  return outs;
}

}  // namespace disc
