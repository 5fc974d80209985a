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

#include "disc/lowering.hpp"

#include <algorithm>
#include <set>

#include "disc/error.hpp"

namespace disc {

namespace {

// One entry of a shape tensor under construction: a literal constant, a
// dimension of an existing value, or an already-emitted [1] i64 value.
struct DimEntry {
  enum class Kind { kConst, kRef, kValue };
  Kind kind{Kind::kConst};
  int64_t cval{0};
  std::string ref_id;  // kRef: value id; kValue: [1] i64 tensor id
  int ref_dim{0};
};

class Lowering {
 public:
  Lowering(const FrameworkGraph& fw, const LoweringOptions& opts) : fw_(fw), opts_(opts) {
    out_.name = fw.name;
    for (const auto& in : fw.inputs) taken_.insert(in.id);
    for (const auto& n : fw.nodes)
      for (const auto& o : n.outputs) taken_.insert(o);
  }

  std::pair<DhloGraph, ConstraintSet> run() {
    lower_inputs();
    for (const auto& n : fw_.nodes) lower_node(n);
    for (const auto& out : fw_.outputs) out_.outputs.push_back(out);
    return {std::move(out_), std::move(cs_)};
  }

 private:
  const FrameworkGraph& fw_;
  LoweringOptions opts_;
  DhloGraph out_;
  ConstraintSet cs_;
  std::set<std::string> taken_;
  int fresh_counter_{0};
  std::map<int, int> named_syms_;                       // fw sym id -> dhlo sym id
  std::map<int, std::pair<std::string, int>> sym_src_;  // dhlo sym -> (value, dim)
  std::map<std::string, ShapeVector> shapes_;           // dhlo value id -> shape
  std::map<std::string, std::string> shape_of_cache_;   // value id -> shape_of id
  std::map<std::pair<std::string, int>, std::string> dim_value_cache_;

  std::string fresh_id(const std::string& hint) {
    std::string id = hint;
    while (taken_.count(id)) id = hint + "_" + std::to_string(fresh_counter_++);
    taken_.insert(id);
    return id;
  }

  DhloOp& emit(DhloOp op) {
    shapes_[op.id] = op.shape;
    out_.ops.push_back(std::move(op));
    return out_.ops.back();
  }

  const ShapeVector& shape_of_value(const std::string& id) const { return shapes_.at(id); }

  void lower_inputs() {
    for (size_t i = 0; i < fw_.inputs.size(); ++i) {
      GraphValue v = fw_.inputs[i];
      ShapeVector lowered;
      for (int d = 0; d < v.shape.rank(); ++d) {
        const SymbolicDim& dim = v.shape.dims[d];
        if (opts_.symbolize_inputs) {
          // Fresh symbol per input dim; shared named symbols keep one id so
          // the cross-input equality survives as structure.
          int sym;
          if (dim.is_sym()) {
            auto it = named_syms_.find(dim.sym_id());
            if (it != named_syms_.end()) {
              sym = it->second;
            } else {
              sym = out_.new_symbol({SymbolOrigin::Kind::kInputDim, static_cast<int>(i), d, ""});
              named_syms_.emplace(dim.sym_id(), sym);
            }
          } else {
            sym = out_.new_symbol({SymbolOrigin::Kind::kInputDim, static_cast<int>(i), d, ""});
          }
          sym_src_.try_emplace(sym, v.id, d);
          lowered.dims.push_back(SymbolicDim::Sym(sym));
        } else {
          if (dim.is_sym()) {
            auto it = named_syms_.find(dim.sym_id());
            int sym;
            if (it != named_syms_.end()) {
              sym = it->second;
            } else {
              sym = out_.new_symbol({SymbolOrigin::Kind::kInputDim, static_cast<int>(i), d, ""});
              named_syms_.emplace(dim.sym_id(), sym);
            }
            sym_src_.try_emplace(sym, v.id, d);
            lowered.dims.push_back(SymbolicDim::Sym(sym));
          } else {
            lowered.dims.push_back(dim);
          }
        }
      }
      v.shape = lowered;
      shapes_[v.id] = lowered;
      out_.inputs.push_back(std::move(v));
    }
  }

  // --- shape tensor construction ---------------------------------------

  std::string const_i64(const std::vector<int64_t>& values, const std::string& hint) {
    DhloOp op;
    op.id = fresh_id(hint);
    op.kind = DhloOpKind::kConstant;
    op.etype = ElementType::kI64;
    op.literal.etype = ElementType::kI64;
    op.literal.dims = {static_cast<int64_t>(values.size())};
    op.literal.i64 = values;
    op.shape = ShapeVector::all_const({static_cast<int64_t>(values.size())});
    return emit(std::move(op)).id;
  }

  std::string shape_of(const std::string& value_id) {
    auto it = shape_of_cache_.find(value_id);
    if (it != shape_of_cache_.end()) return it->second;
    DhloOp op;
    op.id = fresh_id(value_id + ".shape");
    op.kind = DhloOpKind::kShapeOf;
    op.etype = ElementType::kI64;
    op.inputs = {value_id};
    op.shape = ShapeVector::all_const({shape_of_value(value_id).rank()});
    std::string id = emit(std::move(op)).id;
    shape_of_cache_.emplace(value_id, id);
    return id;
  }

  // [1] i64 value holding dim `d` of `value_id`.
  std::string dim_value(const std::string& value_id, int d) {
    auto key = std::make_pair(value_id, d);
    auto it = dim_value_cache_.find(key);
    if (it != dim_value_cache_.end()) return it->second;
    DhloOp op;
    op.id = fresh_id(value_id + ".d" + std::to_string(d));
    op.kind = DhloOpKind::kExtractDim;
    op.etype = ElementType::kI64;
    op.inputs = {shape_of(value_id)};
    op.index = d;
    op.shape = ShapeVector::all_const({1});
    std::string id = emit(std::move(op)).id;
    dim_value_cache_.emplace(key, id);
    return id;
  }

  std::string scalar_op(ScalarArithKind k, const std::string& a, const std::string& b,
                        const std::string& hint) {
    DhloOp op;
    op.id = fresh_id(hint);
    op.kind = DhloOpKind::kScalarArith;
    op.etype = ElementType::kI64;
    op.arith = k;
    op.inputs = {a, b};
    op.shape = ShapeVector::all_const({1});
    return emit(std::move(op)).id;
  }

  std::string scalar_const(int64_t v, const std::string& hint) { return const_i64({v}, hint); }

  // Builds a rank-1 i64 tensor out of entries; folds adjacent constants and
  // collapses the full shape_of(x) pattern.
  std::string build_shape_tensor(const std::vector<DimEntry>& entries, const std::string& hint) {
    // Whole thing equals shape_of(x)?
    if (!entries.empty() && entries[0].kind == DimEntry::Kind::kRef && entries[0].ref_dim == 0) {
      const std::string& src = entries[0].ref_id;
      if (shape_of_value(src).rank() == static_cast<int>(entries.size())) {
        bool all = true;
        for (size_t i = 0; i < entries.size(); ++i)
          all = all && entries[i].kind == DimEntry::Kind::kRef && entries[i].ref_id == src &&
                entries[i].ref_dim == static_cast<int>(i);
        if (all) return shape_of(src);
      }
    }
    std::vector<std::string> pieces;
    std::vector<int64_t> pending;
    auto flush = [&]() {
      if (!pending.empty()) {
        pieces.push_back(const_i64(pending, hint + ".c"));
        pending.clear();
      }
    };
    for (const auto& e : entries) {
      switch (e.kind) {
        case DimEntry::Kind::kConst:
          pending.push_back(e.cval);
          break;
        case DimEntry::Kind::kRef:
          flush();
          pieces.push_back(dim_value(e.ref_id, e.ref_dim));
          break;
        case DimEntry::Kind::kValue:
          flush();
          pieces.push_back(e.ref_id);
          break;
      }
    }
    flush();
    if (pieces.size() == 1) return pieces[0];
    DhloOp op;
    op.id = fresh_id(hint);
    op.kind = DhloOpKind::kConcat;
    op.etype = ElementType::kI64;
    op.axis = 0;
    op.inputs = pieces;
    op.shape = ShapeVector::all_const({static_cast<int64_t>(entries.size())});
    return emit(std::move(op)).id;
  }

  // Entry for one symbolic-or-const dim of an existing value.
  DimEntry entry_for_dim(const std::string& value_id, int d) {
    const SymbolicDim& dim = shape_of_value(value_id).dims[d];
    DimEntry e;
    if (dim.is_const()) {
      e.kind = DimEntry::Kind::kConst;
      e.cval = dim.size();
    } else {
      auto src = sym_src_.at(dim.sym_id());
      e.kind = DimEntry::Kind::kRef;
      e.ref_id = src.first;
      e.ref_dim = src.second;
    }
    return e;
  }

  int derived_sym(const std::string& op_id, int dim) {
    return out_.new_symbol({SymbolOrigin::Kind::kDerived, -1, dim, op_id});
  }

  // --- node lowering -----------------------------------------------------

  void lower_node(const FrameworkNode& n) {
    switch (n.op) {
      case FwOpKind::kAdd: lower_elementwise(n, DhloOpKind::kAdd); break;
      case FwOpKind::kSub: lower_elementwise(n, DhloOpKind::kSub); break;
      case FwOpKind::kMul: lower_elementwise(n, DhloOpKind::kMul); break;
      case FwOpKind::kDiv: lower_elementwise(n, DhloOpKind::kDiv); break;
      case FwOpKind::kMaximum: lower_elementwise(n, DhloOpKind::kMaximum); break;
      case FwOpKind::kExp: lower_unary(n, DhloOpKind::kExp); break;
      case FwOpKind::kTanh: lower_unary(n, DhloOpKind::kTanh); break;
      case FwOpKind::kNeg: lower_unary(n, DhloOpKind::kNeg); break;
      case FwOpKind::kReduceSum: lower_reduce(n, DhloOpKind::kReduceSum); break;
      case FwOpKind::kReduceMax: lower_reduce(n, DhloOpKind::kReduceMax); break;
      case FwOpKind::kTranspose: lower_transpose(n); break;
      case FwOpKind::kReshape: lower_reshape(n); break;
      case FwOpKind::kBroadcast: lower_broadcast(n); break;
      case FwOpKind::kSlice: lower_slice(n); break;
      case FwOpKind::kPad: lower_pad(n); break;
      case FwOpKind::kSplit: lower_split(n); break;
      case FwOpKind::kConcat: lower_concat(n); break;
      case FwOpKind::kMatMul: lower_matmul(n); break;
      case FwOpKind::kSoftmax: lower_softmax(n); break;
    }
  }

  ShapeVector merge_elementwise(const ShapeVector& a, const ShapeVector& b) {
    ShapeVector out;
    for (int i = 0; i < a.rank(); ++i) {
      bool prefer_b = !a.dims[i].is_const() && b.dims[i].is_const();
      out.dims.push_back(prefer_b ? b.dims[i] : a.dims[i]);
    }
    return out;
  }

  void lower_elementwise(const FrameworkNode& n, DhloOpKind k) {
    DhloOp op;
    op.id = n.outputs[0];
    op.kind = k;
    op.inputs = n.inputs;
    op.shape = merge_elementwise(shape_of_value(n.inputs[0]), shape_of_value(n.inputs[1]));
    emit(std::move(op));
  }

  void lower_unary(const FrameworkNode& n, DhloOpKind k) {
    DhloOp op;
    op.id = n.outputs[0];
    op.kind = k;
    op.inputs = n.inputs;
    op.shape = shape_of_value(n.inputs[0]);
    emit(std::move(op));
  }

  ShapeVector reduce_shape(const ShapeVector& in, const std::vector<int64_t>& axes) {
    std::set<int64_t> set(axes.begin(), axes.end());
    ShapeVector out;
    for (int i = 0; i < in.rank(); ++i)
      if (!set.count(i)) out.dims.push_back(in.dims[i]);
    return out;
  }

  void lower_reduce(const FrameworkNode& n, DhloOpKind k) {
    DhloOp op;
    op.id = n.outputs[0];
    op.kind = k;
    op.inputs = n.inputs;
    op.dims_attr = n.attrs.axes;
    op.shape = reduce_shape(shape_of_value(n.inputs[0]), n.attrs.axes);
    emit(std::move(op));
  }

  void lower_transpose(const FrameworkNode& n) {
    const ShapeVector& in = shape_of_value(n.inputs[0]);
    DhloOp op;
    op.id = n.outputs[0];
    op.kind = DhloOpKind::kTranspose;
    op.inputs = n.inputs;
    op.dims_attr = n.attrs.perm;
    for (int64_t p : n.attrs.perm) op.shape.dims.push_back(in.dims[p]);
    emit(std::move(op));
  }

  // Resolves a Reshape/Broadcast target entry to a DHLO dim plus the shape
  // tensor entry producing its runtime value.
  struct TargetDim {
    SymbolicDim dim;
    DimEntry entry;
    bool resolved{false};
  };

  TargetDim resolve_target_entry(const SymbolicDim& fw_entry) {
    TargetDim t;
    if (fw_entry.is_const()) {
      t.dim = fw_entry;
      t.entry.kind = DimEntry::Kind::kConst;
      t.entry.cval = fw_entry.size();
      t.resolved = true;
      return t;
    }
    auto it = named_syms_.find(fw_entry.sym_id());
    if (it != named_syms_.end()) {
      int sym = it->second;
      auto src = sym_src_.at(sym);
      t.dim = SymbolicDim::Sym(sym);
      t.entry.kind = DimEntry::Kind::kRef;
      t.entry.ref_id = src.first;
      t.entry.ref_dim = src.second;
      t.resolved = true;
      return t;
    }
    return t;  // unresolved: the caller infers it
  }

  void lower_reshape(const FrameworkNode& n) {
    const std::string& x = n.inputs[0];
    const ShapeVector& in = shape_of_value(x);
    std::string id = n.outputs[0];

    std::vector<TargetDim> targets;
    int unresolved = -1;
    for (size_t i = 0; i < n.attrs.target_shape.size(); ++i) {
      TargetDim t = resolve_target_entry(n.attrs.target_shape[i]);
      if (!t.resolved) {
        if (unresolved >= 0)
          throw ValidationError("node " + n.id + ": more than one unresolved reshape dim");
        unresolved = static_cast<int>(i);
      }
      targets.push_back(t);
    }

    // The unresolved dim is numel(input) / product(resolved dims): constant
    // when everything in sight is constant, otherwise emitted arithmetic.
    if (unresolved >= 0) {
      bool all_const = in.is_static();
      int64_t known = 1;
      for (size_t i = 0; i < targets.size(); ++i) {
        if (static_cast<int>(i) == unresolved) continue;
        if (targets[i].entry.kind == DimEntry::Kind::kConst)
          known *= targets[i].entry.cval;
        else
          all_const = false;
      }
      if (all_const) {
        int64_t v = known == 0 ? 0 : in.static_numel() / known;
        targets[unresolved].dim = SymbolicDim::Const(v);
        targets[unresolved].entry.kind = DimEntry::Kind::kConst;
        targets[unresolved].entry.cval = v;
      } else {
        // numel(in) as a scalar chain, divided by resolved entries.
        std::string numel = scalar_const(1, id + ".one");
        int64_t const_in = 1;
        for (int d = 0; d < in.rank(); ++d) {
          if (in.dims[d].is_const()) {
            const_in *= in.dims[d].size();
          } else {
            numel = scalar_op(ScalarArithKind::kMul, numel, dim_value(x, d), id + ".numel");
          }
        }
        if (const_in != 1)
          numel = scalar_op(ScalarArithKind::kMul, numel, scalar_const(const_in, id + ".cin"),
                            id + ".numel");
        std::string denom;
        int64_t const_denom = 1;
        for (size_t i = 0; i < targets.size(); ++i) {
          if (static_cast<int>(i) == unresolved) continue;
          if (targets[i].entry.kind == DimEntry::Kind::kConst) {
            const_denom *= targets[i].entry.cval;
          } else {
            std::string v = dim_value(targets[i].entry.ref_id, targets[i].entry.ref_dim);
            denom = denom.empty() ? v : scalar_op(ScalarArithKind::kMul, denom, v, id + ".den");
          }
        }
        if (const_denom != 1 || denom.empty()) {
          std::string c = scalar_const(const_denom, id + ".cden");
          denom = denom.empty() ? c : scalar_op(ScalarArithKind::kMul, denom, c, id + ".den");
        }
        std::string val = scalar_op(ScalarArithKind::kDiv, numel, denom, id + ".infer");
        int sym = derived_sym(id, unresolved);
        targets[unresolved].dim = SymbolicDim::Sym(sym);
        targets[unresolved].entry.kind = DimEntry::Kind::kValue;
        targets[unresolved].entry.ref_id = val;
      }
    }

    std::vector<DimEntry> entries;
    ShapeVector out_shape;
    for (const auto& t : targets) {
      entries.push_back(t.entry);
      out_shape.dims.push_back(t.dim);
    }
    std::string shape_tensor = build_shape_tensor(entries, id + ".target");

    DhloOp op;
    op.id = id;
    op.kind = DhloOpKind::kDynamicReshape;
    op.inputs = {x, shape_tensor};
    op.shape = out_shape;
    emit(std::move(op));
    for (int i = 0; i < out_shape.rank(); ++i)
      if (out_shape.dims[i].is_sym()) sym_src_.try_emplace(out_shape.dims[i].sym_id(), id, i);

    if (opts_.inject_constraints) cs_.link_size(in, out_shape);
  }

  void lower_broadcast(const FrameworkNode& n) {
    std::string id = n.outputs[0];
    std::vector<DimEntry> entries;
    ShapeVector out_shape;
    for (const auto& e : n.attrs.target_shape) {
      TargetDim t = resolve_target_entry(e);
      if (!t.resolved)
        throw ValidationError("node " + n.id + ": broadcast target symbol has no source");
      entries.push_back(t.entry);
      out_shape.dims.push_back(t.dim);
    }
    std::string shape_tensor = build_shape_tensor(entries, id + ".target");
    DhloOp op;
    op.id = id;
    op.kind = DhloOpKind::kDynamicBroadcastInDim;
    op.inputs = {n.inputs[0], shape_tensor};
    op.dims_attr = n.attrs.broadcast_dims;
    op.shape = out_shape;
    emit(std::move(op));
  }

  void lower_slice(const FrameworkNode& n) {
    std::string id = n.outputs[0];
    int r = shape_of_value(n.inputs[0]).rank();
    std::string starts = const_i64(n.attrs.starts, id + ".starts");
    std::string limits = const_i64(n.attrs.limits, id + ".limits");
    std::string strides = const_i64(n.attrs.strides, id + ".strides");
    DhloOp op;
    op.id = id;
    op.kind = DhloOpKind::kDynamicSlice;
    op.inputs = {n.inputs[0], starts, limits, strides};
    // Constant attrs make the result extent constant regardless of the
    // input's symbolic dims.
    for (int i = 0; i < r; ++i) {
      int64_t extent = std::max<int64_t>(n.attrs.limits[i] - n.attrs.starts[i], 0);
      op.shape.dims.push_back(SymbolicDim::Const((extent + n.attrs.strides[i] - 1) /
                                                 n.attrs.strides[i]));
    }
    emit(std::move(op));
  }

  void lower_pad(const FrameworkNode& n) {
    std::string id = n.outputs[0];
    const std::string& x = n.inputs[0];
    const ShapeVector& in = shape_of_value(x);
    DhloOp value;
    value.id = fresh_id(id + ".value");
    value.kind = DhloOpKind::kConstant;
    value.etype = ElementType::kF32;
    value.literal.etype = ElementType::kF32;
    value.literal.dims = {};
    value.literal.f32 = {n.attrs.pad_value};
    value.shape = ShapeVector();
    std::string value_id = emit(std::move(value)).id;

    std::string low = const_i64(n.attrs.low, id + ".low");
    std::string high = const_i64(n.attrs.high, id + ".high");
    std::string interior = const_i64(n.attrs.interior, id + ".interior");

    DhloOp op;
    op.id = id;
    op.kind = DhloOpKind::kDynamicPad;
    op.inputs = {x, value_id, low, high, interior};
    for (int i = 0; i < in.rank(); ++i) {
      if (in.dims[i].is_const()) {
        int64_t d = in.dims[i].size();
        op.shape.dims.push_back(SymbolicDim::Const(
            n.attrs.low[i] + n.attrs.high[i] + d + (d > 0 ? (d - 1) * n.attrs.interior[i] : 0)));
      } else {
        op.shape.dims.push_back(SymbolicDim::Sym(derived_sym(id, i)));
      }
    }
    emit(std::move(op));
    for (int i = 0; i < in.rank(); ++i)
      if (out_.ops.back().shape.dims[i].is_sym())
        sym_src_.try_emplace(out_.ops.back().shape.dims[i].sym_id(), id, i);
  }

  // Split(n, axis) lowers to n dynamic_slice ops whose start/limit operands
  // are emitted shape computations. The slices are independent afterwards;
  // the injected constraints recover what the op semantics knew.
  void lower_split(const FrameworkNode& n) {
    const std::string& x = n.inputs[0];
    const ShapeVector& in = shape_of_value(x);
    int r = in.rank();
    int64_t ns = n.attrs.num_splits;
    int ax = static_cast<int>(n.attrs.axis);

    // Per-part extent along the split axis.
    bool axis_const = in.dims[ax].is_const();
    int64_t extent_c = axis_const ? in.dims[ax].size() / ns : 0;
    std::string extent_v;
    if (!axis_const)
      extent_v = scalar_op(ScalarArithKind::kDiv, dim_value(x, ax),
                           scalar_const(ns, n.id + ".ns"), n.id + ".extent");

    std::vector<ShapeVector> result_shapes;
    for (int64_t part = 0; part < ns; ++part) {
      const std::string& id = n.outputs[part];
      std::vector<DimEntry> starts(r), limits(r);
      std::vector<int64_t> stride_vals(r, 1);
      for (int i = 0; i < r; ++i) {
        if (i == ax) {
          if (axis_const) {
            starts[i] = {DimEntry::Kind::kConst, part * extent_c, "", 0};
            limits[i] = {DimEntry::Kind::kConst, (part + 1) * extent_c, "", 0};
          } else {
            std::string s = part == 0
                                ? scalar_const(0, id + ".s")
                                : scalar_op(ScalarArithKind::kMul, extent_v,
                                            scalar_const(part, id + ".p"), id + ".start");
            std::string l = scalar_op(ScalarArithKind::kMul, extent_v,
                                      scalar_const(part + 1, id + ".q"), id + ".limit");
            starts[i] = {DimEntry::Kind::kValue, 0, s, 0};
            limits[i] = {DimEntry::Kind::kValue, 0, l, 0};
          }
        } else {
          starts[i] = {DimEntry::Kind::kConst, 0, "", 0};
          limits[i] = entry_for_dim(x, i);
        }
      }
      std::string starts_t = build_shape_tensor(starts, id + ".starts");
      std::string limits_t = build_shape_tensor(limits, id + ".limits");
      std::string strides_t = const_i64(stride_vals, id + ".strides");

      DhloOp op;
      op.id = id;
      op.kind = DhloOpKind::kDynamicSlice;
      op.inputs = {x, starts_t, limits_t, strides_t};
      for (int i = 0; i < r; ++i) {
        if (i == ax) {
          op.shape.dims.push_back(axis_const ? SymbolicDim::Const(extent_c)
                                             : SymbolicDim::Sym(derived_sym(id, i)));
        } else {
          op.shape.dims.push_back(in.dims[i].is_const()
                                      ? in.dims[i]
                                      : SymbolicDim::Sym(derived_sym(id, i)));
        }
      }
      emit(std::move(op));
      const ShapeVector& rs = out_.ops.back().shape;
      for (int i = 0; i < r; ++i)
        if (rs.dims[i].is_sym()) sym_src_.try_emplace(rs.dims[i].sym_id(), id, i);
      result_shapes.push_back(rs);
    }

    // The frontend knows every output of Split has the same shape and that
    // non-split dims equal the input's; that is lost in the slices above.
    if (opts_.inject_constraints) {
      for (int64_t part = 0; part < ns; ++part) {
        for (int i = 0; i < r; ++i) {
          if (i != ax)
            cs_.union_dims(result_shapes[part].dims[i], in.dims[i], "split " + n.id);
          else if (part > 0)
            cs_.union_dims(result_shapes[part].dims[i], result_shapes[0].dims[i],
                           "split " + n.id);
        }
      }
    }
  }

  void lower_concat(const FrameworkNode& n) {
    std::string id = n.outputs[0];
    int ax = static_cast<int>(n.attrs.axis);
    const ShapeVector& first = shape_of_value(n.inputs[0]);
    DhloOp op;
    op.id = id;
    op.kind = DhloOpKind::kConcat;
    op.axis = ax;
    op.inputs = n.inputs;
    bool axis_const = true;
    int64_t axis_sum = 0;
    for (const auto& arg : n.inputs) {
      const SymbolicDim& d = shape_of_value(arg).dims[ax];
      if (d.is_const())
        axis_sum += d.size();
      else
        axis_const = false;
    }
    for (int i = 0; i < first.rank(); ++i) {
      if (i == ax) {
        op.shape.dims.push_back(axis_const ? SymbolicDim::Const(axis_sum)
                                           : SymbolicDim::Sym(derived_sym(id, i)));
      } else {
        SymbolicDim dim = first.dims[i];
        for (const auto& arg : n.inputs)
          if (shape_of_value(arg).dims[i].is_const()) dim = shape_of_value(arg).dims[i];
        op.shape.dims.push_back(dim);
      }
    }
    emit(std::move(op));
    const ShapeVector& rs = out_.ops.back().shape;
    for (int i = 0; i < rs.rank(); ++i)
      if (rs.dims[i].is_sym()) sym_src_.try_emplace(rs.dims[i].sym_id(), id, i);
  }

  void lower_matmul(const FrameworkNode& n) {
    DhloOp op;
    op.id = n.outputs[0];
    op.kind = DhloOpKind::kMatMul;
    op.inputs = n.inputs;
    op.shape.dims = {shape_of_value(n.inputs[0]).dims[0], shape_of_value(n.inputs[1]).dims[1]};
    emit(std::move(op));
  }

  // Fixed lowering: reduce_max, broadcast, sub, exp, reduce_sum, broadcast,
  // div over the last axis.
  void lower_softmax(const FrameworkNode& n) {
    const std::string& x = n.inputs[0];
    const ShapeVector& in = shape_of_value(x);
    std::string id = n.outputs[0];
    int r = in.rank();
    std::vector<int64_t> axes = {r - 1};
    std::vector<int64_t> bdims;
    for (int i = 0; i + 1 < r; ++i) bdims.push_back(i);

    DhloOp rmax;
    rmax.id = fresh_id(id + ".max");
    rmax.kind = DhloOpKind::kReduceMax;
    rmax.inputs = {x};
    rmax.dims_attr = axes;
    rmax.shape = reduce_shape(in, axes);
    std::string rmax_id = emit(std::move(rmax)).id;

    std::string xshape = shape_of(x);

    DhloOp bmax;
    bmax.id = fresh_id(id + ".maxb");
    bmax.kind = DhloOpKind::kDynamicBroadcastInDim;
    bmax.inputs = {rmax_id, xshape};
    bmax.dims_attr = bdims;
    bmax.shape = in;
    std::string bmax_id = emit(std::move(bmax)).id;

    DhloOp sub;
    sub.id = fresh_id(id + ".sub");
    sub.kind = DhloOpKind::kSub;
    sub.inputs = {x, bmax_id};
    sub.shape = in;
    std::string sub_id = emit(std::move(sub)).id;

    DhloOp ex;
    ex.id = fresh_id(id + ".exp");
    ex.kind = DhloOpKind::kExp;
    ex.inputs = {sub_id};
    ex.shape = in;
    std::string ex_id = emit(std::move(ex)).id;

    DhloOp rsum;
    rsum.id = fresh_id(id + ".sum");
    rsum.kind = DhloOpKind::kReduceSum;
    rsum.inputs = {ex_id};
    rsum.dims_attr = axes;
    rsum.shape = reduce_shape(in, axes);
    std::string rsum_id = emit(std::move(rsum)).id;

    DhloOp bsum;
    bsum.id = fresh_id(id + ".sumb");
    bsum.kind = DhloOpKind::kDynamicBroadcastInDim;
    bsum.inputs = {rsum_id, xshape};
    bsum.dims_attr = bdims;
    bsum.shape = in;
    std::string bsum_id = emit(std::move(bsum)).id;

    DhloOp div;
    div.id = id;
    div.kind = DhloOpKind::kDiv;
    div.inputs = {ex_id, bsum_id};
    div.shape = in;
    emit(std::move(div));
  }
};

}  // namespace

std::pair<DhloGraph, ConstraintSet> lower_to_dhlo(const FrameworkGraph& g,
                                                  const LoweringOptions& options) {
  Lowering lowering(g, options);
  return lowering.run();
}

}  // namespace disc
