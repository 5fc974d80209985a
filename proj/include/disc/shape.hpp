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

#ifndef DISC_SHAPE_HPP_
#define DISC_SHAPE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disc/error.hpp"

namespace disc {

enum class ElementType { kF32, kI64 };

inline const char* element_type_name(ElementType t) {
  return t == ElementType::kF32 ? "f32" : "i64";
}

// One ranked dimension: either a compile-time constant or a symbol index.
// Symbol indices are dense, allocated by a per-graph counter.
class SymbolicDim {
 public:
  SymbolicDim() : value_(0), sym_(-1) {}

  static SymbolicDim Const(int64_t size) {
    if (size < 0) throw InternalError("SymbolicDim: negative constant dim");
    SymbolicDim d;
    d.value_ = size;
    d.sym_ = -1;
    return d;
  }
  static SymbolicDim Sym(int sym_id) {
    if (sym_id < 0) throw InternalError("SymbolicDim: negative symbol id");
    SymbolicDim d;
    d.sym_ = sym_id;
    return d;
  }

  bool is_const() const { return sym_ < 0; }
  bool is_sym() const { return sym_ >= 0; }
  int64_t size() const {
    if (!is_const()) throw InternalError("SymbolicDim: size() on symbolic dim");
    return value_;
  }
  int sym_id() const {
    if (!is_sym()) throw InternalError("SymbolicDim: sym_id() on constant dim");
    return sym_;
  }

  bool operator==(const SymbolicDim& o) const {
    return sym_ == o.sym_ && (is_sym() || value_ == o.value_);
  }
  bool operator!=(const SymbolicDim& o) const { return !(*this == o); }

  std::string str() const {
    return is_const() ? std::to_string(value_) : ("s" + std::to_string(sym_));
  }

 private:
  int64_t value_;
  int sym_;
};

// A ranked shape. Rank 0 denotes a scalar.
struct ShapeVector {
  std::vector<SymbolicDim> dims;

  ShapeVector() = default;
  explicit ShapeVector(std::vector<SymbolicDim> d) : dims(std::move(d)) {}

  int rank() const { return static_cast<int>(dims.size()); }
  bool is_static() const {
    for (const auto& d : dims)
      if (d.is_sym()) return false;
    return true;
  }
  // Element count; only valid for fully static shapes.
  int64_t static_numel() const {
    int64_t n = 1;
    for (const auto& d : dims) n *= d.size();
    return n;
  }

  bool operator==(const ShapeVector& o) const { return dims == o.dims; }
  bool operator!=(const ShapeVector& o) const { return !(*this == o); }

  std::string str() const {
    std::string s = "[";
    for (size_t i = 0; i < dims.size(); ++i) {
      if (i) s += ",";
      s += dims[i].str();
    }
    return s + "]";
  }

  static ShapeVector all_const(const std::vector<int64_t>& ds) {
    ShapeVector s;
    s.dims.reserve(ds.size());
    for (int64_t d : ds) s.dims.push_back(SymbolicDim::Const(d));
    return s;
  }
};

// A named graph value (input or result) with its declared shape and dtype.
struct GraphValue {
  std::string id;
  ShapeVector shape;
  ElementType etype{ElementType::kF32};
};

}  // namespace disc

#endif  // DISC_SHAPE_HPP_
