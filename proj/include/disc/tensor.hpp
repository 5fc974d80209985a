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

#ifndef DISC_TENSOR_HPP_
#define DISC_TENSOR_HPP_

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "disc/error.hpp"
#include "disc/shape.hpp"

namespace disc {

// A concrete row-major tensor. f32 carries float data, i64 carries integer
// data (index tensors). data length always equals the product of dims.
struct ConcreteTensor {
  ElementType etype{ElementType::kF32};
  std::vector<int64_t> dims;
  std::vector<float> f32;
  std::vector<int64_t> i64;

  static ConcreteTensor zeros_f32(std::vector<int64_t> dims) {
    ConcreteTensor t;
    t.etype = ElementType::kF32;
    t.dims = std::move(dims);
    t.f32.assign(static_cast<size_t>(t.numel()), 0.0f);
    return t;
  }
  static ConcreteTensor from_f32(std::vector<int64_t> dims, std::vector<float> data) {
    ConcreteTensor t;
    t.etype = ElementType::kF32;
    t.dims = std::move(dims);
    t.f32 = std::move(data);
    t.check();
    return t;
  }
  static ConcreteTensor from_i64(std::vector<int64_t> dims, std::vector<int64_t> data) {
    ConcreteTensor t;
    t.etype = ElementType::kI64;
    t.dims = std::move(dims);
    t.i64 = std::move(data);
    t.check();
    return t;
  }

  int rank() const { return static_cast<int>(dims.size()); }
  int64_t numel() const {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return n;
  }
  int64_t byte_size() const { return numel() * (etype == ElementType::kF32 ? 4 : 8); }

  void check() const {
    for (int64_t d : dims)
      if (d < 0) throw RuntimeError("tensor with negative dim");
    int64_t n = numel();
    int64_t len = etype == ElementType::kF32 ? static_cast<int64_t>(f32.size())
                                             : static_cast<int64_t>(i64.size());
    if (len != n) throw RuntimeError("tensor data length does not match shape");
  }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < dims.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(dims[i]);
    }
    return s + "]";
  }
};

// Row-major strides for a dim vector.
inline std::vector<int64_t> row_major_strides(const std::vector<int64_t>& dims) {
  std::vector<int64_t> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * dims[i + 1];
  return strides;
}

inline void unflatten_index(int64_t flat, const std::vector<int64_t>& dims,
                            std::vector<int64_t>& idx) {
  idx.resize(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    int64_t d = dims[i] == 0 ? 1 : dims[i];
    idx[i] = flat % d;
    flat /= d;
  }
}

inline int64_t flatten_index(const std::vector<int64_t>& idx,
                             const std::vector<int64_t>& strides) {
  int64_t flat = 0;
  for (size_t i = 0; i < idx.size(); ++i) flat += idx[i] * strides[i];
  return flat;
}

}  // namespace disc

#endif  // DISC_TENSOR_HPP_
