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

#include "disc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disc/error.hpp"

namespace disc {

float apply_binary(DhloOpKind k, float a, float b) {
  switch (k) {
    case DhloOpKind::kAdd: return a + b;
    case DhloOpKind::kSub: return a - b;
    case DhloOpKind::kMul: return a * b;
    case DhloOpKind::kDiv: return a / b;
    case DhloOpKind::kMaximum: return std::max(a, b);
    default: throw InternalError("not a binary op");
  }
}

float apply_unary(DhloOpKind k, float a) {
  switch (k) {
    case DhloOpKind::kExp: return std::exp(a);
    case DhloOpKind::kTanh: return std::tanh(a);
    case DhloOpKind::kNeg: return -a;
    default: throw InternalError("not a unary op");
  }
}

double reduce_identity(DhloOpKind k) {
  if (k == DhloOpKind::kReduceSum) return 0.0;
  if (k == DhloOpKind::kReduceMax) return -std::numeric_limits<double>::infinity();
  throw InternalError("not a reduce op");
}

double reduce_step(DhloOpKind k, double acc, double v) {
  return k == DhloOpKind::kReduceSum ? acc + v : std::max(acc, v);
}

int64_t apply_scalar_arith(ScalarArithKind k, int64_t a, int64_t b) {
  switch (k) {
    case ScalarArithKind::kAdd: return a + b;
    case ScalarArithKind::kSub: return a - b;
    case ScalarArithKind::kMul: return a * b;
    case ScalarArithKind::kDiv:
      if (b == 0) throw RuntimeError("scalar division by zero");
      return a / b;
    case ScalarArithKind::kCeilDiv:
      if (b <= 0) throw RuntimeError("ceil_div with non-positive divisor");
      return (a + b - 1) / b;
  }
  throw InternalError("bad scalar arith kind");
}

ConcreteTensor eval_slice(const ConcreteTensor& in, const std::vector<int64_t>& starts,
                          const std::vector<int64_t>& limits,
                          const std::vector<int64_t>& strides) {
  int r = in.rank();
  std::vector<int64_t> out_dims(r);
  for (int i = 0; i < r; ++i) {
    if (strides[i] <= 0) throw RuntimeError("slice stride <= 0");
    if (starts[i] < 0 || limits[i] > in.dims[i])
      throw RuntimeError("slice index out of range");
    int64_t extent = std::max<int64_t>(limits[i] - starts[i], 0);
    out_dims[i] = (extent + strides[i] - 1) / strides[i];
  }
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  if (in.etype == ElementType::kI64) {
    out.etype = ElementType::kI64;
    out.f32.clear();
    out.i64.assign(static_cast<size_t>(out.numel()), 0);
  }
  auto in_strides = row_major_strides(in.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < out.numel(); ++flat) {
    unflatten_index(flat, out.dims, idx);
    int64_t src = 0;
    for (int i = 0; i < r; ++i) src += (starts[i] + idx[i] * strides[i]) * in_strides[i];
    if (out.etype == ElementType::kF32)
      out.f32[flat] = in.f32[src];
    else
      out.i64[flat] = in.i64[src];
  }
  return out;
}

ConcreteTensor eval_slice_gather(const ConcreteTensor& in, const std::vector<int64_t>& starts,
                                 const std::vector<int64_t>& strides,
                                 const std::vector<int64_t>& out_dims) {
  int r = in.rank();
  for (int i = 0; i < r; ++i) {
    if (strides[i] <= 0) throw RuntimeError("slice stride <= 0");
    if (starts[i] < 0) throw RuntimeError("slice index out of range");
    if (out_dims[i] > 0 && starts[i] + (out_dims[i] - 1) * strides[i] >= in.dims[i])
      throw RuntimeError("slice index out of range");
  }
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  auto in_strides = row_major_strides(in.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < out.numel(); ++flat) {
    unflatten_index(flat, out.dims, idx);
    int64_t src = 0;
    for (int i = 0; i < r; ++i) src += (starts[i] + idx[i] * strides[i]) * in_strides[i];
    out.f32[flat] = in.f32[src];
  }
  return out;
}

ConcreteTensor eval_pad(const ConcreteTensor& in, float value,
                        const std::vector<int64_t>& low, const std::vector<int64_t>& high,
                        const std::vector<int64_t>& interior) {
  int r = in.rank();
  std::vector<int64_t> out_dims(r);
  for (int i = 0; i < r; ++i) {
    if (low[i] < 0 || high[i] < 0 || interior[i] < 0)
      throw RuntimeError("negative padding");
    int64_t n = in.dims[i];
    out_dims[i] = low[i] + high[i] + n + (n > 0 ? (n - 1) * interior[i] : 0);
  }
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  std::fill(out.f32.begin(), out.f32.end(), value);
  auto out_strides = row_major_strides(out.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < in.numel(); ++flat) {
    unflatten_index(flat, in.dims, idx);
    int64_t dst = 0;
    for (int i = 0; i < r; ++i) dst += (low[i] + idx[i] * (1 + interior[i])) * out_strides[i];
    out.f32[dst] = in.f32[flat];
  }
  return out;
}

ConcreteTensor eval_broadcast(const ConcreteTensor& in, const std::vector<int64_t>& out_dims,
                              const std::vector<int64_t>& bcast_dims) {
  for (size_t i = 0; i < bcast_dims.size(); ++i) {
    int64_t bd = bcast_dims[i];
    if (in.dims[i] != 1 && in.dims[i] != out_dims[bd])
      throw RuntimeError("broadcast dim incompatible at runtime");
  }
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  auto in_strides = row_major_strides(in.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < out.numel(); ++flat) {
    unflatten_index(flat, out.dims, idx);
    int64_t src = 0;
    for (size_t i = 0; i < bcast_dims.size(); ++i) {
      int64_t coord = in.dims[i] == 1 ? 0 : idx[bcast_dims[i]];
      src += coord * in_strides[i];
    }
    out.f32[flat] = in.f32[src];
  }
  return out;
}

ConcreteTensor eval_reshape(const ConcreteTensor& in, const std::vector<int64_t>& out_dims) {
  int64_t n = 1;
  for (int64_t d : out_dims) n *= d;
  if (n != in.numel()) throw RuntimeError("reshape element count mismatch at runtime");
  ConcreteTensor out = in;
  out.dims = out_dims;
  return out;
}

ConcreteTensor eval_transpose(const ConcreteTensor& in, const std::vector<int64_t>& perm) {
  int r = in.rank();
  std::vector<int64_t> out_dims(r);
  for (int i = 0; i < r; ++i) out_dims[i] = in.dims[perm[i]];
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  auto in_strides = row_major_strides(in.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < out.numel(); ++flat) {
    unflatten_index(flat, out.dims, idx);
    int64_t src = 0;
    for (int i = 0; i < r; ++i) src += idx[i] * in_strides[perm[i]];
    out.f32[flat] = in.f32[src];
  }
  return out;
}

ConcreteTensor eval_concat(const std::vector<const ConcreteTensor*>& parts, int64_t axis) {
  if (parts.empty()) throw RuntimeError("concat with no operands");
  int r = parts[0]->rank();
  std::vector<int64_t> out_dims = parts[0]->dims;
  int64_t axis_sum = 0;
  for (const auto* p : parts) {
    for (int i = 0; i < r; ++i)
      if (i != axis && p->dims[i] != out_dims[i])
        throw RuntimeError("concat non-axis dim mismatch at runtime");
    axis_sum += p->dims[axis];
  }
  out_dims[axis] = axis_sum;
  bool i64 = parts[0]->etype == ElementType::kI64;
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  if (i64) {
    out.etype = ElementType::kI64;
    out.f32.clear();
    out.i64.assign(static_cast<size_t>(out.numel()), 0);
  }
  auto out_strides = row_major_strides(out.dims);
  int64_t axis_offset = 0;
  std::vector<int64_t> idx;
  for (const auto* p : parts) {
    for (int64_t flat = 0; flat < p->numel(); ++flat) {
      unflatten_index(flat, p->dims, idx);
      int64_t dst = 0;
      for (int i = 0; i < r; ++i)
        dst += (i == axis ? idx[i] + axis_offset : idx[i]) * out_strides[i];
      if (i64)
        out.i64[dst] = p->i64[flat];
      else
        out.f32[dst] = p->f32[flat];
    }
    axis_offset += p->dims[axis];
  }
  return out;
}

ConcreteTensor eval_reduce(DhloOpKind k, const ConcreteTensor& in,
                           const std::vector<int64_t>& axes) {
  int r = in.rank();
  std::vector<bool> reduced(r, false);
  for (int64_t a : axes) reduced[a] = true;
  std::vector<int64_t> out_dims;
  for (int i = 0; i < r; ++i)
    if (!reduced[i]) out_dims.push_back(in.dims[i]);
  ConcreteTensor out = ConcreteTensor::zeros_f32(out_dims);
  std::vector<double> acc(static_cast<size_t>(out.numel()), reduce_identity(k));
  auto out_strides = row_major_strides(out.dims);
  std::vector<int64_t> idx;
  for (int64_t flat = 0; flat < in.numel(); ++flat) {
    unflatten_index(flat, in.dims, idx);
    int64_t dst = 0;
    int oi = 0;
    for (int i = 0; i < r; ++i) {
      if (reduced[i]) continue;
      dst += idx[i] * out_strides[oi];
      ++oi;
    }
    acc[dst] = reduce_step(k, acc[dst], in.f32[flat]);
  }
  for (int64_t i = 0; i < out.numel(); ++i) out.f32[i] = static_cast<float>(acc[i]);
  return out;
}

const char* matmul_impl_key(int64_t m, int64_t k, int64_t n) {
  return (m <= 64 && k <= 64 && n <= 64) ? "naive" : "tiled";
}

void matmul_naive(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p)
        acc += static_cast<double>(a[i * k + p]) * static_cast<double>(b[p * n + j]);
      c[i * n + j] = static_cast<float>(acc);
    }
}

void matmul_tiled(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
  constexpr int64_t kTile = 32;
  std::vector<double> acc(static_cast<size_t>(m * n), 0.0);
  for (int64_t i0 = 0; i0 < m; i0 += kTile)
    for (int64_t p0 = 0; p0 < k; p0 += kTile)
      for (int64_t j0 = 0; j0 < n; j0 += kTile) {
        int64_t i1 = std::min(i0 + kTile, m), p1 = std::min(p0 + kTile, k),
                j1 = std::min(j0 + kTile, n);
        for (int64_t i = i0; i < i1; ++i)
          for (int64_t p = p0; p < p1; ++p) {
            double av = a[i * k + p];
            for (int64_t j = j0; j < j1; ++j)
              acc[i * n + j] += av * static_cast<double>(b[p * n + j]);
          }
      }
  for (int64_t i = 0; i < m * n; ++i) c[i] = static_cast<float>(acc[i]);
}

ConcreteTensor eval_matmul(const ConcreteTensor& a, const ConcreteTensor& b) {
  if (a.rank() != 2 || b.rank() != 2) throw RuntimeError("matmul operands must be rank-2");
  if (a.dims[1] != b.dims[0]) throw RuntimeError("matmul inner dim mismatch at runtime");
  int64_t m = a.dims[0], k = a.dims[1], n = b.dims[1];
  ConcreteTensor out = ConcreteTensor::zeros_f32({m, n});
  if (std::string(matmul_impl_key(m, k, n)) == "naive")
    matmul_naive(a.f32.data(), b.f32.data(), out.f32.data(), m, k, n);
  else
    matmul_tiled(a.f32.data(), b.f32.data(), out.f32.data(), m, k, n);
  return out;
}

}  // namespace disc
