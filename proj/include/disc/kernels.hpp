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

#ifndef DISC_KERNELS_HPP_
#define DISC_KERNELS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "disc/dhlo.hpp"
#include "disc/tensor.hpp"

namespace disc {

// Scalar semantics shared by the eager oracle and the fused-kernel
// evaluator: a discrepancy between the two isolates planning bugs, not math
// bugs. Reductions accumulate in 64-bit float on both sides.

float apply_binary(DhloOpKind k, float a, float b);
float apply_unary(DhloOpKind k, float a);
double reduce_identity(DhloOpKind k);
double reduce_step(DhloOpKind k, double acc, double v);

int64_t apply_scalar_arith(ScalarArithKind k, int64_t a, int64_t b);

// Whole-tensor semantics for shape-manipulating ops (slice, pad, broadcast,
// reshape, transpose, concat, reduce).

ConcreteTensor eval_slice(const ConcreteTensor& in, const std::vector<int64_t>& starts,
                          const std::vector<int64_t>& limits,
                          const std::vector<int64_t>& strides);
// Slice with the output extent supplied directly (fused kernels compute it
// from shape registers); agrees with eval_slice element-for-element.
ConcreteTensor eval_slice_gather(const ConcreteTensor& in, const std::vector<int64_t>& starts,
                                 const std::vector<int64_t>& strides,
                                 const std::vector<int64_t>& out_dims);
ConcreteTensor eval_pad(const ConcreteTensor& in, float value,
                        const std::vector<int64_t>& low, const std::vector<int64_t>& high,
                        const std::vector<int64_t>& interior);
ConcreteTensor eval_broadcast(const ConcreteTensor& in, const std::vector<int64_t>& out_dims,
                              const std::vector<int64_t>& bcast_dims);
ConcreteTensor eval_reshape(const ConcreteTensor& in, const std::vector<int64_t>& out_dims);
ConcreteTensor eval_transpose(const ConcreteTensor& in, const std::vector<int64_t>& perm);
ConcreteTensor eval_concat(const std::vector<const ConcreteTensor*>& parts, int64_t axis);
ConcreteTensor eval_reduce(DhloOpKind k, const ConcreteTensor& in,
                           const std::vector<int64_t>& axes);

// Compute-intensive ops go through a library: the implementation is chosen
// per runtime shape. (m,k,n) all <= 64 selects the naive kernel, anything
// larger the tiled one.
const char* matmul_impl_key(int64_t m, int64_t k, int64_t n);
void matmul_naive(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n);
void matmul_tiled(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n);
ConcreteTensor eval_matmul(const ConcreteTensor& a, const ConcreteTensor& b);

}  // namespace disc

#endif  // DISC_KERNELS_HPP_
