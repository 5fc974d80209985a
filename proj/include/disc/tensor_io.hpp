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

#ifndef DISC_TENSOR_IO_HPP_
#define DISC_TENSOR_IO_HPP_

#include <string>

#include "disc/tensor.hpp"

namespace disc {

// Tensor files: one text header line `shape: d0,d1,...` followed by flat
// little-endian f32 data in row-major order.
ConcreteTensor read_tensor_file(const std::string& path);
void write_tensor_file(const std::string& path, const ConcreteTensor& t);

}  // namespace disc

#endif  // DISC_TENSOR_IO_HPP_
