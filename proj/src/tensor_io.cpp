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

#include "disc/tensor_io.hpp"

#include <fstream>
#include <sstream>

#include "disc/error.hpp"

namespace disc {

ConcreteTensor read_tensor_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw RuntimeError("cannot open tensor file " + path);
  std::string header;
  if (!std::getline(f, header)) throw RuntimeError(path + ": missing header line");
  const std::string prefix = "shape:";
  if (header.rfind(prefix, 0) != 0)
    throw RuntimeError(path + ": header must start with 'shape:'");
  std::vector<int64_t> dims;
  std::string rest = header.substr(prefix.size());
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t a = tok.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = tok.find_last_not_of(" \t\r");
    dims.push_back(std::stoll(tok.substr(a, b - a + 1)));
  }
  int64_t numel = 1;
  for (int64_t d : dims) numel *= d;
  std::vector<float> data(static_cast<size_t>(numel));
  f.read(reinterpret_cast<char*>(data.data()), numel * 4);
  if (f.gcount() != numel * 4)
    throw RuntimeError(path + ": expected " + std::to_string(numel * 4) + " data bytes");
  return ConcreteTensor::from_f32(std::move(dims), std::move(data));
}

void write_tensor_file(const std::string& path, const ConcreteTensor& t) {
  if (t.etype != ElementType::kF32) throw RuntimeError("tensor files hold f32 only");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeError("cannot write tensor file " + path);
  f << "shape:";
  for (size_t i = 0; i < t.dims.size(); ++i) f << (i ? "," : " ") << t.dims[i];
  f << "\n";
  f.write(reinterpret_cast<const char*>(t.f32.data()),
          static_cast<std::streamsize>(t.f32.size() * 4));
}

}  // namespace disc
