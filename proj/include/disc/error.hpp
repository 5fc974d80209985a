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

#ifndef DISC_ERROR_HPP_
#define DISC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace disc {

// Error classes map onto CLI exit codes: usage=2, compile=3, runtime=4.
enum class ErrorClass { kUsage, kParse, kValidation, kCompile, kRuntime, kInternal };

inline const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::kUsage: return "usage";
    case ErrorClass::kParse: return "parse";
    case ErrorClass::kValidation: return "validation";
    case ErrorClass::kCompile: return "compile";
    case ErrorClass::kRuntime: return "runtime";
    case ErrorClass::kInternal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorClass::kParse, m) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error(ErrorClass::kValidation, m) {}
};
struct CompileError : Error {
  explicit CompileError(const std::string& m) : Error(ErrorClass::kCompile, m) {}
};
struct RuntimeError : Error {
  explicit RuntimeError(const std::string& m) : Error(ErrorClass::kRuntime, m) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error(ErrorClass::kInternal, m) {}
};

}  // namespace disc

#endif  // DISC_ERROR_HPP_
