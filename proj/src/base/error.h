// base/error.h

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTSEP_BASE_ERROR_H_
#define OCTSEP_BASE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace octsep {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kConfig = 3,
  kData = 4,
  kNumeric = 5,
  kUnsupported = 6,
  kInternal = 7,
};

const char *ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported through this type.
// The C API maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace internal {

inline void StreamAll(std::ostringstream &) {}

template <typename Head, typename... Tail>
void StreamAll(std::ostringstream &os, const Head &head, const Tail &...tail) {
  os << head;
  StreamAll(os, tail...);
}

}  // namespace internal

template <typename... Args>
[[noreturn]] void Fail(ErrorCode code, const Args &...args) {
  std::ostringstream os;
  internal::StreamAll(os, args...);
  throw Error(code, os.str());
}

template <typename... Args>
void Require(bool cond, ErrorCode code, const Args &...args) {
  if (!cond) Fail(code, args...);
}

}  // namespace octsep

#endif  // OCTSEP_BASE_ERROR_H_
