// Copyright 2026 The spoofshap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPOOFSHAP_ERROR_HPP_
#define SPOOFSHAP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace spoofshap {

// Error categories. The CLI maps these onto process exit codes.
enum class ErrorCode {
  kInvalidArgument,      // precondition violated by the caller
  kFormat,               // malformed file content
  kIo,                   // file missing or unwritable
  kConfig,               // configuration validation failure
  kMissingPrerequisite,  // an earlier pipeline stage has not been run
  kNumerical,            // non-finite values, divergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool condition, const std::string& what) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace spoofshap

#endif  // SPOOFSHAP_ERROR_HPP_
