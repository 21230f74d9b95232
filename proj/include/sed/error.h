// Copyright 2026 The sedkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sed {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  kFormat,       // malformed file contents
  kUnsupported,  // well-formed but outside what we handle
  kIo,
  kDomain,       // argument outside the mathematical domain
  kDimension,    // shape mismatch
  kConfig,
  kParse,
  kVocabulary,
  kSampling,
  kComparison,
  kUndefinedMetric,
  kNumeric,
  kDegenerate,
  kEmpty,
  kSearch,
  kModel,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& what);

}  // namespace sed
