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

#include "sed/error.h"

namespace sed {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kVocabulary: return "vocabulary error";
    case ErrorKind::kSampling: return "sampling error";
    case ErrorKind::kComparison: return "comparison error";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kDegenerate: return "degenerate signal";
    case ErrorKind::kEmpty: return "empty output";
    case ErrorKind::kSearch: return "search error";
    case ErrorKind::kModel: return "model error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
      kind_(kind) {}

void Fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sed
