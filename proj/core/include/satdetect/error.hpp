// Copyright 2026 The satdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace satdetect {

enum class ErrorCode {
  kInvalidArgument,
  kMissingFile,
  kMalformedRecord,
  kDuplicateId,
  kUnknownLabel,
  kDegenerateSplit,
  kEmptyVocabulary,
  kUnknownTerm,
  kEmptyTrainingVocabulary,
  kZeroVector,
  kDimensionMismatch,
  kFingerprintMismatch,
  kShapeUnderflow,
  kShapeMismatch,
  kNonFiniteActivation,
  kNonFiniteGradient,
  kNonFiniteLoss,
  kEmptyTestSet,
  kMalformedInput,
  kFormatError,
  kIoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Broad failure class used for process exit codes.
enum class ErrorCategory { kUsage, kData, kNumeric };

ErrorCategory error_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }
  /// The message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace satdetect
