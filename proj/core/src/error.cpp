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

#include "satdetect/error.hpp"

namespace satdetect {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kMissingFile:
      return "MissingFile";
    case ErrorCode::kMalformedRecord:
      return "MalformedRecord";
    case ErrorCode::kDuplicateId:
      return "DuplicateId";
    case ErrorCode::kUnknownLabel:
      return "UnknownLabel";
    case ErrorCode::kDegenerateSplit:
      return "DegenerateSplit";
    case ErrorCode::kEmptyVocabulary:
      return "EmptyVocabulary";
    case ErrorCode::kUnknownTerm:
      return "UnknownTerm";
    case ErrorCode::kEmptyTrainingVocabulary:
      return "EmptyTrainingVocabulary";
    case ErrorCode::kZeroVector:
      return "ZeroVector";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kFingerprintMismatch:
      return "FingerprintMismatch";
    case ErrorCode::kShapeUnderflow:
      return "ShapeUnderflow";
    case ErrorCode::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::kNonFiniteActivation:
      return "NonFiniteActivation";
    case ErrorCode::kNonFiniteGradient:
      return "NonFiniteGradient";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kEmptyTestSet:
      return "EmptyTestSet";
    case ErrorCode::kMalformedInput:
      return "MalformedInput";
    case ErrorCode::kFormatError:
      return "FormatError";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return ErrorCategory::kUsage;
    case ErrorCode::kNonFiniteActivation:
    case ErrorCode::kNonFiniteGradient:
    case ErrorCode::kNonFiniteLoss:
      return ErrorCategory::kNumeric;
    default:
      return ErrorCategory::kData;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace satdetect
