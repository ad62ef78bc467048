/* Copyright 2026 The Codesign Authors

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

#ifndef CODESIGN_ERROR_H_
#define CODESIGN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace codesign {

enum class ErrorCode {
  kParseError,
  kMissingField,
  kNonPositiveQuantity,
  kNegativeQuantity,
  kUnknownStrategyName,
  kUnknownDevice,
  kInvalidProfile,
  kDegenerateSplit,
  kNoFeasiblePlan,
  kShapeMismatch,
  kDimensionMismatch,
  kStepSizeOutOfRange,
  kSchemaMismatch,
};

inline std::string_view ErrorName(ErrorCode code);

// Domain error raised by every module. what() reads "<ErrorName>: <detail>",
// which is also what the CLI prints before exiting with status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(ErrorName(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const { return code_; }
  std::string_view name() const { return ErrorName(code_); }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kNonPositiveQuantity: return "NonPositiveQuantity";
    case ErrorCode::kNegativeQuantity: return "NegativeQuantity";
    case ErrorCode::kUnknownStrategyName: return "UnknownStrategyName";
    case ErrorCode::kUnknownDevice: return "UnknownDevice";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
    case ErrorCode::kNoFeasiblePlan: return "NoFeasiblePlan";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kStepSizeOutOfRange: return "StepSizeOutOfRange";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

}  // namespace codesign

#endif  // CODESIGN_ERROR_H_
