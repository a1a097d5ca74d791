// Copyright 2026 The SMS Preprocessing Authors
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

#include "sms/error.hpp"

namespace sms {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTruncatedFrame: return "TruncatedFrame";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMismatchedConfig: return "MismatchedConfig";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kDegenerateViews: return "DegenerateViews";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kNoGroundTruth: return "NoGroundTruth";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sms
