// Copyright 2026 The BiasLens Authors
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

namespace biaslens {

enum class ErrorKind {
  MalformedRecord,
  DuplicateId,
  UnknownLabel,
  OffsetOutOfRange,
  EmptyText,
  OverlapConflict,
  TooFewDescriptions,
  EmptyCorpus,
  NotFitted,
  AlignmentError,
  ForeignSpan,
  EmptyTrainingSet,
  FeatureShapeMismatch,
  CorpusMismatch,
  TooFewAnnotators,
  InvalidArgument,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI,
/// the review service) can map it onto an exit code or HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

  /// True for errors caused by bad input data or arguments rather than the
  /// environment.
  bool is_validation() const noexcept { return kind_ != ErrorKind::IoError; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace biaslens
