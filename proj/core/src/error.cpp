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
#include "biaslens/error.hpp"

namespace biaslens {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::OverlapConflict: return "OverlapConflict";
    case ErrorKind::TooFewDescriptions: return "TooFewDescriptions";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::NotFitted: return "NotFitted";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::ForeignSpan: return "ForeignSpan";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::FeatureShapeMismatch: return "FeatureShapeMismatch";
    case ErrorKind::CorpusMismatch: return "CorpusMismatch";
    case ErrorKind::TooFewAnnotators: return "TooFewAnnotators";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace biaslens
