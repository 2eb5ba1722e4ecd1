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

#include <string>
#include <string_view>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

/// Merges overlapping spans that share a label. Output is sorted by
/// (start, label) and carries the source of the first span in each group.
std::vector<AnnotationSpan> merge_same_label(std::vector<AnnotationSpan> spans);

/// Per-token BIO tags for the spans whose label is in `labels`.
/// Throws Error(OverlapConflict) when spans of two different labels claim
/// the same token.
std::vector<std::string> to_bio(const Description& d, const TokenizedDescription& t,
                                const LabelSet& labels);

/// Inverse of to_bio. Malformed input is repaired: an I-x that does not
/// continue an x run starts a new span, and unparsable tags count as O.
std::vector<AnnotationSpan> bio_to_spans(const std::vector<std::string>& tags,
                                         const TokenizedDescription& t,
                                         const AnnotationSource& source = AnnotationSource::aggregate());

/// Per-token label sets: a token carries every selected label whose span
/// overlaps it. Multilabel, so no conflict checking.
std::vector<LabelSet> token_label_sets(const Description& d, const TokenizedDescription& t,
                                       const LabelSet& labels);

}  // namespace biaslens
