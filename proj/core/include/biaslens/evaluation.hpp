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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/labels.hpp"

namespace biaslens {

/// Loose-match tallies for one label. Each span contributes at most once
/// to any counter:
///   tp           predicted spans overlapping >= 1 same-label reference span
///   fp           predicted spans overlapping none
///   tp_reference reference spans overlapped by >= 1 predicted span
///   fn           reference spans overlapped by none
///   tn           (document labels only) descriptions carrying the label in
///                neither set
struct LabelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tp_reference = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  LabelCounts& operator+=(const LabelCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tp_reference += o.tp_reference;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

/// precision = tp / (tp + fp), recall = tp_reference / (tp_reference + fn),
/// f1 = harmonic mean; every 0/0 is 0.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const Prf&, const Prf&) = default;
};

Prf prf(const LabelCounts& c);
double harmonic_mean(double p, double r);

/// Counts for one description and one label. Two spans agree when they
/// share at least one character and carry the same label.
LabelCounts loose_match(std::span<const AnnotationSpan> predicted, std::span<const AnnotationSpan> reference,
                        CodeLabel label);

/// Annotations keyed by description id. Every description of the scored
/// corpus must be present, possibly with no spans.
using CorpusAnnotations = std::map<std::string, std::vector<AnnotationSpan>, std::less<>>;

CorpusAnnotations annotations_of(const Corpus& corpus);
/// Groups model spans by description; ids of `corpus` without predictions
/// map to empty lists. Spans of unknown descriptions throw CorpusMismatch.
CorpusAnnotations annotations_of(std::span<const PredictedSpan> predictions, const Corpus& corpus);

struct AgreementReport {
  std::vector<CodeLabel> labels;
  std::map<CodeLabel, LabelCounts> counts;
  std::map<CodeLabel, Prf> per_label;
  /// Unweighted mean over labels with >= 1 reference span.
  Prf macro;
  std::vector<CodeLabel> macro_labels;
  /// From counts summed over labels.
  Prf micro;
  /// Number of reports averaged into this one (1 for a plain score).
  std::size_t pairs = 1;

  nlohmann::json to_json() const;
};

/// Throws Error(CorpusMismatch) unless both sides cover the same ids.
AgreementReport score(const CorpusAnnotations& predicted, const CorpusAnnotations& reference, const LabelSet& labels);

/// Arithmetic mean of the scores; counts are summed.
AgreementReport average(std::span<const AgreementReport> reports);

/// Scores every unordered coder pair (the earlier coder in map order is the
/// reference) and averages. Throws Error(TooFewAnnotators) below two coders.
AgreementReport pairwise_iaa(const std::map<std::string, CorpusAnnotations>& coders, const LabelSet& labels);

/// Scores each coder against a fixed reference and averages.
AgreementReport coders_vs_reference(const std::map<std::string, CorpusAnnotations>& coders,
                                    const CorpusAnnotations& reference, const LabelSet& labels);

}  // namespace biaslens
