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
#include <optional>
#include <span>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/embeddings.hpp"
#include "biaslens/labels.hpp"
#include "biaslens/tfidf.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

struct TokenFeatureRow {
  std::vector<float> embedding;
  bool start_of_sentence = false;
  bool end_of_sentence = false;
  float bias = 1.0f;
  /// Labels predicted upstream for this token (cascade features).
  LabelSet injected;
};

using SentenceRows = std::vector<TokenFeatureRow>;

/// Column layout of a flattened token row:
/// [embedding..., START, END, bias, one 0/1 column per injected label].
struct TokenFeatureLayout {
  std::size_t embedding_dim = kEmbeddingDim;
  std::vector<CodeLabel> injected_labels;  // enumeration order

  std::size_t width() const { return embedding_dim + 3 + injected_labels.size(); }
  friend bool operator==(const TokenFeatureLayout&, const TokenFeatureLayout&) = default;
};

void flatten(const TokenFeatureRow& row, const TokenFeatureLayout& layout, std::span<float> out);
std::vector<float> flatten(const TokenFeatureRow& row, const TokenFeatureLayout& layout);

/// Rows grouped by sentence. `injected`, when given, must hold one label
/// set per token (Error(AlignmentError) otherwise).
std::vector<SentenceRows> assemble_token_features(const TokenizedDescription& t, const EmbeddingModel& m,
                                                  const std::vector<LabelSet>* injected = nullptr);

/// TF-IDF block followed by a (presence, ln(1 + count)) pair per injected
/// label, in enumeration order.
struct DocFeatureVector {
  SparseVector tfidf;
  std::vector<CodeLabel> injected_labels;
  std::vector<double> injected;  // 2 * injected_labels.size()

  std::size_t dim() const { return tfidf.dim + injected.size(); }
  double dot(const std::vector<double>& w) const;
  /// w += scale * x
  void axpy(double scale, std::vector<double>& w) const;
  double squared_norm() const;
};

/// Builds the document vector. Spans must belong to `d` (matching id and
/// offsets inside the text) or Error(ForeignSpan) is thrown. Spans whose
/// label is not in `injected_labels` are ignored.
DocFeatureVector assemble_doc_features(const Description& d, const TfidfModel& tfidf,
                                       const std::vector<CodeLabel>& injected_labels = {},
                                       std::span<const PredictedSpan> injected_spans = {});

}  // namespace biaslens
