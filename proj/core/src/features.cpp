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
#include "biaslens/features.hpp"

#include <algorithm>
#include <cmath>

#include "biaslens/error.hpp"

namespace biaslens {

void flatten(const TokenFeatureRow& row, const TokenFeatureLayout& layout, std::span<float> out) {
  if (out.size() != layout.width() || row.embedding.size() != layout.embedding_dim) {
    throw Error(ErrorKind::FeatureShapeMismatch, "token row does not match feature layout");
  }
  std::copy(row.embedding.begin(), row.embedding.end(), out.begin());
  std::size_t k = layout.embedding_dim;
  out[k++] = row.start_of_sentence ? 1.0f : 0.0f;
  out[k++] = row.end_of_sentence ? 1.0f : 0.0f;
  out[k++] = row.bias;
  for (auto label : layout.injected_labels) out[k++] = row.injected.contains(label) ? 1.0f : 0.0f;
}

std::vector<float> flatten(const TokenFeatureRow& row, const TokenFeatureLayout& layout) {
  std::vector<float> out(layout.width());
  flatten(row, layout, out);
  return out;
}

std::vector<SentenceRows> assemble_token_features(const TokenizedDescription& t, const EmbeddingModel& m,
                                                  const std::vector<LabelSet>* injected) {
  if (injected && injected->size() != t.tokens.size()) {
    throw Error(ErrorKind::AlignmentError, std::to_string(injected->size()) + " injected label sets for " +
                                               std::to_string(t.tokens.size()) + " tokens");
  }
  std::vector<SentenceRows> out;
  out.reserve(t.sentences.size());
  for (const auto& s : t.sentences) {
    SentenceRows rows;
    rows.reserve(s.size());
    for (std::size_t k = s.begin; k < s.end; ++k) {
      TokenFeatureRow r;
      r.embedding = m.embed(t.tokens[k].surface);
      r.start_of_sentence = k == s.begin;
      r.end_of_sentence = k + 1 == s.end;
      if (injected) r.injected = (*injected)[k];
      rows.push_back(std::move(r));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

double DocFeatureVector::dot(const std::vector<double>& w) const {
  double s = tfidf.dot(w);
  for (std::size_t i = 0; i < injected.size(); ++i) s += injected[i] * w[tfidf.dim + i];
  return s;
}

void DocFeatureVector::axpy(double scale, std::vector<double>& w) const {
  for (std::size_t i = 0; i < tfidf.indices.size(); ++i) w[tfidf.indices[i]] += scale * tfidf.values[i];
  for (std::size_t i = 0; i < injected.size(); ++i) w[tfidf.dim + i] += scale * injected[i];
}

double DocFeatureVector::squared_norm() const {
  double s = 0;
  for (double v : tfidf.values) s += v * v;
  for (double v : injected) s += v * v;
  return s;
}

DocFeatureVector assemble_doc_features(const Description& d, const TfidfModel& tfidf,
                                       const std::vector<CodeLabel>& injected_labels,
                                       std::span<const PredictedSpan> injected_spans) {
  DocFeatureVector v;
  v.tfidf = tfidf.transform(d);
  v.injected_labels = injected_labels;
  std::sort(v.injected_labels.begin(), v.injected_labels.end());
  v.injected.assign(2 * v.injected_labels.size(), 0.0);

  const std::size_t len = d.length();
  std::vector<std::size_t> counts(v.injected_labels.size(), 0);
  for (const auto& p : injected_spans) {
    if (p.description_id != d.id || p.span.end > len || p.span.start >= p.span.end) {
      throw Error(ErrorKind::ForeignSpan, "span of '" + p.description_id + "' injected into '" + d.id + "'");
    }
    for (std::size_t i = 0; i < v.injected_labels.size(); ++i) {
      if (v.injected_labels[i] == p.span.label) ++counts[i];
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    v.injected[2 * i] = counts[i] > 0 ? 1.0 : 0.0;
    v.injected[2 * i + 1] = std::log1p(static_cast<double>(counts[i]));
  }
  return v;
}

}  // namespace biaslens
