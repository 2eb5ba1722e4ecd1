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
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"

namespace biaslens {

/// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  double norm() const;
  double dot(const std::vector<double>& dense) const;
  /// Value at an index, 0 when absent.
  double at(std::uint32_t index) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Smoothed-idf TF-IDF over the tokenizer's lowercased tokens (punctuation
/// included): idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw term counts,
/// L2-normalized rows. Vocabulary columns follow lexicographic term order.
class TfidfModel {
 public:
  TfidfModel() = default;

  bool fitted() const { return fitted_; }
  std::size_t dims() const { return idf_.size(); }
  const std::map<std::string, std::uint32_t, std::less<>>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t document_count() const { return documents_; }

  /// Throws Error(NotFitted) on a default-constructed model. Unseen terms
  /// are ignored; an empty or all-unseen text yields the zero vector.
  SparseVector transform(std::string_view utf8_text) const;
  SparseVector transform(const Description& d) const { return transform(d.text); }

  nlohmann::json to_json() const;
  static TfidfModel from_json(const nlohmann::json& j);

  friend TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& documents);
  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;

 private:
  bool fitted_ = false;
  std::size_t documents_ = 0;
  std::map<std::string, std::uint32_t, std::less<>> vocabulary_;
  std::vector<double> idf_;
};

/// Fits on token lists. Throws Error(EmptyCorpus) for zero documents.
TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& documents);
TfidfModel fit_tfidf(const Corpus& corpus);

}  // namespace biaslens
