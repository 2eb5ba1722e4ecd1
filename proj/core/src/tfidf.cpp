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
#include "biaslens/tfidf.hpp"

#include <cmath>
#include <set>

#include "biaslens/error.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

namespace {

std::vector<std::string> terms_of(std::string_view utf8_text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(utf8_text).tokens) out.push_back(std::move(t.surface));
  return out;
}

}  // namespace

double SparseVector::norm() const {
  double s = 0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::dot(const std::vector<double>& dense) const {
  double s = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) s += values[i] * dense[indices[i]];
  return s;
}

double SparseVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

SparseVector TfidfModel::transform(std::string_view utf8_text) const {
  if (!fitted_) throw Error(ErrorKind::NotFitted, "TF-IDF model has not been fitted");
  std::map<std::uint32_t, double> counts;
  for (const auto& term : terms_of(utf8_text)) {
    if (auto it = vocabulary_.find(term); it != vocabulary_.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.dim = idf_.size();
  for (auto& [col, tf] : counts) {
    v.indices.push_back(col);
    v.values.push_back(tf * idf_[col]);
  }
  const double n = v.norm();
  if (n > 0) {
    for (auto& x : v.values) x /= n;
  }
  return v;
}

nlohmann::json TfidfModel::to_json() const {
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [term, col] : vocabulary_) vocab[term] = col;
  return nlohmann::json{{"vocabulary", std::move(vocab)},
                        {"idf", idf_},
                        {"documents", documents_},
                        {"config", {{"smooth_idf", true}, {"sublinear_tf", false}, {"norm", "l2"}}}};
}

TfidfModel TfidfModel::from_json(const nlohmann::json& j) {
  TfidfModel m;
  try {
    for (const auto& [term, col] : j.at("vocabulary").items()) m.vocabulary_.emplace(term, col.get<std::uint32_t>());
    m.idf_ = j.at("idf").get<std::vector<double>>();
    m.documents_ = j.value("documents", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("TF-IDF model: ") + e.what());
  }
  for (const auto& [term, col] : m.vocabulary_) {
    if (col >= m.idf_.size()) throw Error(ErrorKind::FormatError, "TF-IDF column out of range for '" + term + "'");
  }
  m.fitted_ = true;
  return m;
}

TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& documents) {
  if (documents.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot fit TF-IDF on zero documents");
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : documents) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto term : seen) ++df[std::string(term)];
  }
  TfidfModel m;
  m.fitted_ = true;
  m.documents_ = documents.size();
  const double n = static_cast<double>(documents.size());
  std::uint32_t col = 0;
  for (const auto& [term, count] : df) {
    m.vocabulary_.emplace(term, col++);
    m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return m;
}

TfidfModel fit_tfidf(const Corpus& corpus) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) docs.push_back(terms_of(d.text));
  return fit_tfidf(docs);
}

}  // namespace biaslens
