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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/features.hpp"
#include "biaslens/labels.hpp"

namespace biaslens {

/// BIO tag inventory: "O" first, then B-x, I-x for each label in
/// enumeration order. Tag indices double as the Viterbi tie-break order.
class TagSet {
 public:
  TagSet() : TagSet(std::vector<CodeLabel>(kSequenceLabels.begin(), kSequenceLabels.end())) {}
  explicit TagSet(std::vector<CodeLabel> labels);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<CodeLabel>& labels() const { return labels_; }
  std::optional<std::size_t> index(std::string_view tag) const;

  friend bool operator==(const TagSet&, const TagSet&) = default;

 private:
  std::vector<CodeLabel> labels_;
  std::vector<std::string> names_;
};

struct CrfConfig {
  /// Initial variance of every weight (upper bound of the covariance).
  double variance = 1.0;
  /// AROW regularizer r.
  double gamma = 1.0;
  std::size_t max_iterations = 100;
  bool all_possible_transitions = true;
  std::uint64_t seed = 22;
};

nlohmann::json to_json(const CrfConfig& c);
CrfConfig crf_config_from_json(const nlohmann::json& j);

/// Dense attribute sequence: one row of real-valued attributes per token.
using AttributeSequence = std::vector<std::vector<float>>;

struct ViterbiResult {
  std::vector<std::size_t> path;
  double score = 0.0;
};

/// Max-scoring path for row-major emissions (length x tags) and transitions
/// (prev x cur). Ties resolve to the lowest tag index at every step.
ViterbiResult viterbi_decode(std::span<const double> emissions, std::size_t length,
                             std::span<const double> transitions, std::size_t tags);

struct SentencePrediction {
  std::vector<std::string> tags;
  double score = 0.0;
  /// Logistic of (best path score - all-"O" path score).
  double confidence = 0.5;
};

struct ArowUpdate {
  bool applied = false;
  double margin = 0.0;      // mean . delta
  double confidence = 0.0;  // delta' Sigma delta
  double alpha = 0.0;
  double beta = 0.0;
};

struct CrfTrainingReport {
  std::size_t epochs = 0;
  std::size_t updates = 0;
  bool converged = false;
};

/// Linear-chain CRF whose weights are the AROW mean; the diagonal covariance
/// is kept so training can resume and for inspection.
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(TagSet tags, TokenFeatureLayout layout, double initial_variance);

  const TagSet& tags() const { return tags_; }
  const TokenFeatureLayout& layout() const { return layout_; }
  std::size_t attributes() const { return layout_.width(); }
  std::size_t dimension() const { return mean_.size(); }

  std::size_t state_index(std::size_t attribute, std::size_t tag) const { return attribute * tags_.size() + tag; }
  std::size_t transition_index(std::size_t prev, std::size_t tag) const {
    return attributes() * tags_.size() + prev * tags_.size() + tag;
  }

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& covariance() const { return covariance_; }
  std::vector<double>& mutable_mean() { return mean_; }
  /// Transition features that may carry weight.
  const std::vector<std::uint8_t>& active() const { return active_; }

  std::vector<double> emissions(const AttributeSequence& x) const;
  std::vector<double> transitions() const;
  ViterbiResult decode(const AttributeSequence& x) const;
  double path_score(const AttributeSequence& x, std::span<const std::size_t> path) const;
  /// phi(x, y): summed attribute values per (attribute, tag) plus transition counts.
  std::vector<double> feature_counts(const AttributeSequence& x, std::span<const std::size_t> path) const;

  AttributeSequence attributes_of(const SentenceRows& rows) const;
  SentencePrediction predict(const SentenceRows& rows) const;
  std::vector<SentencePrediction> predict(const std::vector<SentenceRows>& sentences) const;

  std::string serialize() const;
  static CrfModel deserialize(std::string_view bytes);

  friend bool operator==(const CrfModel&, const CrfModel&) = default;

 private:
  friend ArowUpdate arow_update(CrfModel& m, std::span<const double> delta, double gamma);
  friend CrfModel train_pnoc(const std::vector<SentenceRows>&, const std::vector<std::vector<std::string>>&,
                             const TokenFeatureLayout&, const CrfConfig&, CrfTrainingReport*,
                             const std::function<void(const CrfModel&)>&);

  TagSet tags_;
  TokenFeatureLayout layout_;
  std::vector<double> mean_;
  std::vector<double> covariance_;
  std::vector<std::uint8_t> active_;
};

/// One AROW step on a feature difference delta = phi(gold) - phi(pred):
/// if margin < 1, beta = 1/(confidence + gamma), alpha = (1 - margin) beta,
/// mean += alpha Sigma delta, Sigma_ii -= beta (Sigma_ii delta_i)^2.
ArowUpdate arow_update(CrfModel& m, std::span<const double> delta, double gamma);

/// AROW training over sentences of feature rows with BIO tags. Stops early
/// after an epoch without mistakes. Throws Error(AlignmentError) when a tag
/// sequence does not match its sentence and Error(InvalidArgument) for tags
/// outside the tag set.
CrfModel train_pnoc(const std::vector<SentenceRows>& sentences, const std::vector<std::vector<std::string>>& tags,
                    const TokenFeatureLayout& layout, const CrfConfig& config = {},
                    CrfTrainingReport* report = nullptr,
                    const std::function<void(const CrfModel&)>& on_update = {});

}  // namespace biaslens
