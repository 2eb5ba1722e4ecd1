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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/features.hpp"
#include "biaslens/labels.hpp"
#include "biaslens/random_forest.hpp"

namespace biaslens {

struct LcConfig {
  ForestConfig forest;
  std::vector<CodeLabel> chain_order{kLinguisticLabels.begin(), kLinguisticLabels.end()};
};

nlohmann::json to_json(const LcConfig& c);
LcConfig lc_config_from_json(const nlohmann::json& j);

/// One link of the classifier chain. A stage whose training labels were all
/// one class is degenerate and predicts that class.
struct LcStage {
  CodeLabel label = CodeLabel::GenderedPronoun;
  bool degenerate = false;
  bool constant_value = false;
  RandomForest forest;

  friend bool operator==(const LcStage&, const LcStage&) = default;
};

struct LcTokenPrediction {
  LabelSet labels;
  /// Per chain stage: fraction of trees voting for the label.
  std::vector<double> votes;
};

/// Multilabel token classifier: a chain of binary random forests where
/// stage i sees the base features plus the decisions of stages before it
/// (gold labels in training, predictions at inference).
class LcModel {
 public:
  LcModel() = default;

  const TokenFeatureLayout& layout() const { return layout_; }
  const std::vector<LcStage>& stages() const { return stages_; }

  /// Throws Error(FeatureShapeMismatch) if rows do not fit the layout.
  std::vector<LabelSet> predict(std::span<const TokenFeatureRow> rows) const;
  std::vector<LcTokenPrediction> predict_detailed(std::span<const TokenFeatureRow> rows) const;

  std::string serialize() const;
  static LcModel deserialize(std::string_view bytes);

  friend bool operator==(const LcModel&, const LcModel&) = default;
  friend LcModel train_lc(std::span<const TokenFeatureRow>, std::span<const LabelSet>, const TokenFeatureLayout&,
                          const LcConfig&);

 private:
  TokenFeatureLayout layout_;
  std::vector<LcStage> stages_;
};

/// Throws Error(AlignmentError) when rows and labels differ in length and
/// Error(EmptyTrainingSet) for zero rows.
LcModel train_lc(std::span<const TokenFeatureRow> rows, std::span<const LabelSet> labels,
                 const TokenFeatureLayout& layout, const LcConfig& config = {});

}  // namespace biaslens
