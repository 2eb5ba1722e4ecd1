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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/features.hpp"
#include "biaslens/labels.hpp"

namespace biaslens {

struct OscConfig {
  double alpha = 1e-4;
  std::size_t epochs = 10;
  std::uint64_t seed = 22;
  /// Scales the intercept step relative to the weight step.
  double intercept_decay = 1.0;
};

nlohmann::json to_json(const OscConfig& c);
OscConfig osc_config_from_json(const nlohmann::json& j);

/// Binary linear SVM: score(x) = w . x + b, positive iff score > 0.
struct LinearBinaryClassifier {
  CodeLabel label = CodeLabel::Omission;
  std::vector<double> weights;
  double intercept = 0.0;
  /// True when the training labels were all one class.
  bool degenerate = false;

  double score(const DocFeatureVector& x) const { return x.dot(weights) + intercept; }
  friend bool operator==(const LinearBinaryClassifier&, const LinearBinaryClassifier&) = default;
};

struct OscPrediction {
  LabelSet labels;
  /// Decision scores in kDocumentLabels order.
  std::array<double, 2> scores{};
};

/// Per-epoch diagnostics of one binary classifier.
struct SgdEpochStats {
  CodeLabel label;
  std::size_t epoch;
  /// Mean over the epoch's steps of hinge loss + alpha/2 ||w||^2, each
  /// evaluated at the weights in effect for that step.
  double mean_objective;
};

/// One-vs-rest document classifier for Omission and Stereotype.
class OscModel {
 public:
  OscModel() = default;

  std::size_t dim() const { return dim_; }
  const std::vector<CodeLabel>& injected_labels() const { return injected_labels_; }
  const std::array<LinearBinaryClassifier, 2>& classifiers() const { return classifiers_; }

  /// Throws Error(FeatureShapeMismatch) for vectors of another layout.
  OscPrediction predict(const DocFeatureVector& x) const;
  std::vector<OscPrediction> predict(std::span<const DocFeatureVector> xs) const;

  std::string serialize() const;
  static OscModel deserialize(std::string_view bytes);

  friend bool operator==(const OscModel&, const OscModel&) = default;
  friend OscModel train_osc(std::span<const DocFeatureVector>, std::span<const LabelSet>, const OscConfig&,
                            std::vector<SgdEpochStats>*);

 private:
  std::size_t dim_ = 0;
  std::vector<CodeLabel> injected_labels_;
  std::array<LinearBinaryClassifier, 2> classifiers_{};
};

/// SGD on L2-regularized hinge loss with the "optimal" step schedule
/// eta_t = 1 / (alpha (t0 + t)). A label with no positive (or no negative)
/// training example yields a degenerate constant classifier.
OscModel train_osc(std::span<const DocFeatureVector> vectors, std::span<const LabelSet> labels,
                   const OscConfig& config = {}, std::vector<SgdEpochStats>* trace = nullptr);

double logistic(double x);

}  // namespace biaslens
