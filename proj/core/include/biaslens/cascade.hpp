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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/cascade_spec.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/features.hpp"
#include "biaslens/folds.hpp"
#include "biaslens/model_bundle.hpp"

namespace biaslens {

/// OSC decision scores for one description, in kDocumentLabels order.
struct DocScore {
  std::string description_id;
  std::size_t fold = 0;
  std::array<double, 2> scores{};
  friend bool operator==(const DocScore&, const DocScore&) = default;
};

nlohmann::json to_json(const DocScore& s);
DocScore doc_score_from_json(const nlohmann::json& j);

struct FoldProvenance {
  std::size_t fold = 0;
  /// Sorted ids the fold's models were trained on.
  std::vector<std::string> training_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> degenerate_stages;
  CrfTrainingReport pnoc;
};

struct CascadeRun {
  CascadeSpec spec;
  FoldAssignment folds;
  std::string corpus_hash;
  std::vector<FoldProvenance> provenance;
  /// One bundle per fold; empty for runs loaded from disk.
  std::vector<ModelBundle> bundles;
  /// Merged by fold index, then by the order of ids within the fold.
  std::vector<PredictedSpan> predictions;
  std::vector<DocScore> scores;

  nlohmann::json manifest() const;
  std::string predictions_jsonl() const;
  std::string scores_jsonl() const;
};

/// Trains one cascade on `training`. Throws what the trainers throw, with
/// the stage prepended to the message.
ModelBundle train_bundle(const Corpus& training, const CascadeSpec& spec);

struct BundlePrediction {
  std::vector<PredictedSpan> spans;
  std::vector<DocScore> scores;
};

/// Predicts every description with one bundle; spans carry `fold`.
BundlePrediction predict_with_bundle(const ModelBundle& bundle, const Corpus& corpus, std::size_t fold = 0);

/// Cross-validated cascade: each fold's models are trained on the other
/// folds and predict only their own fold.
CascadeRun run_cascade(const Corpus& corpus, const CascadeSpec& spec, const FoldAssignment& folds);

/// Features the downstream classifiers of one fold are trained on.
struct DownstreamTrainingData {
  std::vector<std::string> ids;
  /// Per training description, PNOC token rows by sentence.
  std::vector<std::vector<SentenceRows>> pnoc_rows;
  std::vector<DocFeatureVector> osc_vectors;
};

DownstreamTrainingData downstream_training_data(const Corpus& corpus, const CascadeSpec& spec,
                                                const FoldAssignment& folds, std::size_t fold);

/// Empty when every prediction comes from a model whose training set
/// excludes its description and each description lies in exactly one test
/// fold; otherwise one message per violation.
std::vector<std::string> provenance_violations(const CascadeRun& run, const Corpus& corpus);

/// Run directory: manifest.json, folds.json, predictions.jsonl, scores.jsonl.
CascadeRun load_run(const std::filesystem::path& dir);

/// Labels each classifier is scored on.
LabelSet stage_labels(Stage stage);

struct ComparisonRow {
  std::string variant;
  Stage stage = Stage::Osc;
  Prf macro;
  Prf micro;
  AgreementReport report;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  nlohmann::json to_json() const;
  std::string to_markdown() const;
  std::string to_csv() const;
};

/// Scores each run's predictions per classifier against the gold corpus.
/// Throws Error(CorpusMismatch) if a run was produced on another corpus.
ComparisonTable compare_runs(std::span<const CascadeRun> runs, const Corpus& gold);

}  // namespace biaslens
