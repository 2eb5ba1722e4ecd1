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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/cascade_spec.hpp"
#include "biaslens/document_classifier.hpp"
#include "biaslens/embeddings.hpp"
#include "biaslens/linguistic_classifier.hpp"
#include "biaslens/sequence_crf.hpp"
#include "biaslens/tfidf.hpp"

namespace biaslens {

/// Everything needed to predict with one trained cascade.
struct ModelBundle {
  CascadeSpec spec;
  EmbeddingModel embeddings;
  TfidfModel tfidf;
  LcModel lc;
  CrfModel pnoc;
  OscModel osc;
  CrfTrainingReport pnoc_report;
  /// Hash of the training descriptions (see corpus_hash).
  std::string training_hash;
  std::size_t training_size = 0;

  /// Stage names whose training data held a single class, e.g.
  /// "lc:GenderedRole", "pnoc", "osc:Stereotype".
  std::vector<std::string> degenerate_stages() const;
  nlohmann::json manifest() const;
};

/// Directory layout: manifest.json, embeddings.bin, tfidf.json, lc.bin,
/// pnoc.bin, osc.bin. Returns (relative name, bytes) pairs for OutputDir.
std::vector<std::pair<std::string, std::string>> bundle_files(const ModelBundle& bundle);
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
ModelBundle load_bundle(const std::filesystem::path& dir);

}  // namespace biaslens
