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
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/document_classifier.hpp"
#include "biaslens/embeddings.hpp"
#include "biaslens/labels.hpp"
#include "biaslens/linguistic_classifier.hpp"
#include "biaslens/sequence_crf.hpp"

namespace biaslens {

/// Which upstream predictions feed which downstream classifier.
///   Baseline  nothing is injected
///   C1        LC -> PNOC, LC + PNOC -> OSC
///   C2        LC -> OSC
///   C3        PNOC -> OSC
enum class CascadeVariant : std::uint8_t { Baseline, C1, C2, C3 };

std::string_view to_string(CascadeVariant v);
CascadeVariant parse_variant(std::string_view s);

/// Where the upstream codes injected into downstream *training* rows come
/// from. Test rows always use the upstream models' predictions.
///   SameTrainingFolds  upstream models trained on the same training folds
///   Nested             inner cross-validation within the training folds
///   Gold               the gold annotations
enum class UpstreamPolicy : std::uint8_t { SameTrainingFolds, Nested, Gold };

std::string_view to_string(UpstreamPolicy p);
UpstreamPolicy parse_policy(std::string_view s);

/// GoldOracle replaces every upstream output (training and test) with the
/// gold codes. Used to test the injection path in isolation.
enum class UpstreamSource : std::uint8_t { Trained, GoldOracle };

std::string_view to_string(UpstreamSource s);
UpstreamSource parse_upstream_source(std::string_view s);

struct CascadeSpec {
  CascadeVariant variant = CascadeVariant::Baseline;
  EmbeddingConfig embeddings;
  LcConfig lc;
  CrfConfig pnoc;
  OscConfig osc;
  std::uint64_t seed = 22;
  UpstreamPolicy policy = UpstreamPolicy::SameTrainingFolds;
  UpstreamSource upstream_source = UpstreamSource::Trained;
  std::size_t nested_folds = 5;
  /// Folds trained concurrently. Output does not depend on it.
  std::size_t threads = 1;

  /// Sets `seed` and the seed of every component.
  void set_seed(std::uint64_t s);
  /// Tree-building threads of the LC forests.
  void set_forest_threads(std::size_t n) { lc.forest.threads = n; }
};

nlohmann::json to_json(const CascadeSpec& spec);
CascadeSpec cascade_spec_from_json(const nlohmann::json& j);

/// Linguistic labels injected into PNOC token rows (empty unless C1).
std::vector<CodeLabel> pnoc_injected_labels(CascadeVariant v);
/// Labels injected into OSC document vectors.
std::vector<CodeLabel> osc_injected_labels(CascadeVariant v);

}  // namespace biaslens
