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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/labels.hpp"

namespace biaslens {

struct FondsRankingRow {
  std::string fonds_id;
  std::string fonds_title;
  std::size_t count = 0;
  friend bool operator==(const FondsRankingRow&, const FondsRankingRow&) = default;
};

/// Fonds with the most model spans of one label; count descending, ties by
/// fonds_id. Fonds without such spans are omitted.
struct FondsRanking {
  CodeLabel label = CodeLabel::GenderedPronoun;
  std::vector<FondsRankingRow> rows;
};

FondsRanking fonds_rankings(std::span<const PredictedSpan> predictions, const Corpus& corpus, CodeLabel label,
                            std::size_t n = 10);
/// Throws Error(UnknownLabel) for names outside the taxonomy.
FondsRanking fonds_rankings(std::span<const PredictedSpan> predictions, const Corpus& corpus, std::string_view label,
                            std::size_t n = 10);

struct LanguageCount {
  std::string language;
  std::size_t fonds = 0;
  friend bool operator==(const LanguageCount&, const LanguageCount&) = default;
};

/// Number of the given fonds having at least one description in each
/// language; count descending, ties by language.
std::vector<LanguageCount> language_table(const Corpus& corpus, std::span<const std::string> fonds_ids);

struct BiasBreakdown {
  std::size_t stereotype_only = 0;
  std::size_t both = 0;
  std::size_t omission_only = 0;
  /// Tokens overlapped by model spans of each Linguistic code.
  std::map<CodeLabel, std::size_t> words;

  std::size_t flagged() const { return stereotype_only + both + omission_only; }
};

BiasBreakdown bias_breakdown(std::span<const PredictedSpan> predictions, const Corpus& corpus);

struct QualityRow {
  CodeLabel label = CodeLabel::GenderedPronoun;
  LabelCounts counts;
  /// Shares of tp + fp + fn + tn, in percent.
  double tp_percent = 0.0;
  double fp_percent = 0.0;
  double fn_percent = 0.0;
  double tn_percent = 0.0;
};

std::vector<QualityRow> quality_chart(const AgreementReport& report);

struct DashboardData {
  std::vector<FondsRanking> rankings;
  std::vector<LanguageCount> languages;
  BiasBreakdown breakdown;
  std::vector<QualityRow> quality;
};

/// Rankings for every label, languages over the ranked fonds, the bias
/// breakdown, and a quality chart when `gold` is given.
DashboardData build_dashboard(std::span<const PredictedSpan> predictions, const Corpus& corpus, std::size_t top_n = 10,
                              const Corpus* gold = nullptr);

struct RenderFormats {
  bool json = true;
  bool csv = true;
  bool svg = true;
};

/// File name and contents for each artifact. Output depends only on the data.
std::vector<std::pair<std::string, std::string>> render(const DashboardData& data, const RenderFormats& formats = {});

}  // namespace biaslens
