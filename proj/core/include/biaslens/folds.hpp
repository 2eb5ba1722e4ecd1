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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"

namespace biaslens {

struct FoldAssignment {
  std::size_t k = 5;
  std::uint64_t seed = 22;
  /// folds[f] holds description ids in shuffled order.
  std::vector<std::vector<std::string>> folds;

  /// Fold containing the id; throws Error(InvalidArgument) if absent.
  std::size_t fold_of(const std::string& id) const;
};

/// Seeded uniform shuffle of corpus order, then contiguous chunking; the
/// first (n mod k) folds receive one extra description.
FoldAssignment make_folds(const Corpus& corpus, std::size_t k = 5, std::uint64_t seed = 22);

/// Throws Error(InvalidArgument) unless the folds partition the corpus ids
/// with sizes differing by at most one.
void validate_folds(const FoldAssignment& folds, const Corpus& corpus);

nlohmann::json to_json(const FoldAssignment& folds);
FoldAssignment folds_from_json(const nlohmann::json& j);

}  // namespace biaslens
