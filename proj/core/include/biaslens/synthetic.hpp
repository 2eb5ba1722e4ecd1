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

#include "biaslens/corpus.hpp"

namespace biaslens {

/// Generator of catalog-like descriptions whose codes follow fixed lexical
/// rules, so every classifier can in principle learn them exactly:
///   GenderedPronoun / GenderedRole / Generalization  closed word lists
///   Feminine / Masculine / Unknown / NonBinary       courtesy title + surname
///   Occupation                                       closed (multi-word) list
///   Omission                                         a sentence using "wife"
///   Stereotype                                       a sentence with a stereotype adjective
struct SyntheticOptions {
  std::size_t descriptions = 600;
  std::size_t fonds = 12;
  std::uint64_t seed = 22;
  double omission_rate = 0.25;
  double stereotype_rate = 0.2;
};

Corpus synthetic_corpus(const SyntheticOptions& options = {});

}  // namespace biaslens
