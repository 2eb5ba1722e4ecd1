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
#include "biaslens/labels.hpp"

#include "biaslens/error.hpp"

namespace biaslens {

namespace {
constexpr std::array<std::string_view, kLabelCount> kNames = {
    "GenderedPronoun", "GenderedRole", "Generalization", "Feminine",  "Masculine",
    "NonBinary",       "Unknown",      "Occupation",     "Omission",  "Stereotype",
};
}  // namespace

std::string_view to_string(CodeLabel label) { return kNames[index_of(label)]; }

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Linguistic: return "Linguistic";
    case Category::PersonName: return "PersonName";
    case Category::Contextual: return "Contextual";
  }
  return "Contextual";
}

std::optional<CodeLabel> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllLabels[i];
  }
  return std::nullopt;
}

CodeLabel require_label(std::string_view name) {
  if (auto l = parse_label(name)) return *l;
  throw Error(ErrorKind::UnknownLabel, std::string(name));
}

std::vector<CodeLabel> LabelSet::to_vector() const {
  std::vector<CodeLabel> out;
  for (auto l : kAllLabels) {
    if (contains(l)) out.push_back(l);
  }
  return out;
}

}  // namespace biaslens
