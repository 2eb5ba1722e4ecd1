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
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biaslens {

/// The ten taxonomy codes, in taxonomy row order. The numeric value is the
/// canonical enumeration order used for feature layouts and tie-breaking.
enum class CodeLabel : std::uint8_t {
  GenderedPronoun = 0,
  GenderedRole,
  Generalization,
  Feminine,
  Masculine,
  NonBinary,
  Unknown,
  Occupation,
  Omission,
  Stereotype,
};

enum class Category : std::uint8_t { Linguistic, PersonName, Contextual };

inline constexpr std::size_t kLabelCount = 10;

inline constexpr std::array<CodeLabel, kLabelCount> kAllLabels = {
    CodeLabel::GenderedPronoun, CodeLabel::GenderedRole, CodeLabel::Generalization,
    CodeLabel::Feminine,        CodeLabel::Masculine,    CodeLabel::NonBinary,
    CodeLabel::Unknown,         CodeLabel::Occupation,   CodeLabel::Omission,
    CodeLabel::Stereotype,
};

/// Labels predicted by the linguistic (token) classifier, in chain order.
inline constexpr std::array<CodeLabel, 3> kLinguisticLabels = {
    CodeLabel::GenderedPronoun, CodeLabel::GenderedRole, CodeLabel::Generalization};

/// Labels predicted by the person-name/occupation sequence classifier.
inline constexpr std::array<CodeLabel, 5> kSequenceLabels = {
    CodeLabel::Feminine, CodeLabel::Masculine, CodeLabel::NonBinary, CodeLabel::Unknown,
    CodeLabel::Occupation};

/// Sequence-classifier labels forwarded to the document classifier as
/// features. NonBinary is still predicted, only not injected.
inline constexpr std::array<CodeLabel, 4> kSequenceInjectedLabels = {
    CodeLabel::Feminine, CodeLabel::Masculine, CodeLabel::Unknown, CodeLabel::Occupation};

/// Description-level labels predicted by the document classifier.
inline constexpr std::array<CodeLabel, 2> kDocumentLabels = {CodeLabel::Omission,
                                                             CodeLabel::Stereotype};

constexpr std::size_t index_of(CodeLabel label) { return static_cast<std::size_t>(label); }

constexpr Category category_of(CodeLabel label) {
  switch (label) {
    case CodeLabel::GenderedPronoun:
    case CodeLabel::GenderedRole:
    case CodeLabel::Generalization:
      return Category::Linguistic;
    case CodeLabel::Feminine:
    case CodeLabel::Masculine:
    case CodeLabel::NonBinary:
    case CodeLabel::Unknown:
      return Category::PersonName;
    case CodeLabel::Occupation:
    case CodeLabel::Omission:
    case CodeLabel::Stereotype:
      return Category::Contextual;
  }
  return Category::Contextual;
}

constexpr bool is_document_label(CodeLabel label) {
  return label == CodeLabel::Omission || label == CodeLabel::Stereotype;
}

std::string_view to_string(CodeLabel label);
std::string_view to_string(Category category);

/// Parses the canonical label name ("GenderedPronoun", ...). Returns nullopt
/// for anything else.
std::optional<CodeLabel> parse_label(std::string_view name);

/// Like parse_label but throws Error(UnknownLabel).
CodeLabel require_label(std::string_view name);

/// Small fixed-size set of labels, iterated in enumeration order.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<CodeLabel> labels) {
    for (auto l : labels) insert(l);
  }
  template <std::size_t N>
  explicit LabelSet(const std::array<CodeLabel, N>& labels) {
    for (auto l : labels) insert(l);
  }

  void insert(CodeLabel l) { bits_ |= static_cast<std::uint16_t>(1u << index_of(l)); }
  void erase(CodeLabel l) { bits_ &= static_cast<std::uint16_t>(~(1u << index_of(l))); }
  bool contains(CodeLabel l) const { return (bits_ >> index_of(l)) & 1u; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }
  std::vector<CodeLabel> to_vector() const;
  std::uint16_t bits() const { return bits_; }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::uint16_t bits_ = 0;
};

}  // namespace biaslens
