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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/labels.hpp"

namespace biaslens {

/// The four metadata fields descriptions are drawn from.
enum class MetadataField : std::uint8_t {
  Title,
  ScopeAndContents,
  BiographicalHistorical,
  ProcessingInformation,
};

std::string_view to_string(MetadataField field);
std::optional<MetadataField> parse_field(std::string_view name);

/// Who produced an annotation.
struct AnnotationSource {
  enum class Kind : std::uint8_t { HumanCoder, Aggregate, Model };
  Kind kind = Kind::Aggregate;
  /// Coder id for HumanCoder, cascade variant for Model, empty for Aggregate.
  std::string id;

  static AnnotationSource aggregate() { return {Kind::Aggregate, {}}; }
  static AnnotationSource coder(std::string id) { return {Kind::HumanCoder, std::move(id)}; }
  static AnnotationSource model(std::string variant) { return {Kind::Model, std::move(variant)}; }

  /// "aggregate", "coder:<id>" or "model:<variant>".
  std::string to_string() const;
  static AnnotationSource parse(std::string_view s);

  friend bool operator==(const AnnotationSource&, const AnnotationSource&) = default;
};

/// Labeled half-open range [start, end) of Unicode scalar offsets.
struct AnnotationSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  CodeLabel label = CodeLabel::GenderedPronoun;
  AnnotationSource source;

  bool overlaps(const AnnotationSpan& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const AnnotationSpan&, const AnnotationSpan&) = default;
};

struct Description {
  std::string id;
  std::string fonds_id;
  std::string fonds_title;
  MetadataField field = MetadataField::Title;
  std::string text;  // UTF-8, metadata field name already stripped
  std::vector<std::string> languages;
  std::vector<AnnotationSpan> annotations;

  /// Length of text in Unicode scalar values; the bound for span offsets.
  std::size_t length() const;

  friend bool operator==(const Description&, const Description&) = default;
};

using Corpus = std::vector<Description>;

/// Classifier stage that produced a model annotation.
enum class Stage : std::uint8_t { Lc, Pnoc, Osc };
std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view s);

/// A model-made annotation with provenance: which fold's model produced it,
/// at which stage, and a confidence in [0, 1] used for review ranking.
struct PredictedSpan {
  std::string description_id;
  AnnotationSpan span;
  std::size_t fold = 0;
  Stage stage = Stage::Lc;
  double confidence = 0.0;

  friend bool operator==(const PredictedSpan&, const PredictedSpan&) = default;
};

nlohmann::json to_json(const PredictedSpan& p);
PredictedSpan predicted_span_from_json(const nlohmann::json& j);

struct LoadOptions {
  /// Strip a leading "<field name>:" prefix from text when present. Spans
  /// in such records are interpreted relative to the stripped text.
  bool strip_field_prefix = false;
};

nlohmann::json to_json(const AnnotationSpan& span);
AnnotationSpan span_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Description& d);
Description description_from_json(const nlohmann::json& j, const LoadOptions& options = {});

/// Validates one description: unique-free checks (offsets, start < end).
void validate(const Description& d);

/// Parses corpus JSONL. Errors carry the 1-based line number.
Corpus parse_corpus(std::string_view jsonl, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

/// Canonical serialization: one compact JSON object per line, keys sorted.
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 hex of the canonical serialization.
std::string corpus_hash(const Corpus& corpus);

/// Lookup of description index by id.
std::optional<std::size_t> find_description(const Corpus& corpus, std::string_view id);

}  // namespace biaslens
