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
#include "biaslens/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "biaslens/error.hpp"
#include "biaslens/output_dir.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kFieldNames = {
    "Title", "Scope and Contents", "Biographical / Historical", "Processing Information"};

std::string strip_prefix(const std::string& text, MetadataField field) {
  const std::string prefix = std::string(to_string(field)) + ":";
  if (text.rfind(prefix, 0) != 0) return text;
  std::size_t i = prefix.size();
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  return text.substr(i);
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::MalformedRecord, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::MalformedRecord, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(MetadataField field) { return kFieldNames[static_cast<std::size_t>(field)]; }

std::optional<MetadataField> parse_field(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return static_cast<MetadataField>(i);
  }
  return std::nullopt;
}

std::string AnnotationSource::to_string() const {
  switch (kind) {
    case Kind::Aggregate: return "aggregate";
    case Kind::HumanCoder: return "coder:" + id;
    case Kind::Model: return "model:" + id;
  }
  return "aggregate";
}

AnnotationSource AnnotationSource::parse(std::string_view s) {
  if (s == "aggregate") return aggregate();
  if (s.starts_with("coder:")) return coder(std::string(s.substr(6)));
  if (s.starts_with("model:")) return model(std::string(s.substr(6)));
  throw Error(ErrorKind::MalformedRecord, "unknown annotation source '" + std::string(s) + "'");
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Lc: return "lc";
    case Stage::Pnoc: return "pnoc";
    case Stage::Osc: return "osc";
  }
  return "lc";
}

Stage parse_stage(std::string_view s) {
  if (s == "lc") return Stage::Lc;
  if (s == "pnoc") return Stage::Pnoc;
  if (s == "osc") return Stage::Osc;
  throw Error(ErrorKind::MalformedRecord, "unknown stage '" + std::string(s) + "'");
}

json to_json(const PredictedSpan& p) {
  json j = to_json(p.span);
  j["id"] = p.description_id;
  j["fold"] = p.fold;
  j["stage"] = std::string(to_string(p.stage));
  j["confidence"] = p.confidence;
  return j;
}

PredictedSpan predicted_span_from_json(const json& j) {
  PredictedSpan p;
  p.span = span_from_json(j);
  p.description_id = required<std::string>(j, "id");
  p.fold = j.value("fold", std::size_t{0});
  p.stage = parse_stage(j.value("stage", std::string("lc")));
  p.confidence = j.value("confidence", 0.0);
  return p;
}

std::size_t Description::length() const { return text::scalar_length(text); }

json to_json(const AnnotationSpan& span) {
  return json{{"start", span.start},
              {"end", span.end},
              {"label", std::string(to_string(span.label))},
              {"source", span.source.to_string()}};
}

AnnotationSpan span_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedRecord, "annotation is not an object");
  AnnotationSpan s;
  s.start = required<std::size_t>(j, "start");
  s.end = required<std::size_t>(j, "end");
  s.label = require_label(required<std::string>(j, "label"));
  s.source = j.contains("source") ? AnnotationSource::parse(required<std::string>(j, "source"))
                                  : AnnotationSource::aggregate();
  return s;
}

json to_json(const Description& d) {
  json anns = json::array();
  for (const auto& a : d.annotations) anns.push_back(to_json(a));
  return json{{"id", d.id},
              {"fonds_id", d.fonds_id},
              {"fonds_title", d.fonds_title},
              {"field", std::string(to_string(d.field))},
              {"text", d.text},
              {"languages", d.languages},
              {"annotations", std::move(anns)}};
}

Description description_from_json(const json& j, const LoadOptions& options) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedRecord, "record is not an object");
  Description d;
  d.id = required<std::string>(j, "id");
  d.fonds_id = required<std::string>(j, "fonds_id");
  d.fonds_title = j.value("fonds_title", std::string{});
  const auto field = required<std::string>(j, "field");
  auto parsed = parse_field(field);
  if (!parsed) throw Error(ErrorKind::MalformedRecord, "unknown metadata field '" + field + "'");
  d.field = *parsed;
  d.text = required<std::string>(j, "text");
  if (options.strip_field_prefix) d.text = strip_prefix(d.text, d.field);
  if (j.contains("languages")) d.languages = required<std::vector<std::string>>(j, "languages");
  if (j.contains("annotations")) {
    const auto& anns = j.at("annotations");
    if (!anns.is_array()) throw Error(ErrorKind::MalformedRecord, "annotations is not an array");
    for (const auto& a : anns) d.annotations.push_back(span_from_json(a));
  }
  return d;
}

void validate(const Description& d) {
  if (d.id.empty()) throw Error(ErrorKind::MalformedRecord, "empty id");
  const auto len = text::decode_utf8(d.text).size();
  for (const auto& a : d.annotations) {
    if (a.start >= a.end) {
      throw Error(ErrorKind::MalformedRecord,
                  d.id + ": span start " + std::to_string(a.start) + " not before end " +
                      std::to_string(a.end));
    }
    if (a.end > len) {
      throw Error(ErrorKind::OffsetOutOfRange,
                  d.id + ": span end " + std::to_string(a.end) + " exceeds text length " +
                      std::to_string(len));
    }
  }
}

Corpus parse_corpus(std::string_view jsonl, const LoadOptions& options) {
  Corpus corpus;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedRecord, e.what());
      }
      auto d = description_from_json(j, options);
      validate(d);
      if (!seen.insert(d.id).second) throw Error(ErrorKind::DuplicateId, d.id);
      corpus.push_back(std::move(d));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " +
                                std::string(e.what()).substr(to_string(e.kind()).size() + 2));
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), options);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus) {
    out += to_json(d).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_corpus(corpus));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string corpus_hash(const Corpus& corpus) { return sha256_hex(serialize_corpus(corpus)); }

std::optional<std::size_t> find_description(const Corpus& corpus, std::string_view id) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].id == id) return i;
  }
  return std::nullopt;
}

}  // namespace biaslens
