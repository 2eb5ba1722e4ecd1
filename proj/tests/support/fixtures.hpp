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
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/labels.hpp"
#include "biaslens/rng.hpp"

namespace biaslens::testing {

AnnotationSpan span(std::size_t start, std::size_t end, CodeLabel label);

Description make_description(std::string id, std::string text, std::vector<AnnotationSpan> annotations = {},
                             std::string fonds_id = "F1", std::vector<std::string> languages = {"English"});

// Counts by explicit character sets, sharing no code with the evaluation module.
LabelCounts brute_force_counts(const std::vector<AnnotationSpan>& predicted,
                               const std::vector<AnnotationSpan>& reference, CodeLabel label);

struct SpanConfiguration {
  std::vector<AnnotationSpan> predicted;
  std::vector<AnnotationSpan> reference;
  std::vector<CodeLabel> labels;
};

// Up to max_spans spans per side over a short text, labels drawn from a random subset.
SpanConfiguration random_configuration(Rng& rng, std::size_t max_spans = 10, std::size_t max_labels = 5,
                                       std::size_t text_length = 40);

// Random multi-description annotation sets over ids d0..d{n-1}.
CorpusAnnotations random_annotations(Rng& rng, std::size_t descriptions, const std::vector<CodeLabel>& labels);

// Nonsense-word corpus in which downstream codes are a planted function of upstream codes:
// GenderedPronoun tokens are also Masculine, Generalization tokens are also Occupation,
// Omission iff a GenderedPronoun is present, Stereotype iff a Generalization is present.
Corpus plumbing_corpus(std::size_t descriptions, std::uint64_t seed);

// Tiny two-fonds corpus with hand-placed annotations.
Corpus toy_corpus();

class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "biaslens-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path cli_path();

// Runs the CLI to completion; returns its exit status.
int run_cli(const std::vector<std::string>& args, std::string* stdout_text = nullptr);

// A biaslens serve child process on an ephemeral port.
class ServerProcess {
 public:
  ServerProcess(const std::vector<std::string>& args);
  ~ServerProcess();
  ServerProcess(const ServerProcess&) = delete;
  ServerProcess& operator=(const ServerProcess&) = delete;
  int port() const { return port_; }
  bool running() const { return pid_ > 0; }
  void kill_hard();
  int terminate();

 private:
  int pid_ = -1;
  int port_ = -1;
};

}  // namespace biaslens::testing
