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

namespace biaslens::cli {

struct Options {
  std::string corpus;
  std::string out;
  std::string variant = "baseline";
  std::string policy = "same-training-folds";
  std::string model;
  std::string run;
  std::string decisions;
  std::string reference;
  std::string listen = "127.0.0.1:8080";
  std::string ui_dir;
  std::uint64_t seed = 22;
  std::size_t folds = 5;
  std::size_t top_n = 10;
  std::size_t threads = 1;
  std::size_t descriptions = 600;
  bool strip_field_prefix = false;
  bool save_models = false;
  std::vector<std::string> files;
};

int embed(const Options& o);
int train(const Options& o);
int predict(const Options& o);
int crossval(const Options& o);
int evaluate(const Options& o);
int iaa(const Options& o);
int dashboard(const Options& o);
int serve(const Options& o);
int review_export(const Options& o);
int synth(const Options& o);

}  // namespace biaslens::cli
