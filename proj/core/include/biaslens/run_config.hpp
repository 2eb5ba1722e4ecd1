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

#include <nlohmann/json.hpp>

#include "biaslens/cascade_spec.hpp"

namespace biaslens {

struct ReviewOptions {
  std::string listen = "127.0.0.1:8080";
  std::string decision_log;
  std::string run_dir;
  std::string ui_dir;
};

/// Everything a command resolved from flags; echoed as config.json into
/// every output directory. Paths are stored as given.
struct RunConfig {
  std::string command;
  std::string corpus;
  std::string out;
  std::uint64_t seed = 22;
  std::size_t folds = 5;
  std::size_t top_n = 10;
  std::size_t threads = 1;
  bool strip_field_prefix = false;
  CascadeSpec cascade;
  ReviewOptions review;

  /// Propagates seed and threads into the cascade spec.
  void resolve();
};

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace biaslens
