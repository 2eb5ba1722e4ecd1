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
#include "biaslens/run_config.hpp"

#include "biaslens/error.hpp"

namespace biaslens {

void RunConfig::resolve() {
  cascade.set_seed(seed);
  cascade.threads = threads;
  cascade.set_forest_threads(threads);
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"corpus", c.corpus},
          {"out", c.out},
          {"seed", c.seed},
          {"folds", c.folds},
          {"top_n", c.top_n},
          {"threads", c.threads},
          {"strip_field_prefix", c.strip_field_prefix},
          {"cascade", to_json(c.cascade)},
          {"review",
           {{"listen", c.review.listen},
            {"decision_log", c.review.decision_log},
            {"run_dir", c.review.run_dir},
            {"ui_dir", c.review.ui_dir}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.command = j.value("command", std::string());
    c.corpus = j.value("corpus", std::string());
    c.out = j.value("out", std::string());
    c.seed = j.value("seed", c.seed);
    c.folds = j.value("folds", c.folds);
    c.top_n = j.value("top_n", c.top_n);
    c.threads = j.value("threads", c.threads);
    c.strip_field_prefix = j.value("strip_field_prefix", false);
    if (j.contains("cascade")) c.cascade = cascade_spec_from_json(j.at("cascade"));
    if (j.contains("review")) {
      const auto& r = j.at("review");
      c.review.listen = r.value("listen", c.review.listen);
      c.review.decision_log = r.value("decision_log", std::string());
      c.review.run_dir = r.value("run_dir", std::string());
      c.review.ui_dir = r.value("ui_dir", std::string());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("run config: ") + e.what());
  }
}

}  // namespace biaslens
