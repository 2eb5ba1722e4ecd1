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
#include "biaslens/model_bundle.hpp"

#include "biaslens/error.hpp"
#include "biaslens/output_dir.hpp"

namespace biaslens {

namespace {

constexpr int kBundleFormat = 1;

nlohmann::json labels_json(const std::vector<CodeLabel>& labels) {
  nlohmann::json out = nlohmann::json::array();
  for (auto l : labels) out.push_back(std::string(to_string(l)));
  return out;
}

}  // namespace

std::vector<std::string> ModelBundle::degenerate_stages() const {
  std::vector<std::string> out;
  for (const auto& s : lc.stages()) {
    if (s.degenerate) out.push_back("lc:" + std::string(to_string(s.label)));
  }
  if (pnoc_report.updates == 0) out.emplace_back("pnoc");
  for (const auto& c : osc.classifiers()) {
    if (c.degenerate) out.push_back("osc:" + std::string(to_string(c.label)));
  }
  return out;
}

nlohmann::json ModelBundle::manifest() const {
  nlohmann::json lc_stages = nlohmann::json::array();
  for (const auto& s : lc.stages()) {
    lc_stages.push_back({{"label", to_string(s.label)},
                         {"degenerate", s.degenerate},
                         {"constant", s.constant_value},
                         {"trees", s.forest.tree_count()}});
  }
  nlohmann::json osc_classifiers = nlohmann::json::array();
  for (const auto& c : osc.classifiers()) {
    osc_classifiers.push_back({{"label", to_string(c.label)}, {"degenerate", c.degenerate}, {"intercept", c.intercept}});
  }
  return {
      {"format", kBundleFormat},
      {"spec", to_json(spec)},
      {"training_hash", training_hash},
      {"training_size", training_size},
      {"degenerate_stages", degenerate_stages()},
      {"embeddings",
       {{"algorithm", "skip-gram with negative sampling over character n-grams"},
        {"vocabulary", embeddings.vocab_size()},
        {"trained_buckets", embeddings.trained_bucket_count()},
        {"assumed_hyperparameters", to_json(embeddings.config())}}},
      {"tfidf", {{"dims", tfidf.dims()}, {"idf", "ln((1+n)/(1+df))+1"}, {"norm", "l2"}}},
      {"lc",
       {{"algorithm", "classifier chain of random forests"},
        {"feature_width", lc.layout().width()},
        {"injected_labels", labels_json(lc.layout().injected_labels)},
        {"stages", lc_stages}}},
      {"pnoc",
       {{"algorithm", "linear-chain CRF trained with AROW"},
        {"tags", pnoc.tags().names()},
        {"feature_width", pnoc.layout().width()},
        {"injected_labels", labels_json(pnoc.layout().injected_labels)},
        {"epochs", pnoc_report.epochs},
        {"updates", pnoc_report.updates},
        {"converged", pnoc_report.converged}}},
      {"osc",
       {{"algorithm", "one-vs-rest linear SVM trained with SGD"},
        {"dim", osc.dim()},
        {"injected_labels", labels_json(osc.injected_labels())},
        {"injected_encoding", "presence, ln(1+count)"},
        {"classifiers", osc_classifiers}}},
  };
}

std::vector<std::pair<std::string, std::string>> bundle_files(const ModelBundle& bundle) {
  return {
      {"manifest.json", bundle.manifest().dump(2) + "\n"},
      {"embeddings.bin", bundle.embeddings.serialize()},
      {"tfidf.json", bundle.tfidf.to_json().dump() + "\n"},
      {"lc.bin", bundle.lc.serialize()},
      {"pnoc.bin", bundle.pnoc.serialize()},
      {"osc.bin", bundle.osc.serialize()},
  };
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir) {
  OutputDir out(dir);
  for (const auto& [name, bytes] : bundle_files(bundle)) out.write(name, bytes);
  out.commit();
}

ModelBundle load_bundle(const std::filesystem::path& dir) {
  ModelBundle b;
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, "manifest.json: " + std::string(e.what()));
  }
  if (manifest.value("format", 0) != kBundleFormat) {
    throw Error(ErrorKind::FormatError, "unsupported bundle format in " + dir.string());
  }
  b.spec = cascade_spec_from_json(manifest.at("spec"));
  b.training_hash = manifest.value("training_hash", std::string());
  b.training_size = manifest.value("training_size", std::size_t{0});
  const auto& p = manifest.at("pnoc");
  b.pnoc_report.epochs = p.value("epochs", std::size_t{0});
  b.pnoc_report.updates = p.value("updates", std::size_t{0});
  b.pnoc_report.converged = p.value("converged", false);
  b.embeddings = EmbeddingModel::deserialize(read_file(dir / "embeddings.bin"));
  try {
    b.tfidf = TfidfModel::from_json(nlohmann::json::parse(read_file(dir / "tfidf.json")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, "tfidf.json: " + std::string(e.what()));
  }
  b.lc = LcModel::deserialize(read_file(dir / "lc.bin"));
  b.pnoc = CrfModel::deserialize(read_file(dir / "pnoc.bin"));
  b.osc = OscModel::deserialize(read_file(dir / "osc.bin"));
  return b;
}

}  // namespace biaslens
