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
#include "biaslens/linguistic_classifier.hpp"

#include "biaslens/error.hpp"

namespace biaslens {

namespace {
constexpr std::string_view kMagic = "BLLCHAIN";
constexpr std::uint32_t kVersion = 1;
}  // namespace

nlohmann::json to_json(const LcConfig& c) {
  nlohmann::json order = nlohmann::json::array();
  for (auto l : c.chain_order) order.push_back(std::string(to_string(l)));
  return nlohmann::json{{"algorithm", "classifier_chain(random_forest)"}, {"forest", to_json(c.forest)}, {"chain_order", order}};
}

LcConfig lc_config_from_json(const nlohmann::json& j) {
  LcConfig c;
  if (j.contains("forest")) c.forest = forest_config_from_json(j.at("forest"));
  if (j.contains("chain_order")) {
    c.chain_order.clear();
    for (const auto& l : j.at("chain_order")) c.chain_order.push_back(require_label(l.get<std::string>()));
  }
  return c;
}

LcModel train_lc(std::span<const TokenFeatureRow> rows, std::span<const LabelSet> labels,
                 const TokenFeatureLayout& layout, const LcConfig& config) {
  if (rows.size() != labels.size()) {
    throw Error(ErrorKind::AlignmentError,
                std::to_string(rows.size()) + " token rows for " + std::to_string(labels.size()) + " label sets");
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyTrainingSet, "linguistic classifier has no training tokens");

  LcModel model;
  model.layout_ = layout;
  const std::size_t base = layout.width();
  std::vector<float> buf(base + config.chain_order.size());

  for (std::size_t stage = 0; stage < config.chain_order.size(); ++stage) {
    const CodeLabel label = config.chain_order[stage];
    FeatureMatrix x(0, 0);
    std::vector<std::uint8_t> y(rows.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      flatten(rows[i], layout, std::span<float>(buf.data(), base));
      for (std::size_t p = 0; p < stage; ++p) buf[base + p] = labels[i].contains(config.chain_order[p]) ? 1.0f : 0.0f;
      x.append_row(std::span<const float>(buf.data(), base + stage));
      y[i] = labels[i].contains(label) ? 1 : 0;
      positives += y[i];
    }
    LcStage s;
    s.label = label;
    if (positives == 0 || positives == rows.size()) {
      s.degenerate = true;
      s.constant_value = positives != 0;
    } else {
      // Every stage is a clone of the same seeded forest configuration.
      s.forest = RandomForest::fit(x, y, config.forest);
    }
    model.stages_.push_back(std::move(s));
  }
  return model;
}

std::vector<LcTokenPrediction> LcModel::predict_detailed(std::span<const TokenFeatureRow> rows) const {
  const std::size_t base = layout_.width();
  std::vector<float> buf(base + stages_.size());
  std::vector<LcTokenPrediction> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    flatten(rows[i], layout_, std::span<float>(buf.data(), base));
    auto& pred = out[i];
    for (std::size_t stage = 0; stage < stages_.size(); ++stage) {
      const auto& s = stages_[stage];
      double vote;
      if (s.degenerate) {
        vote = s.constant_value ? 1.0 : 0.0;
      } else {
        vote = s.forest.vote_fraction(std::span<const float>(buf.data(), base + stage));
      }
      const bool positive = s.degenerate ? s.constant_value : vote > 0.5;
      if (positive) pred.labels.insert(s.label);
      pred.votes.push_back(vote);
      buf[base + stage] = positive ? 1.0f : 0.0f;
    }
  }
  return out;
}

std::vector<LabelSet> LcModel::predict(std::span<const TokenFeatureRow> rows) const {
  std::vector<LabelSet> out;
  out.reserve(rows.size());
  for (auto& p : predict_detailed(rows)) out.push_back(p.labels);
  return out;
}

std::string LcModel::serialize() const {
  BinaryWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(layout_.embedding_dim);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(layout_.injected_labels.size()));
  for (auto l : layout_.injected_labels) w.put<std::uint8_t>(static_cast<std::uint8_t>(l));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(stages_.size()));
  for (const auto& s : stages_) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(s.label));
    w.put<std::uint8_t>(s.degenerate ? 1 : 0);
    w.put<std::uint8_t>(s.constant_value ? 1 : 0);
    s.forest.write(w);
  }
  return w.take();
}

LcModel LcModel::deserialize(std::string_view bytes) {
  BinaryReader r(bytes);
  r.expect_magic(kMagic);
  if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorKind::FormatError, "unsupported LC model version");
  LcModel m;
  const auto read_label = [&] {
    const auto v = r.get<std::uint8_t>();
    if (v >= kLabelCount) throw Error(ErrorKind::FormatError, "label code out of range");
    return static_cast<CodeLabel>(v);
  };
  m.layout_.embedding_dim = r.get<std::uint64_t>();
  const auto injected = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < injected; ++i) m.layout_.injected_labels.push_back(read_label());
  const auto stages = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < stages; ++i) {
    LcStage s;
    s.label = read_label();
    s.degenerate = r.get<std::uint8_t>() != 0;
    s.constant_value = r.get<std::uint8_t>() != 0;
    s.forest = RandomForest::read(r);
    m.stages_.push_back(std::move(s));
  }
  r.expect_end();
  return m;
}

}  // namespace biaslens
