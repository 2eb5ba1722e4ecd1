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
#include "biaslens/sequence_crf.hpp"

#include <cmath>
#include <limits>

#include "biaslens/binary_io.hpp"
#include "biaslens/error.hpp"
#include "biaslens/rng.hpp"

namespace biaslens {

namespace {
constexpr std::string_view kMagic = "BLCRFARW";
constexpr std::uint32_t kVersion = 1;
}  // namespace

TagSet::TagSet(std::vector<CodeLabel> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  names_.push_back("O");
  for (auto l : labels_) {
    names_.push_back("B-" + std::string(to_string(l)));
    names_.push_back("I-" + std::string(to_string(l)));
  }
}

std::optional<std::size_t> TagSet::index(std::string_view tag) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == tag) return i;
  }
  return std::nullopt;
}

nlohmann::json to_json(const CrfConfig& c) {
  return nlohmann::json{{"algorithm", "crf(arow)"},
                        {"variance", c.variance},
                        {"gamma", c.gamma},
                        {"max_iterations", c.max_iterations},
                        {"all_possible_transitions", c.all_possible_transitions},
                        {"seed", c.seed}};
}

CrfConfig crf_config_from_json(const nlohmann::json& j) {
  CrfConfig c;
  c.variance = j.value("variance", c.variance);
  c.gamma = j.value("gamma", c.gamma);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.all_possible_transitions = j.value("all_possible_transitions", c.all_possible_transitions);
  c.seed = j.value("seed", c.seed);
  return c;
}

ViterbiResult viterbi_decode(std::span<const double> emissions, std::size_t length,
                             std::span<const double> transitions, std::size_t tags) {
  ViterbiResult out;
  if (length == 0 || tags == 0) return out;
  std::vector<double> score(emissions.begin(), emissions.begin() + static_cast<std::ptrdiff_t>(tags));
  std::vector<double> next(tags);
  std::vector<std::size_t> back(length * tags, 0);
  for (std::size_t t = 1; t < length; ++t) {
    for (std::size_t y = 0; y < tags; ++y) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t p = 0; p < tags; ++p) {
        const double s = score[p] + transitions[p * tags + y];
        if (s > best) {
          best = s;
          arg = p;
        }
      }
      next[y] = best + emissions[t * tags + y];
      back[t * tags + y] = arg;
    }
    score.swap(next);
  }
  std::size_t last = 0;
  for (std::size_t y = 1; y < tags; ++y) {
    if (score[y] > score[last]) last = y;
  }
  out.score = score[last];
  out.path.resize(length);
  out.path[length - 1] = last;
  for (std::size_t t = length - 1; t > 0; --t) out.path[t - 1] = back[t * tags + out.path[t]];
  return out;
}

CrfModel::CrfModel(TagSet tags, TokenFeatureLayout layout, double initial_variance)
    : tags_(std::move(tags)), layout_(std::move(layout)) {
  const std::size_t l = tags_.size();
  const std::size_t d = layout_.width() * l + l * l;
  mean_.assign(d, 0.0);
  covariance_.assign(d, initial_variance);
  active_.assign(d, 1);
}

std::vector<double> CrfModel::emissions(const AttributeSequence& x) const {
  const std::size_t l = tags_.size();
  const std::size_t a = attributes();
  std::vector<double> e(x.size() * l, 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t].size() != a) {
      throw Error(ErrorKind::FeatureShapeMismatch,
                  "token has " + std::to_string(x[t].size()) + " attributes, model expects " + std::to_string(a));
    }
    double* row = &e[t * l];
    for (std::size_t k = 0; k < a; ++k) {
      const double v = x[t][k];
      if (v == 0.0) continue;
      const double* w = &mean_[k * l];
      for (std::size_t y = 0; y < l; ++y) row[y] += v * w[y];
    }
  }
  return e;
}

std::vector<double> CrfModel::transitions() const {
  const std::size_t l = tags_.size();
  const auto begin = mean_.begin() + static_cast<std::ptrdiff_t>(attributes() * l);
  return std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(l * l));
}

ViterbiResult CrfModel::decode(const AttributeSequence& x) const {
  return viterbi_decode(emissions(x), x.size(), transitions(), tags_.size());
}

double CrfModel::path_score(const AttributeSequence& x, std::span<const std::size_t> path) const {
  const auto e = emissions(x);
  const std::size_t l = tags_.size();
  double s = 0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    s += e[t * l + path[t]];
    if (t > 0) s += mean_[transition_index(path[t - 1], path[t])];
  }
  return s;
}

std::vector<double> CrfModel::feature_counts(const AttributeSequence& x, std::span<const std::size_t> path) const {
  std::vector<double> phi(dimension(), 0.0);
  for (std::size_t t = 0; t < path.size(); ++t) {
    for (std::size_t k = 0; k < x[t].size(); ++k) phi[state_index(k, path[t])] += x[t][k];
    if (t > 0) phi[transition_index(path[t - 1], path[t])] += 1.0;
  }
  return phi;
}

AttributeSequence CrfModel::attributes_of(const SentenceRows& rows) const {
  AttributeSequence x;
  x.reserve(rows.size());
  for (const auto& r : rows) x.push_back(flatten(r, layout_));
  return x;
}

SentencePrediction CrfModel::predict(const SentenceRows& rows) const {
  SentencePrediction out;
  if (rows.empty()) return out;
  const auto x = attributes_of(rows);
  const auto best = decode(x);
  for (auto y : best.path) out.tags.push_back(tags_.name(y));
  out.score = best.score;
  const std::vector<std::size_t> outside(x.size(), 0);
  const double margin = best.score - path_score(x, outside);
  out.confidence = 1.0 / (1.0 + std::exp(-margin));
  return out;
}

std::vector<SentencePrediction> CrfModel::predict(const std::vector<SentenceRows>& sentences) const {
  std::vector<SentencePrediction> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(predict(s));
  return out;
}

ArowUpdate arow_update(CrfModel& m, std::span<const double> delta, double gamma) {
  ArowUpdate u;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] == 0.0) continue;
    u.margin += m.mean_[i] * delta[i];
    u.confidence += m.covariance_[i] * delta[i] * delta[i];
  }
  if (u.margin >= 1.0 || u.confidence == 0.0) return u;
  u.beta = 1.0 / (u.confidence + gamma);
  u.alpha = (1.0 - u.margin) * u.beta;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] == 0.0) continue;
    const double sd = m.covariance_[i] * delta[i];
    m.mean_[i] += u.alpha * sd;
    m.covariance_[i] -= u.beta * sd * sd;
  }
  u.applied = true;
  return u;
}

CrfModel train_pnoc(const std::vector<SentenceRows>& sentences, const std::vector<std::vector<std::string>>& tags,
                    const TokenFeatureLayout& layout, const CrfConfig& config, CrfTrainingReport* report,
                    const std::function<void(const CrfModel&)>& on_update) {
  if (sentences.size() != tags.size()) {
    throw Error(ErrorKind::AlignmentError,
                std::to_string(sentences.size()) + " sentences for " + std::to_string(tags.size()) + " tag sequences");
  }
  CrfModel model(TagSet(), layout, config.variance);
  const std::size_t l = model.tags_.size();

  std::vector<AttributeSequence> xs;
  std::vector<std::vector<std::size_t>> ys;
  xs.reserve(sentences.size());
  ys.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].size() != tags[i].size()) {
      throw Error(ErrorKind::AlignmentError, "sentence " + std::to_string(i) + " has " +
                                                 std::to_string(sentences[i].size()) + " tokens and " +
                                                 std::to_string(tags[i].size()) + " tags");
    }
    std::vector<std::size_t> y;
    for (const auto& tag : tags[i]) {
      auto idx = model.tags_.index(tag);
      if (!idx) throw Error(ErrorKind::InvalidArgument, "tag '" + tag + "' is not in the tag set");
      y.push_back(*idx);
    }
    xs.push_back(model.attributes_of(sentences[i]));
    ys.push_back(std::move(y));
  }

  if (!config.all_possible_transitions) {
    for (std::size_t p = 0; p < l; ++p) {
      for (std::size_t y = 0; y < l; ++y) model.active_[model.transition_index(p, y)] = 0;
    }
    for (const auto& y : ys) {
      for (std::size_t t = 1; t < y.size(); ++t) model.active_[model.transition_index(y[t - 1], y[t])] = 1;
    }
  }

  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  CrfTrainingReport local;
  std::vector<double> delta(model.dimension());

  for (std::size_t epoch = 0; epoch < config.max_iterations; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t updates = 0;
    for (auto i : order) {
      if (xs[i].empty()) continue;
      const auto pred = model.decode(xs[i]);
      if (pred.path == ys[i]) continue;
      std::fill(delta.begin(), delta.end(), 0.0);
      const auto& x = xs[i];
      const auto& gold = ys[i];
      for (std::size_t t = 0; t < x.size(); ++t) {
        if (gold[t] != pred.path[t]) {
          for (std::size_t k = 0; k < x[t].size(); ++k) {
            delta[model.state_index(k, gold[t])] += x[t][k];
            delta[model.state_index(k, pred.path[t])] -= x[t][k];
          }
        }
        if (t > 0) {
          delta[model.transition_index(gold[t - 1], gold[t])] += 1.0;
          delta[model.transition_index(pred.path[t - 1], pred.path[t])] -= 1.0;
        }
      }
      for (std::size_t d = 0; d < delta.size(); ++d) {
        if (!model.active_[d]) delta[d] = 0.0;
      }
      if (arow_update(model, delta, config.gamma).applied) {
        ++updates;
        if (on_update) on_update(model);
      }
    }
    local.epochs = epoch + 1;
    local.updates += updates;
    if (updates == 0) {
      local.converged = true;
      break;
    }
  }
  if (report) *report = local;
  return model;
}

std::string CrfModel::serialize() const {
  BinaryWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tags_.labels().size()));
  for (auto l : tags_.labels()) w.put<std::uint8_t>(static_cast<std::uint8_t>(l));
  w.put<std::uint64_t>(layout_.embedding_dim);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(layout_.injected_labels.size()));
  for (auto l : layout_.injected_labels) w.put<std::uint8_t>(static_cast<std::uint8_t>(l));
  w.put_array<double>(mean_);
  w.put_array<double>(covariance_);
  w.put_array<std::uint8_t>(active_);
  return w.take();
}

CrfModel CrfModel::deserialize(std::string_view bytes) {
  BinaryReader r(bytes);
  r.expect_magic(kMagic);
  if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorKind::FormatError, "unsupported CRF model version");
  const auto read_label = [&] {
    const auto v = r.get<std::uint8_t>();
    if (v >= kLabelCount) throw Error(ErrorKind::FormatError, "label code out of range");
    return static_cast<CodeLabel>(v);
  };
  std::vector<CodeLabel> labels;
  const auto nl = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < nl; ++i) labels.push_back(read_label());
  TokenFeatureLayout layout;
  layout.embedding_dim = r.get<std::uint64_t>();
  const auto ni = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < ni; ++i) layout.injected_labels.push_back(read_label());
  CrfModel m(TagSet(std::move(labels)), std::move(layout), 1.0);
  auto mean = r.get_array<double>();
  auto cov = r.get_array<double>();
  auto active = r.get_array<std::uint8_t>();
  r.expect_end();
  if (mean.size() != m.dimension() || cov.size() != m.dimension() || active.size() != m.dimension()) {
    throw Error(ErrorKind::FormatError, "CRF weight vector has the wrong dimension");
  }
  m.mean_ = std::move(mean);
  m.covariance_ = std::move(cov);
  m.active_ = std::move(active);
  return m;
}

}  // namespace biaslens
