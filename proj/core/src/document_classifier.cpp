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
#include "biaslens/document_classifier.hpp"

#include <cmath>

#include "biaslens/binary_io.hpp"
#include "biaslens/error.hpp"
#include "biaslens/rng.hpp"

namespace biaslens {

namespace {

constexpr std::string_view kMagic = "BLOSCSGD";
constexpr std::uint32_t kVersion = 1;

// Bottou's heuristic for t0. The hinge derivative at (-typw, +1) is -1, so
// the initial step is typw itself.
double initial_offset(double alpha) {
  const double typw = std::sqrt(1.0 / std::sqrt(alpha));
  return 1.0 / (typw * alpha);
}

LinearBinaryClassifier train_binary(std::span<const DocFeatureVector> xs, const std::vector<double>& y,
                                    CodeLabel label, std::size_t dim, const OscConfig& config,
                                    std::vector<SgdEpochStats>* trace) {
  LinearBinaryClassifier clf;
  clf.label = label;
  clf.weights.assign(dim, 0.0);
  std::size_t positives = 0;
  for (double v : y) positives += v > 0 ? 1 : 0;
  if (positives == 0 || positives == y.size()) {
    clf.degenerate = true;
    clf.intercept = positives == 0 ? -1.0 : 1.0;
    return clf;
  }

  const double alpha = config.alpha;
  const double t0 = initial_offset(alpha);
  std::vector<double> w(dim, 0.0);
  double wscale = 1.0;
  double sq_norm = 0.0;  // ||wscale * w||^2
  double b = 0.0;
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  double t = 1.0;

  const auto exact_sq_norm = [&] {
    double s = 0;
    for (double v : w) s += v * v;
    return s * wscale * wscale;
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double objective_sum = 0.0;
    for (auto i : order) {
      const auto& x = xs[i];
      const double eta = 1.0 / (alpha * (t0 + t));
      const double p = x.dot(w) * wscale + b;
      const double z = p * y[i];
      objective_sum += std::max(0.0, 1.0 - z) + 0.5 * alpha * sq_norm;
      if (z < 1.0) {
        const double update = eta * y[i];
        x.axpy(update / wscale, w);
        b += update * config.intercept_decay;
      }
      wscale *= std::max(0.0, 1.0 - eta * alpha);
      if (wscale < 1e-9) {
        for (auto& v : w) v *= wscale;
        wscale = 1.0;
      }
      sq_norm = exact_sq_norm();
      t += 1.0;
    }
    if (trace) trace->push_back({label, epoch, objective_sum / static_cast<double>(xs.size())});
  }
  for (auto& v : w) v *= wscale;
  clf.weights = std::move(w);
  clf.intercept = b;
  return clf;
}

}  // namespace

nlohmann::json to_json(const OscConfig& c) {
  return nlohmann::json{{"algorithm", "one_vs_rest(linear_svm_sgd)"},
                        {"loss", "hinge"},
                        {"penalty", "l2"},
                        {"alpha", c.alpha},
                        {"learning_rate", "optimal"},
                        {"epochs", c.epochs},
                        {"intercept_decay", c.intercept_decay},
                        {"seed", c.seed}};
}

OscConfig osc_config_from_json(const nlohmann::json& j) {
  OscConfig c;
  c.alpha = j.value("alpha", c.alpha);
  c.epochs = j.value("epochs", c.epochs);
  c.intercept_decay = j.value("intercept_decay", c.intercept_decay);
  c.seed = j.value("seed", c.seed);
  return c;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

OscModel train_osc(std::span<const DocFeatureVector> vectors, std::span<const LabelSet> labels,
                   const OscConfig& config, std::vector<SgdEpochStats>* trace) {
  if (vectors.empty()) throw Error(ErrorKind::EmptyTrainingSet, "document classifier has no training documents");
  if (vectors.size() != labels.size()) {
    throw Error(ErrorKind::AlignmentError,
                std::to_string(vectors.size()) + " documents for " + std::to_string(labels.size()) + " label sets");
  }
  OscModel model;
  model.dim_ = vectors.front().dim();
  model.injected_labels_ = vectors.front().injected_labels;
  for (const auto& v : vectors) {
    if (v.dim() != model.dim_ || v.injected_labels != model.injected_labels_) {
      throw Error(ErrorKind::FeatureShapeMismatch, "document vectors have inconsistent layouts");
    }
  }
  for (std::size_t k = 0; k < kDocumentLabels.size(); ++k) {
    std::vector<double> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i].contains(kDocumentLabels[k]) ? 1.0 : -1.0;
    model.classifiers_[k] = train_binary(vectors, y, kDocumentLabels[k], model.dim_, config, trace);
  }
  return model;
}

OscPrediction OscModel::predict(const DocFeatureVector& x) const {
  if (x.dim() != dim_ || x.injected_labels != injected_labels_) {
    throw Error(ErrorKind::FeatureShapeMismatch,
                "document vector has " + std::to_string(x.dim()) + " dims, model expects " + std::to_string(dim_));
  }
  OscPrediction p;
  for (std::size_t k = 0; k < classifiers_.size(); ++k) {
    p.scores[k] = classifiers_[k].score(x);
    if (p.scores[k] > 0) p.labels.insert(classifiers_[k].label);
  }
  return p;
}

std::vector<OscPrediction> OscModel::predict(std::span<const DocFeatureVector> xs) const {
  std::vector<OscPrediction> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

std::string OscModel::serialize() const {
  BinaryWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(dim_);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(injected_labels_.size()));
  for (auto l : injected_labels_) w.put<std::uint8_t>(static_cast<std::uint8_t>(l));
  for (const auto& c : classifiers_) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.label));
    w.put<std::uint8_t>(c.degenerate ? 1 : 0);
    w.put<double>(c.intercept);
    w.put_array<double>(c.weights);
  }
  return w.take();
}

OscModel OscModel::deserialize(std::string_view bytes) {
  BinaryReader r(bytes);
  r.expect_magic(kMagic);
  if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorKind::FormatError, "unsupported OSC model version");
  OscModel m;
  m.dim_ = r.get<std::uint64_t>();
  const auto read_label = [&] {
    const auto v = r.get<std::uint8_t>();
    if (v >= kLabelCount) throw Error(ErrorKind::FormatError, "label code out of range");
    return static_cast<CodeLabel>(v);
  };
  const auto ni = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < ni; ++i) m.injected_labels_.push_back(read_label());
  for (auto& c : m.classifiers_) {
    c.label = read_label();
    c.degenerate = r.get<std::uint8_t>() != 0;
    c.intercept = r.get<double>();
    c.weights = r.get_array<double>();
    if (c.weights.size() != m.dim_) throw Error(ErrorKind::FormatError, "OSC weight vector has the wrong dimension");
  }
  r.expect_end();
  return m;
}

}  // namespace biaslens
