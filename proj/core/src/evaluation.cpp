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
#include "biaslens/evaluation.hpp"

#include "biaslens/error.hpp"

namespace biaslens {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool any_overlap(const AnnotationSpan& s, std::span<const AnnotationSpan> others, CodeLabel label) {
  for (const auto& o : others) {
    if (o.label == label && s.overlaps(o)) return true;
  }
  return false;
}

bool has_label(std::span<const AnnotationSpan> spans, CodeLabel label) {
  for (const auto& s : spans) {
    if (s.label == label) return true;
  }
  return false;
}

}  // namespace

double harmonic_mean(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

Prf prf(const LabelCounts& c) {
  Prf out;
  out.precision = ratio(c.tp, c.tp + c.fp);
  out.recall = ratio(c.tp_reference, c.tp_reference + c.fn);
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

LabelCounts loose_match(std::span<const AnnotationSpan> predicted, std::span<const AnnotationSpan> reference,
                        CodeLabel label) {
  LabelCounts c;
  for (const auto& p : predicted) {
    if (p.label != label) continue;
    if (any_overlap(p, reference, label)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (const auto& g : reference) {
    if (g.label != label) continue;
    if (any_overlap(g, predicted, label)) {
      ++c.tp_reference;
    } else {
      ++c.fn;
    }
  }
  return c;
}

CorpusAnnotations annotations_of(const Corpus& corpus) {
  CorpusAnnotations out;
  for (const auto& d : corpus) out[d.id] = d.annotations;
  return out;
}

CorpusAnnotations annotations_of(std::span<const PredictedSpan> predictions, const Corpus& corpus) {
  CorpusAnnotations out;
  for (const auto& d : corpus) out[d.id];
  for (const auto& p : predictions) {
    auto it = out.find(p.description_id);
    if (it == out.end()) throw Error(ErrorKind::CorpusMismatch, "prediction for unknown description '" + p.description_id + "'");
    it->second.push_back(p.span);
  }
  return out;
}

AgreementReport score(const CorpusAnnotations& predicted, const CorpusAnnotations& reference, const LabelSet& labels) {
  if (predicted.size() != reference.size()) {
    throw Error(ErrorKind::CorpusMismatch, std::to_string(predicted.size()) + " predicted descriptions vs " +
                                               std::to_string(reference.size()) + " reference descriptions");
  }
  for (auto pi = predicted.begin(), ri = reference.begin(); pi != predicted.end(); ++pi, ++ri) {
    if (pi->first != ri->first) throw Error(ErrorKind::CorpusMismatch, "description '" + pi->first + "' not in reference");
  }

  AgreementReport report;
  report.labels = labels.to_vector();
  LabelCounts total;
  for (auto label : report.labels) {
    LabelCounts c;
    bool in_reference = false;
    for (auto pi = predicted.begin(), ri = reference.begin(); pi != predicted.end(); ++pi, ++ri) {
      c += loose_match(pi->second, ri->second, label);
      if (is_document_label(label) && !has_label(pi->second, label) && !has_label(ri->second, label)) ++c.tn;
      in_reference = in_reference || has_label(ri->second, label);
    }
    report.counts[label] = c;
    report.per_label[label] = prf(c);
    if (in_reference) report.macro_labels.push_back(label);
    total += c;
  }
  for (auto label : report.macro_labels) {
    const auto& p = report.per_label[label];
    report.macro.precision += p.precision;
    report.macro.recall += p.recall;
    report.macro.f1 += p.f1;
  }
  if (!report.macro_labels.empty()) {
    const double n = static_cast<double>(report.macro_labels.size());
    report.macro.precision /= n;
    report.macro.recall /= n;
    report.macro.f1 /= n;
  }
  report.micro = prf(total);
  return report;
}

AgreementReport average(std::span<const AgreementReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to average");
  AgreementReport out;
  out.labels = reports.front().labels;
  out.pairs = 0;
  const double n = static_cast<double>(reports.size());
  LabelSet macro_union;
  for (const auto& r : reports) {
    out.pairs += r.pairs;
    for (auto label : out.labels) {
      out.counts[label] += r.counts.at(label);
      auto& p = out.per_label[label];
      p.precision += r.per_label.at(label).precision / n;
      p.recall += r.per_label.at(label).recall / n;
      p.f1 += r.per_label.at(label).f1 / n;
    }
    out.macro.precision += r.macro.precision / n;
    out.macro.recall += r.macro.recall / n;
    out.macro.f1 += r.macro.f1 / n;
    out.micro.precision += r.micro.precision / n;
    out.micro.recall += r.micro.recall / n;
    out.micro.f1 += r.micro.f1 / n;
    for (auto l : r.macro_labels) macro_union.insert(l);
  }
  out.macro_labels = macro_union.to_vector();
  return out;
}

AgreementReport pairwise_iaa(const std::map<std::string, CorpusAnnotations>& coders, const LabelSet& labels) {
  if (coders.size() < 2) throw Error(ErrorKind::TooFewAnnotators, std::to_string(coders.size()) + " coder(s)");
  std::vector<AgreementReport> reports;
  for (auto a = coders.begin(); a != coders.end(); ++a) {
    for (auto b = std::next(a); b != coders.end(); ++b) reports.push_back(score(b->second, a->second, labels));
  }
  return average(reports);
}

AgreementReport coders_vs_reference(const std::map<std::string, CorpusAnnotations>& coders,
                                    const CorpusAnnotations& reference, const LabelSet& labels) {
  if (coders.empty()) throw Error(ErrorKind::TooFewAnnotators, "no coders");
  std::vector<AgreementReport> reports;
  for (const auto& [name, ann] : coders) reports.push_back(score(ann, reference, labels));
  return average(reports);
}

nlohmann::json AgreementReport::to_json() const {
  const auto prf_json = [](const Prf& p) {
    return nlohmann::json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  nlohmann::json j = nlohmann::json::object();
  for (auto label : labels) {
    auto entry = prf_json(per_label.at(label));
    const auto& c = counts.at(label);
    entry["tp"] = c.tp;
    entry["fp"] = c.fp;
    entry["fn"] = c.fn;
    entry["tp_reference"] = c.tp_reference;
    if (is_document_label(label)) entry["tn"] = c.tn;
    j[std::string(to_string(label))] = std::move(entry);
  }
  auto macro_json = prf_json(macro);
  nlohmann::json ml = nlohmann::json::array();
  for (auto l : macro_labels) ml.push_back(std::string(to_string(l)));
  macro_json["labels"] = std::move(ml);
  j["macro"] = std::move(macro_json);
  j["micro"] = prf_json(micro);
  j["pairs"] = pairs;
  j["conventions"] = {{"zero_division", "0"},
                      {"matching", "loose"},
                      {"recall_numerator", "reference spans matched"}};
  return j;
}

}  // namespace biaslens
