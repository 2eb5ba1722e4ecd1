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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biaslens/bio.hpp"
#include "biaslens/cascade.hpp"
#include "biaslens/dashboard.hpp"
#include "biaslens/document_classifier.hpp"
#include "biaslens/embeddings.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/features.hpp"
#include "biaslens/folds.hpp"
#include "biaslens/linguistic_classifier.hpp"
#include "biaslens/output_dir.hpp"
#include "biaslens/review_service.hpp"
#include "biaslens/sequence_crf.hpp"
#include "biaslens/synthetic.hpp"
#include "biaslens/tfidf.hpp"
#include "biaslens/tokenizer.hpp"
#include "fixtures.hpp"

namespace {

using namespace biaslens;
using biaslens::testing::span;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure reasons for one criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ << (failures_ > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    std::ostringstream s;
    s << failures_ << " failure(s): " << messages_.str();
    return {false, s.str()};
  }

 private:
  std::size_t failures_ = 0;
  std::ostringstream messages_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

Outcome loose_match_oracle() {
  Check c;
  Rng rng(1001);
  const auto t0 = Clock::now();
  std::size_t comparisons = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto cfg = biaslens::testing::random_configuration(rng, 10, 5);
    const CorpusAnnotations pred{{"d", cfg.predicted}};
    const CorpusAnnotations gold{{"d", cfg.reference}};
    LabelSet labels;
    for (auto l : cfg.labels) labels.insert(l);
    const auto report = score(pred, gold, labels);
    for (auto l : cfg.labels) {
      const auto expected = biaslens::testing::brute_force_counts(cfg.predicted, cfg.reference, l);
      const auto& got = report.counts.at(l);
      const bool equal = got.tp == expected.tp && got.fp == expected.fp && got.fn == expected.fn &&
                         got.tp_reference == expected.tp_reference;
      c.require(equal, "case " + std::to_string(i) + " label " + std::string(to_string(l)));
      ++comparisons;
    }
  }
  const double t = seconds_since(t0);
  c.require(t < 5.0, "took " + num(t) + " s");
  return c.outcome("1000 configurations, " + std::to_string(comparisons) + " label comparisons, " + num(t) + " s");
}

Outcome metric_identities() {
  Check c;
  Rng rng(2002);
  const std::vector<CodeLabel> labels{CodeLabel::Feminine, CodeLabel::Masculine, CodeLabel::Omission,
                                      CodeLabel::GenderedRole};
  const LabelSet set{CodeLabel::Feminine, CodeLabel::Masculine, CodeLabel::Omission, CodeLabel::GenderedRole};
  for (int i = 0; i < 200; ++i) {
    const auto a = biaslens::testing::random_annotations(rng, 6, labels);
    const auto b = biaslens::testing::random_annotations(rng, 6, labels);
    const auto ab = score(a, b, set);
    const auto ba = score(b, a, set);
    for (auto l : labels) {
      c.require(ab.per_label.at(l).recall == ba.per_label.at(l).precision,
                "swap recall/precision case " + std::to_string(i));
      c.require(ab.per_label.at(l).precision == ba.per_label.at(l).recall,
                "swap precision/recall case " + std::to_string(i));
    }
    const auto aa = score(a, a, set);
    for (auto l : aa.macro_labels) c.require(aa.per_label.at(l) == Prf{1, 1, 1}, "self score case " + std::to_string(i));
    if (!aa.macro_labels.empty()) {
      c.require(aa.macro == Prf{1, 1, 1}, "self macro case " + std::to_string(i));
      c.require(aa.micro == Prf{1, 1, 1}, "self micro case " + std::to_string(i));
    }
  }
  // 0/0 conventions.
  const CorpusAnnotations empty{{"d", {}}};
  const CorpusAnnotations one{{"d", {span(0, 3, CodeLabel::Feminine)}}};
  const auto none = score(empty, one, LabelSet{CodeLabel::Feminine});
  c.require(none.per_label.at(CodeLabel::Feminine) == Prf{0, 0, 0}, "no predictions should give 0/0/0");
  const auto nothing = score(empty, empty, LabelSet{CodeLabel::Feminine});
  c.require(nothing.per_label.at(CodeLabel::Feminine) == Prf{0, 0, 0}, "empty sets should give 0/0/0");
  c.require(nothing.macro == Prf{0, 0, 0} && nothing.micro == Prf{0, 0, 0}, "empty macro/micro should be 0");
  c.require(prf(LabelCounts{}) == Prf{0, 0, 0}, "prf of zero counts");
  c.require(harmonic_mean(0, 0) == 0.0, "harmonic mean 0/0");
  return c.outcome("200 swap cases, self-identity and 0/0 conventions exact");
}

double exhaustive_max(const std::function<double(const std::vector<std::size_t>&)>& path_score, std::size_t length,
                      std::size_t tags) {
  std::vector<std::size_t> path(length, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    best = std::max(best, path_score(path));
    std::size_t k = 0;
    while (k < length && ++path[k] == tags) path[k++] = 0;
    if (k == length) break;
  }
  return best;
}

Outcome viterbi_optimality() {
  Check c;
  Rng rng(3003);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t length = 1 + rng.uniform_index(6);
    if (i % 2 == 0) {
      // Raw lattice with 1..5 tags.
      const std::size_t tags = 1 + rng.uniform_index(5);
      std::vector<double> emissions(length * tags);
      std::vector<double> transitions(tags * tags);
      for (auto& e : emissions) e = rng.uniform(-3, 3);
      for (auto& t : transitions) t = rng.uniform(-3, 3);
      const auto decoded = viterbi_decode(emissions, length, transitions, tags);
      const auto path_score = [&](const std::vector<std::size_t>& p) {
        double s = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
          s += emissions[k * tags + p[k]];
          if (k) s += transitions[p[k - 1] * tags + p[k]];
        }
        return s;
      };
      const double best = exhaustive_max(path_score, length, tags);
      const double gap = std::max(std::abs(decoded.score - best), std::abs(path_score(decoded.path) - best));
      worst = std::max(worst, gap);
      c.require(gap <= 1e-9, "lattice case " + std::to_string(i) + " gap " + std::to_string(gap));
    } else {
      // A CRF with random weights over a 3- or 5-tag set.
      std::vector<CodeLabel> labels{CodeLabel::Feminine};
      if (rng.uniform() < 0.5) labels.push_back(CodeLabel::Masculine);
      TokenFeatureLayout layout;
      layout.embedding_dim = 3;
      CrfModel m(TagSet(labels), layout, 1.0);
      for (auto& w : m.mutable_mean()) w = rng.uniform(-2, 2);
      AttributeSequence x(length, std::vector<float>(layout.width()));
      for (auto& row : x) {
        for (auto& v : row) v = static_cast<float>(rng.uniform(-1, 1));
      }
      const auto decoded = m.decode(x);
      const auto path_score = [&](const std::vector<std::size_t>& p) { return m.path_score(x, p); };
      const double best = exhaustive_max(path_score, length, m.tags().size());
      const double gap = std::max(std::abs(decoded.score - best), std::abs(m.path_score(x, decoded.path) - best));
      worst = std::max(worst, gap);
      c.require(gap <= 1e-9, "crf case " + std::to_string(i) + " gap " + std::to_string(gap));
    }
  }
  const double t = seconds_since(t0);
  c.require(t < 30.0, "took " + num(t) + " s");
  std::ostringstream s;
  s << "500 settings, max gap " << worst << ", " << num(t) << " s";
  return c.outcome(s.str());
}

CascadeSpec quick_spec(CascadeVariant v) {
  CascadeSpec s;
  s.variant = v;
  s.lc.forest.trees = 20;
  s.embeddings.epochs = 3;
  s.embeddings.buckets = 50000;
  return s;
}

Outcome cv_protocol() {
  Check c;
  for (std::size_t n : {5, 10, 11, 37, 104, 600}) {
    Corpus corpus;
    for (std::size_t i = 0; i < n; ++i) corpus.push_back(biaslens::testing::make_description("d" + std::to_string(i), "x"));
    for (std::uint64_t seed : {1, 22, 99}) {
      const auto f = make_folds(corpus, 5, seed);
      std::set<std::string> all;
      std::size_t total = 0;
      std::size_t lo = n;
      std::size_t hi = 0;
      for (const auto& fold : f.folds) {
        all.insert(fold.begin(), fold.end());
        total += fold.size();
        lo = std::min(lo, fold.size());
        hi = std::max(hi, fold.size());
      }
      c.require(total == n && all.size() == n, "folds do not partition n=" + std::to_string(n));
      c.require(hi - lo <= 1, "fold sizes differ by more than 1 at n=" + std::to_string(n));
    }
  }

  SyntheticOptions o;
  o.descriptions = 150;
  const auto corpus = synthetic_corpus(o);
  const auto folds = make_folds(corpus, 5, 22);
  const auto run = run_cascade(corpus, quick_spec(CascadeVariant::C1), folds);
  std::map<std::string, std::size_t> predicted;
  for (const auto& s : run.scores) ++predicted[s.description_id];
  for (const auto& d : corpus) c.require(predicted[d.id] == 1, "description " + d.id + " not predicted exactly once");
  c.require(predicted.size() == corpus.size(), "predictions for unknown descriptions");
  for (const auto& p : run.predictions) {
    c.require(p.fold == folds.fold_of(p.description_id), "span from wrong fold on " + p.description_id);
    const auto& prov = run.provenance.at(p.fold);
    c.require(!std::binary_search(prov.training_ids.begin(), prov.training_ids.end(), p.description_id),
              "leakage on " + p.description_id);
  }
  c.require(provenance_violations(run, corpus).empty(), "provenance_violations reported a problem");
  return c.outcome("partition/balance on 18 corpora; 150-description C1 run covered once, no leakage");
}

Outcome cascade_plumbing() {
  Check c;
  const auto corpus = biaslens::testing::plumbing_corpus(300, 4004);
  const auto folds = make_folds(corpus, 5, 22);
  std::ostringstream detail;
  const LabelSet osc_labels(kDocumentLabels);
  for (auto variant : {CascadeVariant::C1, CascadeVariant::C2, CascadeVariant::C3, CascadeVariant::Baseline}) {
    auto spec = quick_spec(variant);
    spec.upstream_source = UpstreamSource::GoldOracle;
    const auto run = run_cascade(corpus, spec, folds);
    std::vector<PredictedSpan> osc;
    std::vector<PredictedSpan> pnoc;
    for (const auto& p : run.predictions) (p.stage == Stage::Osc ? osc : pnoc).push_back(p);
    const auto gold = annotations_of(corpus);
    const auto report = score(annotations_of(osc, corpus), gold, osc_labels);
    detail << to_string(variant) << " OSC F1 " << num(report.per_label.at(CodeLabel::Omission).f1) << "/"
           << num(report.per_label.at(CodeLabel::Stereotype).f1);
    if (variant == CascadeVariant::Baseline) {
      detail << " (control)";
      continue;
    }
    for (auto l : kDocumentLabels) {
      c.require(report.per_label.at(l).f1 == 1.0,
                std::string(to_string(variant)) + " " + std::string(to_string(l)) + " F1 " +
                    num(report.per_label.at(l).f1, 4));
    }
    if (variant == CascadeVariant::C1) {
      std::vector<PredictedSpan> pn;
      for (const auto& p : run.predictions) {
        if (p.stage == Stage::Pnoc) pn.push_back(p);
      }
      const auto pr = score(annotations_of(pn, corpus), gold, LabelSet{CodeLabel::Masculine, CodeLabel::Occupation});
      detail << ", PNOC F1 " << num(pr.macro.f1);
      c.require(pr.macro.f1 == 1.0, "c1 PNOC F1 " + num(pr.macro.f1, 4));
    }
    detail << "; ";
  }
  return c.outcome(detail.str());
}

Outcome synthetic_f1() {
  Check c;
  const auto t0 = Clock::now();
  SyntheticOptions o;
  o.descriptions = 600;
  const auto corpus = synthetic_corpus(o);
  const auto folds = make_folds(corpus, 5, 22);
  const auto run = run_cascade(corpus, CascadeSpec{}, folds);
  const std::vector<CascadeRun> runs{run};
  const auto table = compare_runs(runs, corpus);
  std::ostringstream detail;
  detail << corpus.size() << " descriptions, baseline, default hyperparameters:";
  for (const auto& row : table.rows) {
    detail << " " << to_string(row.stage) << " macro F1 " << num(row.macro.f1) << " (micro " << num(row.micro.f1)
           << ")";
    c.require(row.macro.f1 >= 0.95, std::string(to_string(row.stage)) + " macro F1 " + num(row.macro.f1, 4));
  }
  const double t = seconds_since(t0);
  detail << ", " << num(t, 1) << " s";
  c.require(t < 300.0, "took " + num(t, 1) + " s");
  return c.outcome(detail.str());
}

Outcome determinism() {
  Check c;
  biaslens::testing::TempDir dir;
  const auto corpus = (dir / "syn" / "corpus.jsonl").string();
  c.require(biaslens::testing::run_cli({"synth", "--out", (dir / "syn").string(), "--descriptions", "200"}) == 0,
            "synth failed");
  const std::vector<std::pair<std::string, std::string>> runs{{"a", "1"}, {"b", "1"}, {"c", "4"}, {"d", "3"}};
  for (const auto& [name, threads] : runs) {
    const int status = biaslens::testing::run_cli({"crossval", "--corpus", corpus, "--out", (dir / name).string(),
                                                   "--variant", "c1", "--seed", "22", "--threads", threads});
    c.require(status == 0, "crossval " + name + " exited " + std::to_string(status));
  }
  for (const char* file : {"predictions.jsonl", "metrics.json", "scores.jsonl", "manifest.json", "folds.json"}) {
    const auto reference = read_file(dir / "a" / file);
    for (const char* other : {"b", "c", "d"}) {
      c.require(read_file(dir / other / file) == reference, std::string(file) + " differs in run " + other);
    }
  }
  return c.outcome("crossval c1 seed 22 with 1, 1, 4 and 3 threads: predictions/metrics/scores byte-identical");
}

Outcome bio_embeddings_tfidf() {
  Check c;
  Rng rng(5005);
  const LabelSet seq(kSequenceLabels);
  const std::vector<CodeLabel> labels(kSequenceLabels.begin(), kSequenceLabels.end());
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    std::vector<std::pair<std::size_t, std::size_t>> words;
    const auto n = 1 + rng.uniform_index(15);
    for (std::size_t w = 0; w < n; ++w) {
      if (!text.empty()) text += rng.uniform() < 0.2 ? ", " : " ";
      const std::size_t start = text.size();
      text += "w" + std::to_string(rng.uniform_index(50));
      words.emplace_back(start, text.size());
    }
    // Non-overlapping word-aligned spans.
    std::vector<AnnotationSpan> spans;
    std::size_t w = 0;
    while (w < n) {
      if (rng.uniform() < 0.35) {
        const auto len = 1 + rng.uniform_index(std::min<std::size_t>(3, n - w));
        spans.push_back(span(words[w].first, words[w + len - 1].second, labels[rng.uniform_index(labels.size())]));
        w += len + rng.uniform_index(2);
      } else {
        ++w;
      }
    }
    const auto d = biaslens::testing::make_description("r" + std::to_string(i), text, spans);
    const auto t = preprocess(d);
    const auto back = bio_to_spans(to_bio(d, t, seq), t);
    c.require(back == merge_same_label(spans), "round trip case " + std::to_string(i));
  }

  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 50; ++i) sentences.push_back({"the", "clerk", "wrote", "to", i % 2 ? "his" : "her", "wife"});
  EmbeddingConfig ec;
  ec.buckets = 10000;
  const auto m = train_embeddings(sentences, ec);
  const auto reloaded = EmbeddingModel::deserialize(m.serialize());
  c.require(m.dim() == 100 && reloaded.dim() == 100, "model dimension");
  for (const char* w : {"clerk", "clerks", "", "zzzz", "wife"}) {
    c.require(m.embed(w).size() == 100, std::string("dimension of '") + w + "'");
    c.require(reloaded.embed(w) == m.embed(w), std::string("reload changes '") + w + "'");
  }
  const auto row = assemble_token_features(tokenize("His wife wrote."), m);
  for (const auto& r : row[0]) c.require(r.embedding.size() == 100, "token feature dimension");

  // Hand-computed smoothed idf with l2 normalization on a 3-document corpus.
  const std::vector<std::vector<std::string>> docs{{"a", "b", "a"}, {"a", "c"}, {"b", "c", "d"}};
  const auto tf = fit_tfidf(docs);
  const double n_docs = 3;
  const auto idf = [&](double df) { return std::log((1 + n_docs) / (1 + df)) + 1; };
  const std::map<std::string, double> idf_expected{{"a", idf(2)}, {"b", idf(2)}, {"c", idf(2)}, {"d", idf(1)}};
  for (const auto& [term, value] : idf_expected) {
    c.require(std::abs(tf.idf()[tf.vocabulary().at(term)] - value) <= 1e-12, "idf of " + term);
  }
  const auto expect_doc = [&](const std::string& text, std::map<std::string, double> raw) {
    double norm = 0;
    for (const auto& [term, v] : raw) norm += v * v;
    norm = std::sqrt(norm);
    const auto v = tf.transform(text);
    c.require(v.indices.size() == raw.size(), "nonzero count for '" + text + "'");
    for (const auto& [term, value] : raw) {
      c.require(std::abs(v.at(tf.vocabulary().at(term)) - value / norm) <= 1e-12, "weight of " + term + " in '" + text + "'");
    }
  };
  expect_doc("a b a", {{"a", 2 * idf(2)}, {"b", idf(2)}});
  expect_doc("a c", {{"a", idf(2)}, {"c", idf(2)}});
  expect_doc("b c d", {{"b", idf(2)}, {"c", idf(2)}, {"d", idf(1)}});
  return c.outcome("1000 BIO round trips exact; dimension 100 throughout; TF-IDF within 1e-12");
}

Outcome arow_and_majority() {
  Check c;
  std::ostringstream detail;
  // Covariance monotone over 100 random updates.
  TokenFeatureLayout layout;
  layout.embedding_dim = 6;
  CrfModel m(TagSet{}, layout, 1.0);
  Rng rng(6006);
  std::size_t applied = 0;
  for (int step = 0; step < 100; ++step) {
    std::vector<double> delta(m.dimension(), 0.0);
    for (int k = 0; k < 12; ++k) delta[rng.uniform_index(delta.size())] += rng.uniform(-2, 2);
    const auto before = m.covariance();
    applied += arow_update(m, delta, 1.0).applied;
    for (std::size_t i = 0; i < before.size(); ++i) {
      c.require(m.covariance()[i] <= before[i], "covariance grew at step " + std::to_string(step));
      c.require(m.covariance()[i] > 0.0 && m.covariance()[i] <= 1.0, "covariance out of (0, r]");
    }
  }
  detail << "AROW " << applied << "/100 updates applied, covariance non-increasing; ";

  // Training-set accuracy vs constant majority on a synthetic fixture.
  SyntheticOptions o;
  o.descriptions = 200;
  const auto corpus = synthetic_corpus(o);
  const auto bundle = train_bundle(corpus, quick_spec(CascadeVariant::Baseline));

  std::vector<TokenFeatureRow> rows;
  std::vector<LabelSet> token_labels;
  std::vector<std::vector<std::string>> gold_tags;
  std::vector<std::vector<std::string>> predicted_tags;
  const LabelSet linguistic(kLinguisticLabels);
  const LabelSet sequence(kSequenceLabels);
  for (const auto& d : corpus) {
    const auto t = preprocess(d);
    const auto sentences = assemble_token_features(t, bundle.embeddings);
    const auto sets = token_label_sets(d, t, linguistic);
    const auto tags = to_bio(d, t, sequence);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const auto& range = t.sentences[s];
      rows.insert(rows.end(), sentences[s].begin(), sentences[s].end());
      token_labels.insert(token_labels.end(), sets.begin() + range.begin, sets.begin() + range.end);
      gold_tags.emplace_back(tags.begin() + range.begin, tags.begin() + range.end);
      predicted_tags.push_back(bundle.pnoc.predict(sentences[s]).tags);
    }
  }
  const auto lc_pred = bundle.lc.predict(rows);
  for (auto label : kLinguisticLabels) {
    std::size_t right = 0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      right += lc_pred[i].contains(label) == token_labels[i].contains(label);
      positives += token_labels[i].contains(label);
    }
    const auto majority = std::max(positives, rows.size() - positives);
    detail << to_string(label) << " " << num(double(right) / rows.size()) << " vs " << num(double(majority) / rows.size())
           << "; ";
    c.require(right >= majority, std::string("LC stage ") + std::string(to_string(label)) + " below majority");
  }
  std::map<std::string, std::size_t> tag_counts;
  std::size_t tag_right = 0;
  std::size_t tag_total = 0;
  for (std::size_t s = 0; s < gold_tags.size(); ++s) {
    for (std::size_t k = 0; k < gold_tags[s].size(); ++k) {
      ++tag_counts[gold_tags[s][k]];
      tag_right += gold_tags[s][k] == predicted_tags[s][k];
      ++tag_total;
    }
  }
  std::size_t tag_majority = 0;
  for (const auto& [tag, n] : tag_counts) tag_majority = std::max(tag_majority, n);
  detail << "PNOC " << num(double(tag_right) / tag_total) << " vs " << num(double(tag_majority) / tag_total) << "; ";
  c.require(tag_right >= tag_majority, "PNOC below majority");

  for (std::size_t k = 0; k < kDocumentLabels.size(); ++k) {
    const auto label = kDocumentLabels[k];
    std::size_t right = 0;
    std::size_t positives = 0;
    for (const auto& d : corpus) {
      const bool gold = std::any_of(d.annotations.begin(), d.annotations.end(),
                                    [&](const AnnotationSpan& a) { return a.label == label; });
      const bool got = bundle.osc.predict(assemble_doc_features(d, bundle.tfidf)).labels.contains(label);
      right += gold == got;
      positives += gold;
    }
    const auto majority = std::max(positives, corpus.size() - positives);
    detail << to_string(label) << " " << num(double(right) / corpus.size()) << " vs "
           << num(double(majority) / corpus.size()) << (k + 1 < kDocumentLabels.size() ? "; " : "");
    c.require(right >= majority, std::string("OSC ") + std::string(to_string(label)) + " below majority");
  }
  return c.outcome(detail.str());
}

Outcome dashboard_checks() {
  Check c;
  SyntheticOptions o;
  o.descriptions = 200;
  const auto corpus = synthetic_corpus(o);
  const auto folds = make_folds(corpus, 5, 22);
  const auto run = run_cascade(corpus, quick_spec(CascadeVariant::C2), folds);
  const auto data = build_dashboard(run.predictions, corpus, 10, &corpus);

  std::set<std::string> flagged;
  for (const auto& p : run.predictions) {
    if (p.stage == Stage::Osc) flagged.insert(p.description_id);
  }
  const auto& b = data.breakdown;
  c.require(b.stereotype_only + b.both + b.omission_only == flagged.size(), "breakdown sum != flagged descriptions");

  // Group-by oracle on fonds counts.
  std::map<std::string, std::string> fonds_of;
  for (const auto& d : corpus) fonds_of[d.id] = d.fonds_id;
  for (const auto& ranking : data.rankings) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : run.predictions) {
      if (p.span.label == ranking.label) ++counts[fonds_of.at(p.description_id)];
    }
    std::vector<std::pair<std::string, std::size_t>> expected(counts.begin(), counts.end());
    std::stable_sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    if (expected.size() > 10) expected.resize(10);
    c.require(ranking.rows.size() == expected.size(), "ranking size for " + std::string(to_string(ranking.label)));
    for (std::size_t i = 0; i < std::min(expected.size(), ranking.rows.size()); ++i) {
      c.require(ranking.rows[i].fonds_id == expected[i].first && ranking.rows[i].count == expected[i].second,
                "ranking row " + std::to_string(i) + " for " + std::string(to_string(ranking.label)));
    }
  }
  // Language group-by over the ranked fonds.
  std::set<std::string> ranked;
  for (const auto& r : data.rankings) {
    for (const auto& row : r.rows) ranked.insert(row.fonds_id);
  }
  std::map<std::string, std::set<std::string>> fonds_by_language;
  for (const auto& d : corpus) {
    if (!ranked.count(d.fonds_id)) continue;
    for (const auto& l : d.languages) fonds_by_language[l].insert(d.fonds_id);
  }
  c.require(data.languages.size() == fonds_by_language.size(), "language table size");
  for (const auto& row : data.languages) {
    c.require(fonds_by_language[row.language].size() == row.fonds, "language count for " + row.language);
  }
  // Word counts: tokens overlapping Linguistic spans.
  std::map<CodeLabel, std::size_t> words;
  std::map<std::string, const Description*> by_id;
  for (const auto& d : corpus) by_id[d.id] = &d;
  for (const auto& d : corpus) {
    const auto t = preprocess(d);
    for (auto label : kLinguisticLabels) {
      for (const auto& tok : t.tokens) {
        const bool hit = std::any_of(run.predictions.begin(), run.predictions.end(), [&](const PredictedSpan& p) {
          return p.description_id == d.id && p.span.label == label && p.span.start < tok.end && tok.start < p.span.end;
        });
        words[label] += hit;
      }
    }
  }
  for (auto label : kLinguisticLabels) {
    const auto it = b.words.find(label);
    c.require((it == b.words.end() ? 0 : it->second) == words[label],
              "word count for " + std::string(to_string(label)));
  }

  const auto first = render(data);
  const auto second = render(build_dashboard(run.predictions, corpus, 10, &corpus));
  c.require(first == second, "render not byte-stable");
  std::ostringstream detail;
  detail << b.stereotype_only << "+" << b.both << "+" << b.omission_only << " = " << flagged.size()
         << " flagged; rankings, languages and word counts match group-by; " << first.size()
         << " files byte-stable";
  return c.outcome(detail.str());
}

Outcome review_service_checks() {
  Check c;
  biaslens::testing::TempDir dir;
  const auto syn = dir / "syn";
  c.require(biaslens::testing::run_cli({"synth", "--out", syn.string(), "--descriptions", "120"}) == 0, "synth failed");
  const auto corpus_path = (syn / "corpus.jsonl").string();
  c.require(biaslens::testing::run_cli({"crossval", "--corpus", corpus_path, "--out", (dir / "run").string(),
                                        "--variant", "c2"}) == 0,
            "crossval failed");
  const auto corpus = load_corpus(corpus_path);
  const auto run = load_run(dir / "run");

  // Queue order equals OSC score order.
  std::map<std::string, double> max_score;
  for (const auto& s : run.scores) max_score[s.description_id] = std::max(s.scores[0], s.scores[1]);
  std::set<std::string> flagged;
  for (const auto& p : run.predictions) flagged.insert(p.description_id);
  std::vector<std::string> expected(flagged.begin(), flagged.end());
  std::sort(expected.begin(), expected.end(), [&](const std::string& a, const std::string& b) {
    if (max_score[a] != max_score[b]) return max_score[a] > max_score[b];
    return a < b;
  });

  std::string first_id;
  std::size_t first_end = 0;
  std::string first_label;
  {
    biaslens::testing::ServerProcess server({"--corpus", corpus_path, "--run", (dir / "run").string(), "--out",
                                             (dir / "serve").string()});
    httplib::Client client("127.0.0.1", server.port());
    const auto page = client.Get("/queue?limit=500");
    c.require(page && page->status == 200, "queue request failed");
    std::vector<std::string> order;
    if (page) {
      const auto listing = json::parse(page->body);
      for (const auto& item : listing["items"]) order.push_back(item["id"]);
    }
    c.require(order == expected, "queue order differs from OSC score order");

    if (!order.empty()) {
      first_id = order.front();
      const auto view = client.Get(("/descriptions/" + first_id).c_str());
      c.require(view && view->status == 200, "description view failed");
      if (view) first_end = json::parse(view->body)["length"];
      first_label = "Omission";
    }
    const std::string body = json{{"description_id", first_id}, {"label", first_label}, {"verdict", "accept"},
                                  {"reviewer", "archivist1"}}
                                 .dump();
    const auto posted = client.Post("/decisions", {{"Idempotency-Key", "crash-1"}}, body, "application/json");
    c.require(posted && posted->status == 201, "decision not acknowledged with 201");
    server.kill_hard();
  }
  {
    biaslens::testing::ServerProcess server({"--corpus", corpus_path, "--run", (dir / "run").string(), "--out",
                                             (dir / "serve").string()});
    httplib::Client client("127.0.0.1", server.port());
    const auto desc = client.Get(("/descriptions/" + first_id).c_str());
    bool present = false;
    if (desc) {
      const auto view = json::parse(desc->body);
      for (const auto& d : view["decisions"]) {
        present = present || (d["idempotency_key"] == "crash-1" && d["verdict"] == "accept");
      }
    }
    c.require(present, "decision lost after kill -9 and restart");

    const auto exported = client.Get("/export?policy=latest-accepted");
    c.require(exported && exported->status == 200, "export failed");
    if (exported) {
      write_file_atomic(dir / "export.jsonl", exported->body);
      try {
        const auto parsed = load_corpus(dir / "export.jsonl");
        c.require(parsed.size() == 1 && parsed[0].id == first_id, "export content");
        c.require(parsed.size() == 1 && parsed[0].annotations.size() == 1 &&
                      parsed[0].annotations[0].end == first_end,
                  "exported span does not cover the description");
      } catch (const std::exception& e) {
        c.require(false, std::string("export does not load: ") + e.what());
      }
    }
    c.require(server.terminate() == 0, "server did not exit cleanly on SIGTERM");
  }
  return c.outcome("kill -9 after 201 then restart keeps the decision; export loads; queue of " +
                   std::to_string(expected.size()) + " follows OSC score order");
}

}  // namespace

int main(int argc, char** argv) {
  // An optional argument restricts the run to criteria whose name contains it.
  const std::string only = argc > 1 ? argv[1] : "";
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"loose-match oracle equivalence", loose_match_oracle},
      {"metric identities and swap duality", metric_identities},
      {"viterbi optimality", viterbi_optimality},
      {"cross-validation protocol", cv_protocol},
      {"cascade plumbing oracle", cascade_plumbing},
      {"synthetic separable corpus F1", synthetic_f1},
      {"crossval determinism across thread counts", determinism},
      {"BIO round trip, embedding dimension, TF-IDF values", bio_embeddings_tfidf},
      {"AROW covariance and majority baselines", arow_and_majority},
      {"dashboard sums, group-by and stable rendering", dashboard_checks},
      {"review service durability, export and queue order", review_service_checks},
  };
  int failed = 0;
  std::size_t ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (name.find(only) == std::string::npos) continue;
    ++ran;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " [" << num(seconds_since(t0), 1) << " s] " << o.detail
              << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
