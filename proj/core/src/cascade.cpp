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
#include "biaslens/cascade.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <thread>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "biaslens/bio.hpp"
#include "biaslens/error.hpp"
#include "biaslens/output_dir.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

namespace {

struct Doc {
  const Description* d;
  const TokenizedDescription* t;
};
using Docs = std::vector<Doc>;

// Upstream codes for a list of documents, aligned by index.
struct UpstreamView {
  std::vector<std::vector<LabelSet>> lc_tokens;
  std::vector<std::vector<PredictedSpan>> lc_spans;
  std::vector<std::vector<PredictedSpan>> pnoc_spans;
};

template <class F>
auto in_stage(std::string_view where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(where) + ": " + e.message());
  }
}

bool needs_lc_upstream(CascadeVariant v) { return v == CascadeVariant::C1 || v == CascadeVariant::C2; }
bool needs_pnoc_upstream(CascadeVariant v) { return v == CascadeVariant::C1 || v == CascadeVariant::C3; }

std::vector<std::vector<std::string>> token_lists(const Docs& docs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<std::string> toks;
    toks.reserve(doc.t->tokens.size());
    for (const auto& tok : doc.t->tokens) toks.push_back(tok.surface);
    out.push_back(std::move(toks));
  }
  return out;
}

std::vector<LabelSet> gold_lc_tokens(const Doc& doc) {
  return token_label_sets(*doc.d, *doc.t, LabelSet(kLinguisticLabels));
}

std::vector<PredictedSpan> gold_spans(const Doc& doc, const LabelSet& labels, Stage stage) {
  std::vector<PredictedSpan> out;
  for (const auto& a : doc.d->annotations) {
    if (labels.contains(a.label)) out.push_back({doc.d->id, a, 0, stage, 1.0});
  }
  return out;
}

// Gold BIO tags for the sequence labels. Spans that would share a token
// with a differently labelled span are dropped, earliest span first kept.
std::vector<std::string> gold_pnoc_tags(const Doc& doc) {
  const LabelSet seq(kSequenceLabels);
  try {
    return to_bio(*doc.d, *doc.t, seq);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OverlapConflict) throw;
  }
  std::vector<AnnotationSpan> spans;
  for (const auto& a : doc.d->annotations) {
    if (seq.contains(a.label)) spans.push_back(a);
  }
  std::sort(spans.begin(), spans.end(), [](const AnnotationSpan& a, const AnnotationSpan& b) {
    return std::tie(a.start, a.end, a.label) < std::tie(b.start, b.end, b.label);
  });
  Description copy = *doc.d;
  copy.annotations.clear();
  std::size_t dropped = 0;
  for (const auto& s : spans) {
    copy.annotations.push_back(s);
    try {
      (void)to_bio(copy, *doc.t, seq);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OverlapConflict) throw;
      copy.annotations.pop_back();
      ++dropped;
    }
  }
  spdlog::debug("{}: dropped {} conflicting sequence span(s)", doc.d->id, dropped);
  return to_bio(copy, *doc.t, seq);
}

std::vector<std::vector<std::string>> split_by_sentence(const std::vector<std::string>& tags,
                                                        const TokenizedDescription& t) {
  std::vector<std::vector<std::string>> out;
  out.reserve(t.sentences.size());
  for (const auto& s : t.sentences) out.emplace_back(tags.begin() + s.begin, tags.begin() + s.end);
  return out;
}

LabelSet gold_doc_labels(const Description& d) {
  LabelSet out;
  for (const auto& a : d.annotations) {
    if (is_document_label(a.label)) out.insert(a.label);
  }
  return out;
}

std::vector<TokenFeatureRow> flat_rows(std::vector<SentenceRows>&& sentences) {
  std::vector<TokenFeatureRow> out;
  for (auto& s : sentences) {
    for (auto& r : s) out.push_back(std::move(r));
  }
  return out;
}

struct LcOutput {
  std::vector<LabelSet> tokens;
  std::vector<PredictedSpan> spans;
};

// Consecutive tokens of one sentence sharing a label form one span.
LcOutput predict_lc_doc(const LcModel& lc, const EmbeddingModel& emb, const Doc& doc, const AnnotationSource& source,
                        std::size_t fold) {
  const auto& t = *doc.t;
  const auto preds = lc.predict_detailed(flat_rows(assemble_token_features(t, emb)));
  LcOutput out;
  out.tokens.reserve(preds.size());
  for (const auto& p : preds) out.tokens.push_back(p.labels);
  for (std::size_t stage = 0; stage < lc.stages().size(); ++stage) {
    const CodeLabel label = lc.stages()[stage].label;
    for (const auto& s : t.sentences) {
      std::size_t k = s.begin;
      while (k < s.end) {
        if (!preds[k].labels.contains(label)) {
          ++k;
          continue;
        }
        std::size_t e = k;
        double votes = 0.0;
        while (e < s.end && preds[e].labels.contains(label)) votes += preds[e++].votes[stage];
        out.spans.push_back({doc.d->id,
                             {t.tokens[k].start, t.tokens[e - 1].end, label, source},
                             fold,
                             Stage::Lc,
                             votes / static_cast<double>(e - k)});
        k = e;
      }
    }
  }
  std::sort(out.spans.begin(), out.spans.end(), [](const PredictedSpan& a, const PredictedSpan& b) {
    return std::tie(a.span.start, a.span.end, a.span.label) < std::tie(b.span.start, b.span.end, b.span.label);
  });
  return out;
}

std::vector<SentenceRows> pnoc_rows(const EmbeddingModel& emb, const Doc& doc, const std::vector<LabelSet>* injected) {
  return assemble_token_features(*doc.t, emb, injected);
}

std::vector<PredictedSpan> predict_pnoc_doc(const CrfModel& crf, const EmbeddingModel& emb, const Doc& doc,
                                            const std::vector<LabelSet>* injected, const AnnotationSource& source,
                                            std::size_t fold) {
  const auto& t = *doc.t;
  const auto preds = crf.predict(pnoc_rows(emb, doc, injected));
  std::vector<std::string> tags;
  tags.reserve(t.tokens.size());
  std::unordered_map<std::size_t, double> confidence_at;  // token start -> sentence confidence
  for (std::size_t s = 0; s < preds.size(); ++s) {
    tags.insert(tags.end(), preds[s].tags.begin(), preds[s].tags.end());
    for (std::size_t k = t.sentences[s].begin; k < t.sentences[s].end; ++k) {
      confidence_at[t.tokens[k].start] = preds[s].confidence;
    }
  }
  std::vector<PredictedSpan> out;
  for (const auto& span : bio_to_spans(tags, t, source)) {
    out.push_back({doc.d->id, span, fold, Stage::Pnoc, confidence_at.at(span.start)});
  }
  return out;
}

std::vector<PredictedSpan> concat(const std::vector<PredictedSpan>* a, const std::vector<PredictedSpan>* b) {
  std::vector<PredictedSpan> out;
  if (a) out.insert(out.end(), a->begin(), a->end());
  if (b) out.insert(out.end(), b->begin(), b->end());
  return out;
}

DocFeatureVector osc_vector(const ModelBundle& b, const Doc& doc, const UpstreamView& view, std::size_t i) {
  const auto v = b.spec.variant;
  const auto injected = concat(needs_lc_upstream(v) ? &view.lc_spans[i] : nullptr,
                               needs_pnoc_upstream(v) ? &view.pnoc_spans[i] : nullptr);
  return assemble_doc_features(*doc.d, b.tfidf, osc_injected_labels(v), injected);
}

LcModel fit_lc(const Docs& train, const EmbeddingModel& emb, const LcConfig& config) {
  std::vector<TokenFeatureRow> rows;
  std::vector<LabelSet> labels;
  for (const auto& doc : train) {
    auto r = flat_rows(assemble_token_features(*doc.t, emb));
    auto l = gold_lc_tokens(doc);
    std::move(r.begin(), r.end(), std::back_inserter(rows));
    labels.insert(labels.end(), l.begin(), l.end());
  }
  return train_lc(rows, labels, TokenFeatureLayout{emb.dim(), {}}, config);
}

CrfModel fit_pnoc(const Docs& train, const EmbeddingModel& emb, const std::vector<std::vector<LabelSet>>* lc_tokens,
                  const std::vector<CodeLabel>& injected_labels, const CrfConfig& config, CrfTrainingReport* report) {
  std::vector<SentenceRows> sentences;
  std::vector<std::vector<std::string>> tags;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto rows = pnoc_rows(emb, train[i], lc_tokens ? &(*lc_tokens)[i] : nullptr);
    auto seq = split_by_sentence(gold_pnoc_tags(train[i]), *train[i].t);
    std::move(rows.begin(), rows.end(), std::back_inserter(sentences));
    std::move(seq.begin(), seq.end(), std::back_inserter(tags));
  }
  return train_pnoc(sentences, tags, TokenFeatureLayout{emb.dim(), injected_labels}, config, report);
}

// Gold codes of the documents as an upstream view.
UpstreamView gold_view(const Docs& docs) {
  UpstreamView v;
  for (const auto& doc : docs) {
    v.lc_tokens.push_back(gold_lc_tokens(doc));
    v.lc_spans.push_back(gold_spans(doc, LabelSet(kLinguisticLabels), Stage::Lc));
    v.pnoc_spans.push_back(gold_spans(doc, LabelSet(kSequenceLabels), Stage::Pnoc));
  }
  return v;
}

// Predictions of upstream models on `docs`. Only what `variant` consumes is
// filled in; PNOC consumes the LC predictions in C1.
UpstreamView predict_view(const Docs& docs, const EmbeddingModel& emb, const LcModel* lc, const CrfModel* pnoc,
                          CascadeVariant variant) {
  UpstreamView v;
  v.lc_tokens.resize(docs.size());
  v.lc_spans.resize(docs.size());
  v.pnoc_spans.resize(docs.size());
  const auto source = AnnotationSource::model(std::string(to_string(variant)));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (lc) {
      auto out = predict_lc_doc(*lc, emb, docs[i], source, 0);
      v.lc_tokens[i] = std::move(out.tokens);
      v.lc_spans[i] = std::move(out.spans);
    }
    if (pnoc) {
      const auto* injected = variant == CascadeVariant::C1 ? &v.lc_tokens[i] : nullptr;
      v.pnoc_spans[i] = predict_pnoc_doc(*pnoc, emb, docs[i], injected, source, 0);
    }
  }
  return v;
}

// Inner cross-validation: each inner fold is predicted by upstream models
// trained on the remaining training documents.
UpstreamView nested_view(const Docs& train, const EmbeddingModel& emb, const CascadeSpec& spec) {
  const std::size_t k = std::min(spec.nested_folds, train.size());
  if (k < 2) throw Error(ErrorKind::TooFewDescriptions, "nested policy needs at least 2 training descriptions");
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(spec.seed, 0x6e6573746564ULL));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> inner_fold(train.size());
  const std::size_t base = train.size() / k;
  const std::size_t extra = train.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t n = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < n; ++j) inner_fold[order[pos++]] = f;
  }

  const auto variant = spec.variant;
  UpstreamView view;
  view.lc_tokens.resize(train.size());
  view.lc_spans.resize(train.size());
  view.pnoc_spans.resize(train.size());
  for (std::size_t f = 0; f < k; ++f) {
    Docs inner_train;
    Docs inner_test;
    std::vector<std::size_t> test_index;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (inner_fold[i] == f) {
        inner_test.push_back(train[i]);
        test_index.push_back(i);
      } else {
        inner_train.push_back(train[i]);
      }
    }
    std::optional<LcModel> lc;
    std::optional<CrfModel> pnoc;
    if (needs_lc_upstream(variant)) lc = fit_lc(inner_train, emb, spec.lc);
    if (needs_pnoc_upstream(variant)) {
      std::optional<UpstreamView> inner_lc;
      if (variant == CascadeVariant::C1) inner_lc = predict_view(inner_train, emb, &*lc, nullptr, variant);
      pnoc = fit_pnoc(inner_train, emb, inner_lc ? &inner_lc->lc_tokens : nullptr, pnoc_injected_labels(variant),
                      spec.pnoc, nullptr);
    }
    auto part = predict_view(inner_test, emb, lc ? &*lc : nullptr, pnoc ? &*pnoc : nullptr, variant);
    for (std::size_t j = 0; j < test_index.size(); ++j) {
      view.lc_tokens[test_index[j]] = std::move(part.lc_tokens[j]);
      view.lc_spans[test_index[j]] = std::move(part.lc_spans[j]);
      view.pnoc_spans[test_index[j]] = std::move(part.pnoc_spans[j]);
    }
  }
  return view;
}

struct TrainingCapture {
  std::vector<std::vector<SentenceRows>> pnoc_rows;
  std::vector<DocFeatureVector> osc_vectors;
};

ModelBundle train_docs(const Docs& train, const CascadeSpec& spec, const std::string& where,
                       TrainingCapture* capture = nullptr) {
  if (train.empty()) throw Error(ErrorKind::EmptyTrainingSet, where + ": no training descriptions");
  ModelBundle b;
  b.spec = spec;
  b.training_size = train.size();
  {
    std::vector<std::string> ids;
    for (const auto& doc : train) ids.push_back(doc.d->id);
    std::sort(ids.begin(), ids.end());
    std::string joined;
    for (const auto& id : ids) joined += id + "\n";
    b.training_hash = sha256_hex(joined);
  }
  const auto variant = spec.variant;
  const auto tokens = token_lists(train);
  b.embeddings = in_stage(where + ", stage embeddings", [&] { return train_embeddings(tokens, spec.embeddings); });
  b.tfidf = in_stage(where + ", stage tfidf", [&] { return fit_tfidf(tokens); });
  b.lc = in_stage(where + ", stage lc", [&] { return fit_lc(train, b.embeddings, spec.lc); });

  // Upstream codes on the training documents for downstream training.
  UpstreamView view;
  const bool gold = spec.upstream_source == UpstreamSource::GoldOracle || spec.policy == UpstreamPolicy::Gold;
  if (gold) {
    view = gold_view(train);
  } else if (spec.policy == UpstreamPolicy::Nested && variant != CascadeVariant::Baseline) {
    view = in_stage(where + ", stage nested-upstream", [&] { return nested_view(train, b.embeddings, spec); });
  } else if (needs_lc_upstream(variant)) {
    view = predict_view(train, b.embeddings, &b.lc, nullptr, variant);
  }

  const auto pnoc_injected = pnoc_injected_labels(variant);
  const auto* injected_tokens = pnoc_injected.empty() ? nullptr : &view.lc_tokens;
  b.pnoc = in_stage(where + ", stage pnoc", [&] {
    return fit_pnoc(train, b.embeddings, injected_tokens, pnoc_injected, spec.pnoc, &b.pnoc_report);
  });
  if (!gold && spec.policy != UpstreamPolicy::Nested && needs_pnoc_upstream(variant)) {
    view.pnoc_spans.assign(train.size(), {});
    const auto source = AnnotationSource::model(std::string(to_string(variant)));
    for (std::size_t i = 0; i < train.size(); ++i) {
      view.pnoc_spans[i] =
          predict_pnoc_doc(b.pnoc, b.embeddings, train[i], injected_tokens ? &view.lc_tokens[i] : nullptr, source, 0);
    }
  }
  if (view.lc_spans.size() != train.size()) {
    view.lc_tokens.resize(train.size());
    view.lc_spans.resize(train.size());
  }
  if (view.pnoc_spans.size() != train.size()) view.pnoc_spans.resize(train.size());

  std::vector<DocFeatureVector> vectors;
  std::vector<LabelSet> labels;
  vectors.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    vectors.push_back(osc_vector(b, train[i], view, i));
    labels.push_back(gold_doc_labels(*train[i].d));
  }
  b.osc = in_stage(where + ", stage osc", [&] { return train_osc(vectors, labels, spec.osc); });

  if (capture) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      capture->pnoc_rows.push_back(pnoc_rows(b.embeddings, train[i], injected_tokens ? &view.lc_tokens[i] : nullptr));
    }
    capture->osc_vectors = std::move(vectors);
  }
  return b;
}

BundlePrediction predict_docs(const ModelBundle& b, const Docs& docs, std::size_t fold) {
  const auto variant = b.spec.variant;
  const bool oracle = b.spec.upstream_source == UpstreamSource::GoldOracle;
  const auto source = AnnotationSource::model(std::string(to_string(variant)));
  BundlePrediction out;
  for (const auto& doc : docs) {
    const Docs one{doc};
    auto lc = predict_lc_doc(b.lc, b.embeddings, doc, source, fold);
    const UpstreamView gold = oracle ? gold_view(one) : UpstreamView{};
    const auto& lc_tokens = oracle ? gold.lc_tokens[0] : lc.tokens;
    const auto* injected = variant == CascadeVariant::C1 ? &lc_tokens : nullptr;
    auto pnoc = predict_pnoc_doc(b.pnoc, b.embeddings, doc, injected, source, fold);

    UpstreamView view;
    view.lc_spans.push_back(oracle ? gold.lc_spans[0] : lc.spans);
    view.pnoc_spans.push_back(oracle ? gold.pnoc_spans[0] : pnoc);
    const auto x = osc_vector(b, doc, view, 0);
    const auto osc = b.osc.predict(x);

    out.spans.insert(out.spans.end(), lc.spans.begin(), lc.spans.end());
    out.spans.insert(out.spans.end(), pnoc.begin(), pnoc.end());
    const std::size_t len = doc.d->length();
    for (std::size_t i = 0; i < kDocumentLabels.size(); ++i) {
      if (osc.labels.contains(kDocumentLabels[i])) {
        out.spans.push_back({doc.d->id, {0, len, kDocumentLabels[i], source}, fold, Stage::Osc, logistic(osc.scores[i])});
      }
    }
    out.scores.push_back({doc.d->id, fold, osc.scores});
  }
  return out;
}

struct Prepared {
  std::vector<TokenizedDescription> tokenized;
  std::unordered_map<std::string_view, std::size_t> index;

  explicit Prepared(const Corpus& corpus) {
    tokenized.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      tokenized.push_back(in_stage("description '" + corpus[i].id + "'", [&] { return preprocess(corpus[i]); }));
      index.emplace(corpus[i].id, i);
    }
  }

  Docs docs(const Corpus& corpus, const std::vector<std::string>& ids) const {
    Docs out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      const auto i = index.at(id);
      out.push_back({&corpus[i], &tokenized[i]});
    }
    return out;
  }

  Docs all(const Corpus& corpus) const {
    Docs out;
    for (std::size_t i = 0; i < corpus.size(); ++i) out.push_back({&corpus[i], &tokenized[i]});
    return out;
  }
};

std::vector<std::string> training_ids_of(const FoldAssignment& folds, std::size_t fold) {
  std::vector<std::string> out;
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    if (f != fold) out.insert(out.end(), folds.folds[f].begin(), folds.folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct FoldResult {
  FoldProvenance provenance;
  ModelBundle bundle;
  BundlePrediction prediction;
};

FoldResult run_fold(const Corpus& corpus, const Prepared& prep, const CascadeSpec& spec, const FoldAssignment& folds,
                    std::size_t fold) {
  FoldResult r;
  r.provenance.fold = fold;
  r.provenance.training_ids = training_ids_of(folds, fold);
  r.provenance.test_ids = folds.folds[fold];
  const auto where = "fold " + std::to_string(fold);
  spdlog::info("{}: training on {} descriptions", where, r.provenance.training_ids.size());
  r.bundle = train_docs(prep.docs(corpus, r.provenance.training_ids), spec, where);
  r.provenance.degenerate_stages = r.bundle.degenerate_stages();
  r.provenance.pnoc = r.bundle.pnoc_report;
  r.prediction = in_stage(where + ", stage predict",
                          [&] { return predict_docs(r.bundle, prep.docs(corpus, r.provenance.test_ids), fold); });
  return r;
}

std::string to_jsonl(const std::vector<nlohmann::json>& rows) {
  std::string out;
  for (const auto& j : rows) {
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const DocScore& s) {
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t i = 0; i < kDocumentLabels.size(); ++i) scores[std::string(to_string(kDocumentLabels[i]))] = s.scores[i];
  return {{"id", s.description_id}, {"fold", s.fold}, {"scores", scores}};
}

DocScore doc_score_from_json(const nlohmann::json& j) {
  try {
    DocScore s;
    s.description_id = j.at("id").get<std::string>();
    s.fold = j.at("fold").get<std::size_t>();
    for (std::size_t i = 0; i < kDocumentLabels.size(); ++i) {
      s.scores[i] = j.at("scores").at(std::string(to_string(kDocumentLabels[i]))).get<double>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("score record: ") + e.what());
  }
}

ModelBundle train_bundle(const Corpus& training, const CascadeSpec& spec) {
  const Prepared prep(training);
  auto b = train_docs(prep.all(training), spec, "full corpus");
  b.training_hash = corpus_hash(training);
  return b;
}

BundlePrediction predict_with_bundle(const ModelBundle& bundle, const Corpus& corpus, std::size_t fold) {
  const Prepared prep(corpus);
  return predict_docs(bundle, prep.all(corpus), fold);
}

CascadeRun run_cascade(const Corpus& corpus, const CascadeSpec& spec, const FoldAssignment& folds) {
  validate_folds(folds, corpus);
  const Prepared prep(corpus);
  const std::size_t k = folds.folds.size();
  std::vector<FoldResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        results[f] = run_fold(corpus, prep, spec, folds, f);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(spec.threads, 1, k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CascadeRun run;
  run.spec = spec;
  run.folds = folds;
  run.corpus_hash = corpus_hash(corpus);
  for (auto& r : results) {
    run.provenance.push_back(std::move(r.provenance));
    run.bundles.push_back(std::move(r.bundle));
    std::move(r.prediction.spans.begin(), r.prediction.spans.end(), std::back_inserter(run.predictions));
    std::move(r.prediction.scores.begin(), r.prediction.scores.end(), std::back_inserter(run.scores));
  }
  return run;
}

DownstreamTrainingData downstream_training_data(const Corpus& corpus, const CascadeSpec& spec,
                                                const FoldAssignment& folds, std::size_t fold) {
  validate_folds(folds, corpus);
  if (fold >= folds.folds.size()) throw Error(ErrorKind::InvalidArgument, "no fold " + std::to_string(fold));
  const Prepared prep(corpus);
  DownstreamTrainingData out;
  out.ids = training_ids_of(folds, fold);
  TrainingCapture capture;
  (void)train_docs(prep.docs(corpus, out.ids), spec, "fold " + std::to_string(fold), &capture);
  out.pnoc_rows = std::move(capture.pnoc_rows);
  out.osc_vectors = std::move(capture.osc_vectors);
  return out;
}

std::vector<std::string> provenance_violations(const CascadeRun& run, const Corpus& corpus) {
  std::vector<std::string> out;
  std::map<std::string, std::size_t, std::less<>> test_fold;
  for (const auto& p : run.provenance) {
    for (const auto& id : p.test_ids) {
      if (!test_fold.emplace(id, p.fold).second) out.push_back(id + " is in more than one test fold");
    }
  }
  for (const auto& d : corpus) {
    if (!test_fold.contains(d.id)) out.push_back(d.id + " is in no test fold");
  }
  std::map<std::string, std::size_t, std::less<>> scored;
  for (const auto& s : run.scores) ++scored[s.description_id];
  for (const auto& d : corpus) {
    const auto it = scored.find(d.id);
    if (it == scored.end() || it->second != 1) out.push_back(d.id + " is not scored exactly once");
  }
  for (const auto& p : run.predictions) {
    if (p.fold >= run.provenance.size()) {
      out.push_back(p.description_id + " predicted by unknown fold " + std::to_string(p.fold));
      continue;
    }
    const auto& prov = run.provenance[p.fold];
    if (std::binary_search(prov.training_ids.begin(), prov.training_ids.end(), p.description_id)) {
      out.push_back(p.description_id + " predicted by fold " + std::to_string(p.fold) + " which trained on it");
    }
    const auto it = test_fold.find(p.description_id);
    if (it == test_fold.end() || it->second != p.fold) {
      out.push_back(p.description_id + " predicted outside its test fold");
    }
  }
  return out;
}

nlohmann::json CascadeRun::manifest() const {
  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& p : provenance) {
    folds_json.push_back({{"fold", p.fold},
                          {"training_ids", p.training_ids},
                          {"test_size", p.test_ids.size()},
                          {"degenerate_stages", p.degenerate_stages},
                          {"pnoc", {{"epochs", p.pnoc.epochs}, {"updates", p.pnoc.updates}, {"converged", p.pnoc.converged}}}});
  }
  return {
      {"spec", to_json(spec)},
      {"seeds", {{"folds", folds.seed}, {"cascade", spec.seed}}},
      {"k", folds.k},
      {"upstream_policy", to_string(spec.policy)},
      {"corpus_hash", corpus_hash},
      {"folds", folds_json},
  };
}

std::string CascadeRun::predictions_jsonl() const {
  std::vector<nlohmann::json> rows;
  rows.reserve(predictions.size());
  for (const auto& p : predictions) rows.push_back(to_json(p));
  return to_jsonl(rows);
}

std::string CascadeRun::scores_jsonl() const {
  std::vector<nlohmann::json> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) rows.push_back(to_json(s));
  return to_jsonl(rows);
}

CascadeRun load_run(const std::filesystem::path& dir) {
  CascadeRun run;
  const auto parse = [&](const std::string& name) {
    try {
      return nlohmann::json::parse(read_file(dir / name));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::FormatError, name + ": " + e.what());
    }
  };
  const auto manifest = parse("manifest.json");
  try {
    run.spec = cascade_spec_from_json(manifest.at("spec"));
    run.corpus_hash = manifest.at("corpus_hash").get<std::string>();
    for (const auto& f : manifest.at("folds")) {
      FoldProvenance p;
      p.fold = f.at("fold").get<std::size_t>();
      p.training_ids = f.at("training_ids").get<std::vector<std::string>>();
      p.degenerate_stages = f.value("degenerate_stages", std::vector<std::string>{});
      run.provenance.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("manifest.json: ") + e.what());
  }
  run.folds = folds_from_json(parse("folds.json"));
  for (auto& p : run.provenance) {
    if (p.fold < run.folds.folds.size()) p.test_ids = run.folds.folds[p.fold];
  }
  const auto each_line = [&](const std::string& name, auto&& fn) {
    const auto text = read_file(dir / name);
    std::size_t pos = 0;
    std::size_t line = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      ++line;
      const std::string_view row(text.data() + pos, nl - pos);
      pos = nl + 1;
      if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      try {
        fn(nlohmann::json::parse(row));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, name + " line " + std::to_string(line) + ": " + e.what());
      } catch (const Error& e) {
        throw Error(e.kind(), name + " line " + std::to_string(line) + ": " + e.message());
      }
    }
  };
  each_line("predictions.jsonl", [&](const nlohmann::json& j) { run.predictions.push_back(predicted_span_from_json(j)); });
  if (std::filesystem::exists(dir / "scores.jsonl")) {
    each_line("scores.jsonl", [&](const nlohmann::json& j) { run.scores.push_back(doc_score_from_json(j)); });
  }
  return run;
}

LabelSet stage_labels(Stage stage) {
  switch (stage) {
    case Stage::Lc:
      return LabelSet(kLinguisticLabels);
    case Stage::Pnoc:
      return LabelSet(kSequenceLabels);
    case Stage::Osc:
      return LabelSet(kDocumentLabels);
  }
  return {};
}

ComparisonTable compare_runs(std::span<const CascadeRun> runs, const Corpus& gold) {
  const auto hash = corpus_hash(gold);
  const auto reference = annotations_of(gold);
  ComparisonTable table;
  for (const auto& run : runs) {
    if (run.corpus_hash != hash) {
      throw Error(ErrorKind::CorpusMismatch, "run '" + std::string(to_string(run.spec.variant)) +
                                                 "' was produced on corpus " + run.corpus_hash + ", not " + hash);
    }
    const auto predicted = annotations_of(run.predictions, gold);
    for (auto stage : {Stage::Lc, Stage::Pnoc, Stage::Osc}) {
      ComparisonRow row;
      row.variant = std::string(to_string(run.spec.variant));
      row.stage = stage;
      row.report = score(predicted, reference, stage_labels(stage));
      row.macro = row.report.macro;
      row.micro = row.report.micro;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

nlohmann::json ComparisonTable::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"variant", r.variant},
                   {"classifier", to_string(r.stage)},
                   {"macro", {{"precision", r.macro.precision}, {"recall", r.macro.recall}, {"f1", r.macro.f1}}},
                   {"micro", {{"precision", r.micro.precision}, {"recall", r.micro.recall}, {"f1", r.micro.f1}}},
                   {"per_label", r.report.to_json()}});
  }
  return out;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string ComparisonTable::to_markdown() const {
  std::string out =
      "| variant | classifier | macro P | macro R | macro F1 | micro P | micro R | micro F1 |\n"
      "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.variant + " | " + std::string(to_string(r.stage)) + " | " + fixed3(r.macro.precision) + " | " +
           fixed3(r.macro.recall) + " | " + fixed3(r.macro.f1) + " | " + fixed3(r.micro.precision) + " | " +
           fixed3(r.micro.recall) + " | " + fixed3(r.micro.f1) + " |\n";
  }
  return out;
}

std::string ComparisonTable::to_csv() const {
  std::string out = "variant,classifier,macro_precision,macro_recall,macro_f1,micro_precision,micro_recall,micro_f1\n";
  for (const auto& r : rows) {
    out += r.variant + "," + std::string(to_string(r.stage)) + "," + fixed3(r.macro.precision) + "," +
           fixed3(r.macro.recall) + "," + fixed3(r.macro.f1) + "," + fixed3(r.micro.precision) + "," +
           fixed3(r.micro.recall) + "," + fixed3(r.micro.f1) + "\n";
  }
  return out;
}

}  // namespace biaslens
