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
#include "commands.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include <spdlog/spdlog.h>

#include "biaslens/cascade.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/dashboard.hpp"
#include "biaslens/decision_log.hpp"
#include "biaslens/error.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/folds.hpp"
#include "biaslens/model_bundle.hpp"
#include "biaslens/output_dir.hpp"
#include "biaslens/review_service.hpp"
#include "biaslens/run_config.hpp"
#include "biaslens/synthetic.hpp"

namespace biaslens::cli {

namespace fs = std::filesystem;

namespace {

RunConfig config_of(const std::string& command, const Options& o) {
  RunConfig c;
  c.command = command;
  c.corpus = o.corpus;
  c.out = o.out;
  c.seed = o.seed;
  c.folds = o.folds;
  c.top_n = o.top_n;
  c.threads = o.threads;
  c.strip_field_prefix = o.strip_field_prefix;
  c.cascade.variant = parse_variant(o.variant);
  c.cascade.policy = parse_policy(o.policy);
  c.review.listen = o.listen;
  c.review.decision_log = o.decisions;
  c.review.run_dir = o.run;
  c.review.ui_dir = o.ui_dir;
  c.resolve();
  return c;
}

Corpus read_corpus(const std::string& path, const Options& o) {
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "--corpus is required");
  LoadOptions opts;
  opts.strip_field_prefix = o.strip_field_prefix;
  return load_corpus(path, opts);
}

void require_out(const Options& o) {
  if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");
}

std::string jsonl(const std::vector<PredictedSpan>& spans) {
  std::string out;
  for (const auto& s : spans) out += to_json(s).dump() + "\n";
  return out;
}

std::string jsonl(const std::vector<DocScore>& scores) {
  std::string out;
  for (const auto& s : scores) out += to_json(s).dump() + "\n";
  return out;
}

LabelSet labels_present(const CorpusAnnotations& a, LabelSet into = {}) {
  for (const auto& [id, spans] : a) {
    for (const auto& s : spans) into.insert(s.label);
  }
  return into;
}

// A predictions file holds PredictedSpan records; a corpus file holds
// descriptions. The first record decides.
bool is_corpus_file(const std::string& path) {
  const auto text = read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view row(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      return nlohmann::json::parse(row).contains("text");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedRecord, path + " line 1: " + e.what());
    }
  }
  return true;
}

std::vector<PredictedSpan> read_predictions(const std::string& path) {
  std::vector<PredictedSpan> out;
  const auto text = read_file(path);
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
      out.push_back(predicted_span_from_json(nlohmann::json::parse(row)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedRecord, path + " line " + std::to_string(line) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), path + " line " + std::to_string(line) + ": " + e.message());
    }
  }
  return out;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--listen must be host:port");
  try {
    return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad port in --listen '" + listen + "'");
  }
}

}  // namespace

int embed(const Options& o) {
  require_out(o);
  const auto config = config_of("embed", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto model = train_embeddings(corpus, config.cascade.embeddings);
  OutputDir out(o.out);
  out.write("embeddings.bin", model.serialize());
  out.write("config.json", to_json(config).dump(2) + "\n");
  out.commit();
  spdlog::info("{} words, {} subword buckets", model.vocab_size(), model.trained_bucket_count());
  return 0;
}

int train(const Options& o) {
  require_out(o);
  const auto config = config_of("train", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto bundle = train_bundle(corpus, config.cascade);
  OutputDir out(o.out);
  for (const auto& [name, bytes] : bundle_files(bundle)) out.write(name, bytes);
  out.write("config.json", to_json(config).dump(2) + "\n");
  out.commit();
  for (const auto& s : bundle.degenerate_stages()) spdlog::warn("degenerate stage: {}", s);
  return 0;
}

int predict(const Options& o) {
  require_out(o);
  if (o.model.empty()) throw Error(ErrorKind::InvalidArgument, "--model is required");
  const auto config = config_of("predict", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto bundle = load_bundle(o.model);
  const auto pred = predict_with_bundle(bundle, corpus);
  OutputDir out(o.out);
  out.write("predictions.jsonl", jsonl(pred.spans));
  out.write("scores.jsonl", jsonl(pred.scores));
  out.write("config.json", to_json(config).dump(2) + "\n");
  out.commit();
  return 0;
}

int crossval(const Options& o) {
  require_out(o);
  const auto config = config_of("crossval", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto folds = make_folds(corpus, o.folds, o.seed);
  const auto run = run_cascade(corpus, config.cascade, folds);
  const auto violations = provenance_violations(run, corpus);
  if (!violations.empty()) throw Error(ErrorKind::InvalidArgument, "provenance check failed: " + violations.front());

  const auto report = score(annotations_of(run.predictions, corpus), annotations_of(corpus), LabelSet(kAllLabels));
  const std::vector<CascadeRun> runs{run};
  const auto table = compare_runs(runs, corpus);

  OutputDir out(o.out);
  out.write("manifest.json", run.manifest().dump(2) + "\n");
  out.write("folds.json", to_json(folds).dump(2) + "\n");
  out.write("predictions.jsonl", run.predictions_jsonl());
  out.write("scores.jsonl", run.scores_jsonl());
  out.write("metrics.json", report.to_json().dump(2) + "\n");
  out.write("comparison.json", table.to_json().dump(2) + "\n");
  out.write("comparison.md", table.to_markdown());
  out.write("config.json", to_json(config).dump(2) + "\n");
  if (o.save_models) {
    for (std::size_t f = 0; f < run.bundles.size(); ++f) {
      for (const auto& [name, bytes] : bundle_files(run.bundles[f])) {
        out.write(fs::path("models") / ("fold-" + std::to_string(f)) / name, bytes);
      }
    }
  }
  out.commit();
  std::cout << table.to_markdown();
  return 0;
}

int evaluate(const Options& o) {
  if (o.files.size() != 2) throw Error(ErrorKind::InvalidArgument, "evaluate takes PREDICTIONS GOLD");
  const auto gold = read_corpus(o.files[1], o);
  const auto reference = annotations_of(gold);
  CorpusAnnotations predicted;
  if (is_corpus_file(o.files[0])) {
    predicted = annotations_of(read_corpus(o.files[0], o));
  } else {
    predicted = annotations_of(read_predictions(o.files[0]), gold);
  }
  const auto labels = labels_present(predicted, labels_present(reference));
  const auto report = score(predicted, reference, labels);
  std::cout << report.to_json().dump(2) << "\n";
  if (!o.out.empty()) {
    auto config = config_of("evaluate", o);
    config.corpus = o.files[1];
    OutputDir out(o.out);
    out.write("metrics.json", report.to_json().dump(2) + "\n");
    out.write("config.json", to_json(config).dump(2) + "\n");
    out.commit();
  }
  return 0;
}

int iaa(const Options& o) {
  if (o.files.size() < 2 && o.reference.empty()) {
    throw Error(ErrorKind::TooFewAnnotators, "iaa needs at least two annotation files");
  }
  std::map<std::string, CorpusAnnotations> coders;
  LabelSet labels;
  for (std::size_t i = 0; i < o.files.size(); ++i) {
    auto ann = annotations_of(read_corpus(o.files[i], o));
    labels = labels_present(ann, labels);
    std::string name = fs::path(o.files[i]).stem().string();
    if (coders.contains(name)) name += "#" + std::to_string(i);
    coders.emplace(std::move(name), std::move(ann));
  }
  nlohmann::json result;
  if (o.files.size() >= 2) result["pairwise"] = pairwise_iaa(coders, labels).to_json();
  if (!o.reference.empty()) {
    const auto reference = annotations_of(read_corpus(o.reference, o));
    result["vs_reference"] = coders_vs_reference(coders, reference, labels_present(reference, labels)).to_json();
  }
  std::cout << result.dump(2) << "\n";
  if (!o.out.empty()) {
    OutputDir out(o.out);
    out.write("iaa.json", result.dump(2) + "\n");
    out.write("config.json", to_json(config_of("iaa", o)).dump(2) + "\n");
    out.commit();
  }
  return 0;
}

int dashboard(const Options& o) {
  require_out(o);
  if (o.run.empty()) throw Error(ErrorKind::InvalidArgument, "--run is required");
  const auto config = config_of("dashboard", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto run = load_run(o.run);
  if (run.corpus_hash != corpus_hash(corpus)) throw Error(ErrorKind::CorpusMismatch, "the run was not produced on this corpus");
  const bool has_gold = std::any_of(corpus.begin(), corpus.end(), [](const Description& d) { return !d.annotations.empty(); });
  const auto data = build_dashboard(run.predictions, corpus, o.top_n, has_gold ? &corpus : nullptr);
  OutputDir out(o.out);
  for (const auto& [name, bytes] : render(data)) out.write(fs::path("dashboard") / name, bytes);
  out.write("config.json", to_json(config).dump(2) + "\n");
  out.commit();
  return 0;
}

int serve(const Options& o) {
  require_out(o);
  // Blocked before any thread starts so every thread inherits the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const auto [host, port] = split_listen(o.listen);
  auto config = config_of("serve", o);
  auto corpus = read_corpus(o.corpus, o);
  std::optional<CascadeRun> run;
  if (!o.run.empty()) run = load_run(o.run);
  const fs::path log = o.decisions.empty() ? fs::path(o.out) / "decisions.jsonl" : fs::path(o.decisions);
  config.review.decision_log = log.string();
  write_file_atomic(fs::path(o.out) / "config.json", to_json(config).dump(2) + "\n");

  ReviewServiceOptions opts;
  opts.ui_dir = o.ui_dir;
  ReviewService service(std::move(corpus), std::move(run), log, opts);

  std::atomic<bool> signalled{false};
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (sig == SIGUSR1) return;
    signalled = true;
    spdlog::info("signal {}; stopping", sig);
    service.stop();
  });
  // SIGUSR1 only wakes the waiter when the server stopped on its own.
  const auto release_waiter = [&] {
    if (!signalled) pthread_kill(waiter.native_handle(), SIGUSR1);
  };

  int bound = port;
  if (port == 0) {
    bound = service.bind_any_port(host);
    if (bound < 0) {
      release_waiter();
      throw Error(ErrorKind::IoError, "cannot bind " + host);
    }
  }
  std::cout << "listening on " << host << ":" << bound << std::endl;
  const bool ok = port == 0 ? service.listen_after_bind() : service.listen(host, port);
  release_waiter();
  if (!ok) throw Error(ErrorKind::IoError, "cannot listen on " + o.listen);
  return 0;
}

int review_export(const Options& o) {
  require_out(o);
  if (o.decisions.empty()) throw Error(ErrorKind::InvalidArgument, "--decisions is required");
  const auto config = config_of("review-export", o);
  const auto corpus = read_corpus(o.corpus, o);
  const auto augmentation = export_latest_accepted(corpus, read_decision_log(o.decisions));
  const auto merged = merge_augmentation(corpus, augmentation);
  OutputDir out(o.out);
  out.write("augmentation.jsonl", serialize_corpus(augmentation));
  out.write("corpus.jsonl", serialize_corpus(merged));
  out.write("config.json", to_json(config).dump(2) + "\n");
  out.commit();
  spdlog::info("{} description(s) augmented", augmentation.size());
  return 0;
}

int synth(const Options& o) {
  require_out(o);
  SyntheticOptions opts;
  opts.descriptions = o.descriptions;
  opts.seed = o.seed;
  OutputDir out(o.out);
  out.write("corpus.jsonl", serialize_corpus(synthetic_corpus(opts)));
  out.write("config.json", to_json(config_of("synth", o)).dump(2) + "\n");
  out.commit();
  return 0;
}

}  // namespace biaslens::cli
