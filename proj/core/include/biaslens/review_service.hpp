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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/cascade.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/decision_log.hpp"

namespace biaslens {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

struct QueueFlag {
  CodeLabel label = CodeLabel::GenderedPronoun;
  Stage stage = Stage::Lc;
  std::size_t spans = 0;
  double confidence = 0.0;
};

/// A description with at least one model span.
struct QueueItem {
  std::string description_id;
  std::string fonds_id;
  /// Ranking key: logistic of the larger OSC decision score.
  double confidence = 0.0;
  double score = 0.0;
  std::vector<QueueFlag> flags;
};

struct ReviewServiceOptions {
  std::size_t default_limit = 50;
  std::size_t max_limit = 500;
  /// Directory of static UI assets served under /ui, if any.
  std::filesystem::path ui_dir;
};

/// Triage workflow over a loaded cascade run. Each handler maps one HTTP
/// endpoint and can be called directly.
class ReviewService {
 public:
  ReviewService(Corpus corpus, std::optional<CascadeRun> run, const std::filesystem::path& decision_log,
                ReviewServiceOptions options = {});
  ~ReviewService();

  /// GET /queue?label=&fonds=&status=&limit=&offset=
  HttpResponse get_queue(const QueryParams& params) const;
  /// GET /descriptions/{id}
  HttpResponse get_description(std::string_view id) const;
  /// POST /decisions
  HttpResponse post_decision(std::string_view body, std::string_view idempotency_key,
                             std::string_view reviewer_header = {});
  /// GET /export?policy=latest-accepted
  HttpResponse get_export(const QueryParams& params) const;
  /// GET /health
  HttpResponse get_health() const;

  /// The full queue in ranking order, unfiltered.
  const std::vector<QueueItem>& queue() const { return queue_; }
  const DecisionLog& decisions() const { return log_; }

  /// Blocks serving HTTP until stop() is called. Returns false if the
  /// address could not be bound.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it, or -1; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();

 private:
  struct Server;

  Corpus corpus_;
  std::optional<CascadeRun> run_;
  ReviewServiceOptions options_;
  DecisionLog log_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::vector<const PredictedSpan*>, std::less<>> model_spans_;
  std::map<std::string, std::string, std::less<>> fonds_;
  std::vector<QueueItem> queue_;
  std::unique_ptr<Server> server_;
};

/// Augmentation records from the log: for every target whose latest
/// decision is an accept, the span with source coder:<reviewer>. One
/// record per description holding accepted spans, in corpus order.
Corpus export_latest_accepted(const Corpus& corpus, const std::vector<ReviewDecision>& decisions);

/// Adds the augmentation spans to matching corpus descriptions, skipping
/// spans already present with the same offsets and label.
Corpus merge_augmentation(Corpus corpus, const Corpus& augmentation);

}  // namespace biaslens
