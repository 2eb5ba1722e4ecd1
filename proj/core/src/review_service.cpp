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
#include "biaslens/review_service.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "biaslens/document_classifier.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

struct ReviewService::Server {
  httplib::Server http;
};

namespace {

HttpResponse json_response(int status, const nlohmann::json& body) {
  return {status, body.dump() + "\n", "application/json", {}};
}

HttpResponse error_response(int status, std::string_view message) {
  return json_response(status, {{"error", message}});
}

std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

nlohmann::json span_json(const AnnotationSpan& s) {
  return {{"start", s.start}, {"end", s.end}, {"label", to_string(s.label)}, {"source", s.source.to_string()}};
}

}  // namespace

ReviewService::ReviewService(Corpus corpus, std::optional<CascadeRun> run, const std::filesystem::path& decision_log,
                             ReviewServiceOptions options)
    : corpus_(std::move(corpus)), run_(std::move(run)), options_(std::move(options)), log_(decision_log) {
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    index_.emplace(corpus_[i].id, i);
    fonds_.emplace(corpus_[i].fonds_id, corpus_[i].fonds_title);
  }
  if (!run_) return;
  if (run_->corpus_hash != corpus_hash(corpus_)) {
    throw Error(ErrorKind::CorpusMismatch, "the run was not produced on this corpus");
  }
  for (const auto& p : run_->predictions) {
    if (!index_.contains(p.description_id)) {
      throw Error(ErrorKind::CorpusMismatch, "prediction for unknown description '" + p.description_id + "'");
    }
    model_spans_[p.description_id].push_back(&p);
  }
  std::map<std::string, const DocScore*, std::less<>> scores;
  for (const auto& s : run_->scores) scores[s.description_id] = &s;

  for (const auto& [id, spans] : model_spans_) {
    QueueItem item;
    item.description_id = id;
    item.fonds_id = corpus_[index_.at(id)].fonds_id;
    item.score = -std::numeric_limits<double>::infinity();
    if (auto it = scores.find(id); it != scores.end()) {
      item.score = std::max(it->second->scores[0], it->second->scores[1]);
    }
    item.confidence = logistic(item.score);
    std::map<CodeLabel, QueueFlag> flags;
    for (const auto* p : spans) {
      auto& f = flags[p->span.label];
      f.label = p->span.label;
      f.stage = p->stage;
      ++f.spans;
      f.confidence = std::max(f.confidence, p->confidence);
    }
    for (auto& [label, f] : flags) item.flags.push_back(f);
    queue_.push_back(std::move(item));
  }
  std::stable_sort(queue_.begin(), queue_.end(), [](const QueueItem& a, const QueueItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.description_id < b.description_id;
  });
}

ReviewService::~ReviewService() { stop(); }

HttpResponse ReviewService::get_queue(const QueryParams& params) const {
  if (!run_) return error_response(503, "no cascade run loaded");
  std::optional<CodeLabel> label;
  if (auto it = params.find("label"); it != params.end() && !it->second.empty()) {
    label = parse_label(it->second);
    if (!label) return error_response(400, "unknown label '" + it->second + "'");
  }
  std::string fonds;
  if (auto it = params.find("fonds"); it != params.end() && !it->second.empty()) {
    if (!fonds_.contains(it->second)) return error_response(400, "unknown fonds '" + it->second + "'");
    fonds = it->second;
  }
  std::string status = "all";
  if (auto it = params.find("status"); it != params.end() && !it->second.empty()) {
    status = it->second;
    if (status != "all" && status != "reviewed" && status != "unreviewed") {
      return error_response(400, "unknown status '" + status + "'");
    }
  }
  std::size_t limit = options_.default_limit;
  std::size_t offset = 0;
  if (auto it = params.find("limit"); it != params.end()) {
    const auto v = parse_count(it->second);
    if (!v || *v == 0 || *v > options_.max_limit) return error_response(400, "limit must be in 1.." + std::to_string(options_.max_limit));
    limit = *v;
  }
  if (auto it = params.find("offset"); it != params.end()) {
    const auto v = parse_count(it->second);
    if (!v) return error_response(400, "offset must be a non-negative integer");
    offset = *v;
  }

  std::vector<const QueueItem*> matching;
  std::size_t reviewed_count = 0;
  for (const auto& item : queue_) {
    if (label && std::none_of(item.flags.begin(), item.flags.end(), [&](const QueueFlag& f) { return f.label == *label; })) {
      continue;
    }
    if (!fonds.empty() && item.fonds_id != fonds) continue;
    const bool reviewed = log_.reviewed(item.description_id);
    if (status == "reviewed" && !reviewed) continue;
    if (status == "unreviewed" && reviewed) continue;
    reviewed_count += reviewed ? 1 : 0;
    matching.push_back(&item);
  }
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = offset; i < matching.size() && i < offset + limit; ++i) {
    const auto& item = *matching[i];
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& f : item.flags) {
      flags.push_back({{"label", to_string(f.label)},
                       {"category", to_string(category_of(f.label))},
                       {"stage", to_string(f.stage)},
                       {"spans", f.spans},
                       {"confidence", f.confidence}});
    }
    items.push_back({{"id", item.description_id},
                     {"fonds_id", item.fonds_id},
                     {"fonds_title", fonds_.at(item.fonds_id)},
                     {"confidence", item.confidence},
                     {"score", item.score},
                     {"status", log_.reviewed(item.description_id) ? "reviewed" : "unreviewed"},
                     {"flags", flags}});
  }
  return json_response(200, {{"total", matching.size()},
                             {"reviewed", reviewed_count},
                             {"offset", offset},
                             {"limit", limit},
                             {"items", items}});
}

HttpResponse ReviewService::get_description(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return error_response(404, "unknown description '" + std::string(id) + "'");
  const auto& d = corpus_[it->second];
  nlohmann::json gold = nlohmann::json::array();
  for (const auto& a : d.annotations) gold.push_back(span_json(a));
  nlohmann::json model = nlohmann::json::array();
  if (auto m = model_spans_.find(id); m != model_spans_.end()) {
    for (const auto* p : m->second) {
      auto j = span_json(p->span);
      j["fold"] = p->fold;
      j["stage"] = to_string(p->stage);
      j["confidence"] = p->confidence;
      model.push_back(std::move(j));
    }
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto& dec : log_.for_description(id)) {
    auto j = to_json(dec);
    j.erase("fingerprint");
    history.push_back(std::move(j));
  }
  return json_response(200, {{"id", d.id},
                             {"fonds_id", d.fonds_id},
                             {"fonds_title", d.fonds_title},
                             {"field", to_string(d.field)},
                             {"text", d.text},
                             {"length", d.length()},
                             {"languages", d.languages},
                             {"gold", gold},
                             {"model", model},
                             {"decisions", history}});
}

HttpResponse ReviewService::post_decision(std::string_view body, std::string_view idempotency_key,
                                          std::string_view reviewer_header) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return error_response(400, "body is not JSON");
  }
  if (!j.is_object()) return error_response(400, "body must be a JSON object");

  ReviewDecision d;
  try {
    d.description_id = j.at("description_id").get<std::string>();
    const auto verdict_name = j.at("verdict").get<std::string>();
    const auto verdict = parse_verdict(verdict_name);
    if (!verdict) return error_response(422, "verdict must be accept, reject or unsure");
    d.verdict = *verdict;
    const auto label = parse_label(j.at("label").get<std::string>());
    if (!label) return error_response(422, "unknown label");
    d.label = *label;
    d.note = j.value("note", std::string());
    d.reviewer = j.value("reviewer", std::string(reviewer_header));
    if (j.contains("start") != j.contains("end")) return error_response(422, "start and end go together");
    d.whole_description = !j.contains("start");
    if (!d.whole_description) {
      d.start = j.at("start").get<std::size_t>();
      d.end = j.at("end").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    return error_response(422, std::string("invalid decision: ") + e.what());
  }
  if (d.reviewer.empty()) return error_response(422, "reviewer required (body field or X-Reviewer header)");
  if (d.reviewer.find_first_of(" \t\n") != std::string::npos) return error_response(422, "reviewer must not contain spaces");

  const auto it = index_.find(d.description_id);
  if (it == index_.end()) return error_response(404, "unknown description '" + d.description_id + "'");
  const auto& desc = corpus_[it->second];
  if (d.whole_description) {
    d.start = 0;
    d.end = desc.length();
  } else {
    bool known = std::any_of(desc.annotations.begin(), desc.annotations.end(), [&](const AnnotationSpan& a) {
      return a.start == d.start && a.end == d.end && a.label == d.label;
    });
    if (auto m = model_spans_.find(d.description_id); !known && m != model_spans_.end()) {
      known = std::any_of(m->second.begin(), m->second.end(), [&](const PredictedSpan* p) {
        return p->span.start == d.start && p->span.end == d.end && p->span.label == d.label;
      });
    }
    if (!known) return error_response(404, "no such span on '" + d.description_id + "'");
  }
  d.idempotency_key = std::string(idempotency_key);
  d.fingerprint = nlohmann::json{{"description_id", d.description_id},
                                 {"start", d.start},
                                 {"end", d.end},
                                 {"label", to_string(d.label)},
                                 {"scope", d.whole_description ? "description" : "span"},
                                 {"verdict", to_string(d.verdict)},
                                 {"note", d.note},
                                 {"reviewer", d.reviewer}}
                      .dump();

  AppendResult result;
  try {
    result = log_.append(std::move(d));
  } catch (const Error& e) {
    return error_response(500, e.what());
  }
  auto out = to_json(result.decision);
  out.erase("fingerprint");
  switch (result.status) {
    case AppendStatus::KeyConflict:
      return error_response(409, "idempotency key already used with a different body");
    case AppendStatus::Replayed: {
      auto r = json_response(201, out);
      r.headers["Idempotent-Replayed"] = "true";
      return r;
    }
    case AppendStatus::Created:
      break;
  }
  return json_response(201, out);
}

HttpResponse ReviewService::get_export(const QueryParams& params) const {
  if (auto it = params.find("policy"); it != params.end() && it->second != "latest-accepted") {
    return error_response(400, "unknown export policy '" + it->second + "'");
  }
  return {200, serialize_corpus(export_latest_accepted(corpus_, log_.all())), "application/x-ndjson", {}};
}

HttpResponse ReviewService::get_health() const {
  return json_response(200, {{"status", "ok"},
                             {"run_loaded", run_.has_value()},
                             {"descriptions", corpus_.size()},
                             {"queue", queue_.size()},
                             {"decisions", log_.size()}});
}

namespace {

void install_routes(httplib::Server& http, ReviewService& svc) {
  const auto send = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  const auto params_of = [](const httplib::Request& req) {
    QueryParams p;
    for (const auto& [k, v] : req.params) p.emplace(k, v);
    return p;
  };
  http.Get("/health", [&svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc.get_health()); });
  http.Get("/queue", [&svc, send, params_of](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_queue(params_of(req)));
  });
  http.Get(R"(/descriptions/(.+))", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_description(req.matches[1].str()));
  });
  http.Post("/decisions", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.post_decision(req.body, req.get_header_value("Idempotency-Key"), req.get_header_value("X-Reviewer")));
  });
  http.Get("/export", [&svc, send, params_of](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_export(params_of(req)));
  });
  http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

}  // namespace

bool ReviewService::listen(const std::string& host, int port) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    install_routes(server_->http, *this);
    if (!options_.ui_dir.empty()) server_->http.set_mount_point("/ui", options_.ui_dir.string());
  }
  return server_->http.listen(host, port);
}

int ReviewService::bind_any_port(const std::string& host) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    install_routes(server_->http, *this);
    if (!options_.ui_dir.empty()) server_->http.set_mount_point("/ui", options_.ui_dir.string());
  }
  return server_->http.bind_to_any_port(host);
}

bool ReviewService::listen_after_bind() { return server_ && server_->http.listen_after_bind(); }

void ReviewService::stop() {
  if (server_) server_->http.stop();
}

Corpus export_latest_accepted(const Corpus& corpus, const std::vector<ReviewDecision>& decisions) {
  std::map<std::tuple<std::string_view, std::size_t, std::size_t, CodeLabel>, const ReviewDecision*> latest;
  for (const auto& d : decisions) {
    auto& slot = latest[d.target()];
    if (!slot || slot->sequence < d.sequence) slot = &d;
  }
  std::map<std::string_view, std::vector<AnnotationSpan>> accepted;
  for (const auto& [target, d] : latest) {
    if (d->verdict != Verdict::Accept) continue;
    accepted[d->description_id].push_back({d->start, d->end, d->label, AnnotationSource::coder(d->reviewer)});
  }
  Corpus out;
  for (const auto& desc : corpus) {
    const auto it = accepted.find(desc.id);
    if (it == accepted.end()) continue;
    Description rec = desc;
    rec.annotations = it->second;
    out.push_back(std::move(rec));
  }
  return out;
}

Corpus merge_augmentation(Corpus corpus, const Corpus& augmentation) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus[i].id, i);
  for (const auto& rec : augmentation) {
    const auto it = index.find(rec.id);
    if (it == index.end()) throw Error(ErrorKind::CorpusMismatch, "augmentation for unknown description '" + rec.id + "'");
    auto& d = corpus[it->second];
    if (d.text != rec.text) throw Error(ErrorKind::CorpusMismatch, "text of '" + rec.id + "' differs from the corpus");
    for (const auto& span : rec.annotations) {
      const bool present = std::any_of(d.annotations.begin(), d.annotations.end(), [&](const AnnotationSpan& a) {
        return a.start == span.start && a.end == span.end && a.label == span.label;
      });
      if (!present) d.annotations.push_back(span);
    }
  }
  return corpus;
}

}  // namespace biaslens
