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

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/labels.hpp"

namespace biaslens {

enum class Verdict : std::uint8_t { Accept, Reject, Unsure };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

/// A cataloger's verdict on one span, or on a whole description when
/// `whole_description` is set (then start = 0 and end = text length).
struct ReviewDecision {
  std::uint64_t sequence = 0;
  std::string id;
  std::string description_id;
  std::size_t start = 0;
  std::size_t end = 0;
  CodeLabel label = CodeLabel::GenderedPronoun;
  bool whole_description = false;
  Verdict verdict = Verdict::Unsure;
  std::string note;
  std::string reviewer;
  std::string timestamp;
  std::string idempotency_key;
  /// Canonical form of the request, compared on idempotent replays.
  std::string fingerprint;

  /// Decisions with equal targets supersede each other.
  std::tuple<std::string_view, std::size_t, std::size_t, CodeLabel> target() const {
    return {description_id, start, end, label};
  }
};

nlohmann::json to_json(const ReviewDecision& d);
ReviewDecision decision_from_json(const nlohmann::json& j);

/// Parses a decision log without modifying it. A torn final line is
/// ignored; its offset is stored in \p valid_bytes when given.
std::vector<ReviewDecision> read_decision_log(const std::filesystem::path& path, std::size_t* valid_bytes = nullptr);

enum class AppendStatus : std::uint8_t { Created, Replayed, KeyConflict };

struct AppendResult {
  AppendStatus status = AppendStatus::Created;
  ReviewDecision decision;
};

/// Append-only JSONL log, one decision per line, numbered from 1. Writes go
/// through one writer thread fed by a bounded queue; append() returns only
/// after the line has been fsynced. On open, a torn final line (from a
/// crash mid-write) is cut off; any other malformed line is an error.
class DecisionLog {
 public:
  explicit DecisionLog(std::filesystem::path path, std::size_t queue_capacity = 1024);
  ~DecisionLog();
  DecisionLog(const DecisionLog&) = delete;
  DecisionLog& operator=(const DecisionLog&) = delete;

  /// Assigns sequence, id and timestamp. A non-empty idempotency key seen
  /// before yields Replayed (same fingerprint) or KeyConflict.
  AppendResult append(ReviewDecision draft);

  std::vector<ReviewDecision> all() const;
  std::vector<ReviewDecision> for_description(std::string_view id) const;
  bool reviewed(std::string_view description_id) const;
  std::size_t size() const;
  /// Bytes dropped from a torn tail when the log was opened.
  std::size_t recovered_bytes() const { return recovered_bytes_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  struct Request {
    ReviewDecision draft;
    std::promise<AppendResult> done;
  };

  void load();
  void writer_loop(std::stop_token stop);
  AppendResult commit(ReviewDecision draft);

  std::filesystem::path path_;
  int fd_ = -1;
  std::size_t recovered_bytes_ = 0;

  mutable std::shared_mutex index_mutex_;
  std::vector<ReviewDecision> decisions_;
  std::map<std::string, std::size_t, std::less<>> by_key_;
  std::multimap<std::string, std::size_t, std::less<>> by_description_;

  std::mutex queue_mutex_;
  std::condition_variable_any queue_not_empty_;
  std::condition_variable_any queue_not_full_;
  std::deque<Request> queue_;
  std::size_t capacity_;
  std::jthread writer_;
};

}  // namespace biaslens
