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
#include "biaslens/decision_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>

#include <spdlog/spdlog.h>

#include "biaslens/error.hpp"
#include "biaslens/output_dir.hpp"

namespace biaslens {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string decision_id(std::uint64_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dec-%08llu", static_cast<unsigned long long>(seq));
  return buf;
}

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path) {
  while (!bytes.empty()) {
    const auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::IoError, "write " + path.string() + ": " + std::strerror(errno));
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept:
      return "accept";
    case Verdict::Reject:
      return "reject";
    case Verdict::Unsure:
      return "unsure";
  }
  return "unsure";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Accept, Verdict::Reject, Verdict::Unsure}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

nlohmann::json to_json(const ReviewDecision& d) {
  return {{"seq", d.sequence},
          {"id", d.id},
          {"description_id", d.description_id},
          {"start", d.start},
          {"end", d.end},
          {"label", to_string(d.label)},
          {"scope", d.whole_description ? "description" : "span"},
          {"verdict", to_string(d.verdict)},
          {"note", d.note},
          {"reviewer", d.reviewer},
          {"timestamp", d.timestamp},
          {"idempotency_key", d.idempotency_key},
          {"fingerprint", d.fingerprint}};
}

ReviewDecision decision_from_json(const nlohmann::json& j) {
  ReviewDecision d;
  try {
    d.sequence = j.at("seq").get<std::uint64_t>();
    d.id = j.at("id").get<std::string>();
    d.description_id = j.at("description_id").get<std::string>();
    d.start = j.at("start").get<std::size_t>();
    d.end = j.at("end").get<std::size_t>();
    d.label = require_label(j.at("label").get<std::string>());
    d.whole_description = j.value("scope", std::string("span")) == "description";
    const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) throw Error(ErrorKind::MalformedRecord, "bad verdict");
    d.verdict = *verdict;
    d.note = j.value("note", std::string());
    d.reviewer = j.at("reviewer").get<std::string>();
    d.timestamp = j.value("timestamp", std::string());
    d.idempotency_key = j.value("idempotency_key", std::string());
    d.fingerprint = j.value("fingerprint", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("decision record: ") + e.what());
  }
  return d;
}

std::vector<ReviewDecision> read_decision_log(const std::filesystem::path& path, std::size_t* valid_bytes) {
  std::vector<ReviewDecision> out;
  const auto text = read_file(path);
  std::size_t pos = 0;
  std::size_t good = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line;
    const bool last = nl == std::string::npos || nl + 1 >= text.size();
    const std::string_view row(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
    try {
      if (nl == std::string::npos) throw Error(ErrorKind::MalformedRecord, "unterminated line");
      if (row.find_first_not_of(" \t\r") != std::string_view::npos) {
        auto d = decision_from_json(nlohmann::json::parse(row));
        if (d.sequence != out.size() + 1) {
          throw Error(ErrorKind::FormatError, "sequence " + std::to_string(d.sequence) + " out of order");
        }
        out.push_back(std::move(d));
      }
    } catch (const std::exception& e) {
      if (!last) throw Error(ErrorKind::FormatError, path.string() + " line " + std::to_string(line) + ": " + e.what());
      break;
    }
    pos = nl + 1;
    good = pos;
  }
  if (valid_bytes) *valid_bytes = good;
  return out;
}

DecisionLog::DecisionLog(std::filesystem::path path, std::size_t queue_capacity)
    : path_(std::move(path)), capacity_(std::max<std::size_t>(queue_capacity, 1)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  load();
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorKind::IoError, "open " + path_.string() + ": " + std::strerror(errno));
  writer_ = std::jthread([this](std::stop_token st) { writer_loop(st); });
}

DecisionLog::~DecisionLog() {
  writer_.request_stop();
  queue_not_empty_.notify_all();
  if (writer_.joinable()) writer_.join();
  if (fd_ >= 0) ::close(fd_);
}

void DecisionLog::load() {
  if (!std::filesystem::exists(path_)) return;
  std::size_t good = 0;
  decisions_ = read_decision_log(path_, &good);
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    if (!decisions_[i].idempotency_key.empty()) by_key_.emplace(decisions_[i].idempotency_key, i);
    by_description_.emplace(decisions_[i].description_id, i);
  }
  const auto size = std::filesystem::file_size(path_);
  if (good < size) {
    recovered_bytes_ = size - good;
    spdlog::warn("{}: dropping {} byte(s) of a torn final record", path_.string(), recovered_bytes_);
    std::filesystem::resize_file(path_, good);
  }
}

AppendResult DecisionLog::append(ReviewDecision draft) {
  std::future<AppendResult> result;
  {
    std::unique_lock lock(queue_mutex_);
    queue_not_full_.wait(lock, [&] { return queue_.size() < capacity_; });
    queue_.push_back(Request{std::move(draft), {}});
    result = queue_.back().done.get_future();
  }
  queue_not_empty_.notify_one();
  return result.get();
}

void DecisionLog::writer_loop(std::stop_token stop) {
  while (true) {
    Request req;
    {
      std::unique_lock lock(queue_mutex_);
      queue_not_empty_.wait(lock, stop, [&] { return !queue_.empty(); });
      if (queue_.empty()) return;
      req = std::move(queue_.front());
      queue_.pop_front();
    }
    queue_not_full_.notify_one();
    try {
      req.done.set_value(commit(std::move(req.draft)));
    } catch (...) {
      req.done.set_exception(std::current_exception());
    }
  }
}

AppendResult DecisionLog::commit(ReviewDecision draft) {
  if (!draft.idempotency_key.empty()) {
    std::shared_lock lock(index_mutex_);
    if (auto it = by_key_.find(draft.idempotency_key); it != by_key_.end()) {
      const auto& prior = decisions_[it->second];
      return {prior.fingerprint == draft.fingerprint ? AppendStatus::Replayed : AppendStatus::KeyConflict, prior};
    }
  }
  std::uint64_t seq;
  {
    std::shared_lock lock(index_mutex_);
    seq = decisions_.size() + 1;
  }
  draft.sequence = seq;
  draft.id = decision_id(seq);
  draft.timestamp = utc_now();
  write_all(fd_, to_json(draft).dump() + "\n", path_);
  if (::fsync(fd_) != 0) throw Error(ErrorKind::IoError, "fsync " + path_.string() + ": " + std::strerror(errno));
  {
    std::unique_lock lock(index_mutex_);
    const std::size_t i = decisions_.size();
    if (!draft.idempotency_key.empty()) by_key_.emplace(draft.idempotency_key, i);
    by_description_.emplace(draft.description_id, i);
    decisions_.push_back(draft);
  }
  return {AppendStatus::Created, std::move(draft)};
}

std::vector<ReviewDecision> DecisionLog::all() const {
  std::shared_lock lock(index_mutex_);
  return decisions_;
}

std::vector<ReviewDecision> DecisionLog::for_description(std::string_view id) const {
  std::shared_lock lock(index_mutex_);
  std::vector<ReviewDecision> out;
  auto [lo, hi] = by_description_.equal_range(id);
  for (auto it = lo; it != hi; ++it) out.push_back(decisions_[it->second]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
  return out;
}

bool DecisionLog::reviewed(std::string_view description_id) const {
  std::shared_lock lock(index_mutex_);
  return by_description_.find(description_id) != by_description_.end();
}

std::size_t DecisionLog::size() const {
  std::shared_lock lock(index_mutex_);
  return decisions_.size();
}

}  // namespace biaslens
