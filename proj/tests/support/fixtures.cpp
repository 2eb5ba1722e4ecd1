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
#include "fixtures.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "biaslens/text.hpp"

namespace biaslens::testing {

namespace fs = std::filesystem;

AnnotationSpan span(std::size_t start, std::size_t end, CodeLabel label) {
  AnnotationSpan s;
  s.start = start;
  s.end = end;
  s.label = label;
  return s;
}

Description make_description(std::string id, std::string text, std::vector<AnnotationSpan> annotations,
                             std::string fonds_id, std::vector<std::string> languages) {
  Description d;
  d.id = std::move(id);
  d.fonds_id = fonds_id;
  d.fonds_title = fonds_id + " Fonds";
  d.field = MetadataField::ScopeAndContents;
  d.text = std::move(text);
  d.languages = std::move(languages);
  d.annotations = std::move(annotations);
  return d;
}

LabelCounts brute_force_counts(const std::vector<AnnotationSpan>& predicted,
                               const std::vector<AnnotationSpan>& reference, CodeLabel label) {
  const auto chars = [](const AnnotationSpan& s) {
    std::set<std::size_t> out;
    for (std::size_t c = s.start; c < s.end; ++c) out.insert(c);
    return out;
  };
  const auto shares_char = [&](const AnnotationSpan& a, const AnnotationSpan& b) {
    const auto ca = chars(a);
    const auto cb = chars(b);
    for (auto c : ca) {
      if (cb.count(c)) return true;
    }
    return false;
  };
  LabelCounts c;
  for (const auto& p : predicted) {
    if (p.label != label) continue;
    bool hit = false;
    for (const auto& r : reference) hit = hit || (r.label == label && shares_char(p, r));
    ++(hit ? c.tp : c.fp);
  }
  for (const auto& r : reference) {
    if (r.label != label) continue;
    bool hit = false;
    for (const auto& p : predicted) hit = hit || (p.label == label && shares_char(p, r));
    ++(hit ? c.tp_reference : c.fn);
  }
  return c;
}

SpanConfiguration random_configuration(Rng& rng, std::size_t max_spans, std::size_t max_labels,
                                       std::size_t text_length) {
  SpanConfiguration cfg;
  std::vector<CodeLabel> pool(kAllLabels.begin(), kAllLabels.end());
  rng.shuffle(std::span<CodeLabel>(pool));
  pool.resize(1 + rng.uniform_index(max_labels));
  cfg.labels = pool;
  const auto side = [&] {
    std::vector<AnnotationSpan> out;
    const auto n = rng.uniform_index(max_spans + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = rng.uniform_index(text_length);
      const auto len = 1 + rng.uniform_index(std::min<std::size_t>(8, text_length - a));
      out.push_back(span(a, a + len, pool[rng.uniform_index(pool.size())]));
    }
    return out;
  };
  cfg.predicted = side();
  cfg.reference = side();
  return cfg;
}

CorpusAnnotations random_annotations(Rng& rng, std::size_t descriptions, const std::vector<CodeLabel>& labels) {
  CorpusAnnotations out;
  for (std::size_t d = 0; d < descriptions; ++d) {
    auto& spans = out["d" + std::to_string(d)];
    const auto n = rng.uniform_index(5);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = rng.uniform_index(30);
      spans.push_back(span(a, a + 1 + rng.uniform_index(6), labels[rng.uniform_index(labels.size())]));
    }
  }
  return out;
}

namespace {

std::string nonsense_word(Rng& rng) {
  static const char* syllables[] = {"ka", "lo", "mi", "ru", "te", "sa", "no", "vi", "pe", "zu", "da", "fo"};
  std::string w;
  const auto n = 2 + rng.uniform_index(2);
  for (std::size_t i = 0; i < n; ++i) w += syllables[rng.uniform_index(std::size(syllables))];
  return w;
}

}  // namespace

Corpus plumbing_corpus(std::size_t descriptions, std::uint64_t seed) {
  Rng rng(seed);
  Corpus corpus;
  for (std::size_t i = 0; i < descriptions; ++i) {
    std::string text;
    std::vector<AnnotationSpan> spans;
    bool pronoun = false;
    bool generalization = false;
    const auto words = 4 + rng.uniform_index(8);
    for (std::size_t w = 0; w < words; ++w) {
      if (!text.empty()) text += ' ';
      const auto word = nonsense_word(rng);
      const auto start = text::scalar_length(text);
      text += word;
      const auto end = start + word.size();
      const double roll = rng.uniform();
      if (roll < 0.08) {
        spans.push_back(span(start, end, CodeLabel::GenderedPronoun));
        spans.push_back(span(start, end, CodeLabel::Masculine));
        pronoun = true;
      } else if (roll < 0.14) {
        spans.push_back(span(start, end, CodeLabel::Generalization));
        spans.push_back(span(start, end, CodeLabel::Occupation));
        generalization = true;
      }
    }
    text += " .";
    const auto length = text::scalar_length(text);
    if (pronoun) spans.push_back(span(0, length, CodeLabel::Omission));
    if (generalization) spans.push_back(span(0, length, CodeLabel::Stereotype));
    char id[32];
    std::snprintf(id, sizeof id, "p%04zu", i);
    corpus.push_back(make_description(id, text, std::move(spans), "F" + std::to_string(i % 4)));
  }
  return corpus;
}

Corpus toy_corpus() {
  Corpus c;
  // "She married the clerk." : she(0,3) clerk(16,21)
  c.push_back(make_description("a1", "She married the clerk.",
                               {span(0, 3, CodeLabel::GenderedPronoun), span(16, 21, CodeLabel::Occupation)}, "F1",
                               {"English", "French"}));
  // "Mrs. Smith kept house." : Mrs. Smith(0,10)
  c.push_back(make_description("a2", "Mrs. Smith kept house.",
                               {span(0, 10, CodeLabel::Feminine), span(0, 22, CodeLabel::Omission)}, "F1",
                               {"English"}));
  c.push_back(make_description("b1", "Letters of the workmen.",
                               {span(15, 22, CodeLabel::Generalization), span(0, 23, CodeLabel::Stereotype)}, "F2",
                               {"Latin"}));
  return c;
}

TempDir::TempDir(const std::string& prefix) {
  auto pattern = (fs::temp_directory_path() / (prefix + "-XXXXXX")).string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path cli_path() { return BIASLENS_CLI_PATH; }

namespace {

std::vector<char*> argv_of(std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return argv;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::string* stdout_text) {
  std::vector<std::string> full{cli_path().string()};
  full.insert(full.end(), args.begin(), args.end());
  int out[2];
  if (pipe(out) != 0) throw std::runtime_error("pipe failed");
  const pid_t pid = fork();
  if (pid == 0) {
    dup2(out[1], STDOUT_FILENO);
    close(out[0]);
    close(out[1]);
    setenv("BIASLENS_LOG", "warn", 1);
    auto argv = argv_of(full);
    execv(argv[0], argv.data());
    _exit(127);
  }
  close(out[1]);
  std::string text;
  char buf[4096];
  ssize_t n;
  while ((n = read(out[0], buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  close(out[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (stdout_text) *stdout_text = std::move(text);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

ServerProcess::ServerProcess(const std::vector<std::string>& args) {
  std::vector<std::string> full{cli_path().string(), "serve", "--listen", "127.0.0.1:0"};
  full.insert(full.end(), args.begin(), args.end());
  int out[2];
  if (pipe(out) != 0) throw std::runtime_error("pipe failed");
  pid_ = fork();
  if (pid_ == 0) {
    dup2(out[1], STDOUT_FILENO);
    close(out[0]);
    close(out[1]);
    setenv("BIASLENS_LOG", "warn", 1);
    auto argv = argv_of(full);
    execv(argv[0], argv.data());
    _exit(127);
  }
  close(out[1]);
  std::string line;
  char c;
  while (read(out[0], &c, 1) == 1 && c != '\n') line += c;
  close(out[0]);
  const auto colon = line.rfind(':');
  if (line.rfind("listening on ", 0) != 0 || colon == std::string::npos) {
    kill_hard();
    throw std::runtime_error("server did not start: '" + line + "'");
  }
  port_ = std::stoi(line.substr(colon + 1));
}

ServerProcess::~ServerProcess() {
  if (pid_ > 0) terminate();
}

void ServerProcess::kill_hard() {
  if (pid_ <= 0) return;
  ::kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

int ServerProcess::terminate() {
  if (pid_ <= 0) return -1;
  ::kill(pid_, SIGTERM);
  int status = 0;
  waitpid(pid_, &status, 0);
  pid_ = -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

}  // namespace biaslens::testing
