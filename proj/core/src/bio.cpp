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
#include "biaslens/bio.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "biaslens/error.hpp"

namespace biaslens {

namespace {

struct TokenRange {
  std::size_t first;
  std::size_t last;  // inclusive
  CodeLabel label;
};

// Tokens overlapping [start, end); nullopt if the span covers only whitespace.
std::optional<std::pair<std::size_t, std::size_t>> covered_tokens(const TokenizedDescription& t,
                                                                  std::size_t start, std::size_t end) {
  auto it = std::lower_bound(t.tokens.begin(), t.tokens.end(), start,
                             [](const Token& tok, std::size_t s) { return tok.end <= s; });
  if (it == t.tokens.end() || it->start >= end) return std::nullopt;
  std::size_t first = static_cast<std::size_t>(it - t.tokens.begin());
  std::size_t last = first;
  while (last + 1 < t.tokens.size() && t.tokens[last + 1].start < end) ++last;
  return std::make_pair(first, last);
}

struct ParsedTag {
  char kind;  // 'B', 'I' or 'O'
  CodeLabel label;
};

ParsedTag parse_tag(const std::string& tag) {
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    if (auto l = parse_label(std::string_view(tag).substr(2))) return {tag[0], *l};
  }
  return {'O', CodeLabel::GenderedPronoun};
}

}  // namespace

std::vector<AnnotationSpan> merge_same_label(std::vector<AnnotationSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const AnnotationSpan& a, const AnnotationSpan& b) {
    return std::tie(a.label, a.start, a.end) < std::tie(b.label, b.start, b.end);
  });
  std::vector<AnnotationSpan> merged;
  for (auto& s : spans) {
    if (!merged.empty() && merged.back().label == s.label && s.start < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(std::move(s));
    }
  }
  std::sort(merged.begin(), merged.end(), [](const AnnotationSpan& a, const AnnotationSpan& b) {
    return std::tie(a.start, a.label, a.end) < std::tie(b.start, b.label, b.end);
  });
  return merged;
}

std::vector<std::string> to_bio(const Description& d, const TokenizedDescription& t,
                                const LabelSet& labels) {
  std::vector<AnnotationSpan> selected;
  for (const auto& a : d.annotations) {
    if (labels.contains(a.label)) selected.push_back(a);
  }
  selected = merge_same_label(std::move(selected));

  std::vector<TokenRange> ranges;
  for (const auto& s : selected) {
    auto cov = covered_tokens(t, s.start, s.end);
    if (!cov) continue;
    // Same-label spans touching one token collapse into a single run.
    auto prev = std::find_if(ranges.rbegin(), ranges.rend(),
                             [&](const TokenRange& r) { return r.label == s.label; });
    if (prev != ranges.rend() && prev->last >= cov->first) {
      prev->last = std::max(prev->last, cov->second);
      continue;
    }
    ranges.push_back(TokenRange{cov->first, cov->second, s.label});
  }

  std::vector<std::string> tags(t.tokens.size(), "O");
  std::vector<std::optional<CodeLabel>> owner(t.tokens.size());
  for (const auto& r : ranges) {
    for (std::size_t k = r.first; k <= r.last; ++k) {
      if (owner[k] && *owner[k] != r.label) {
        throw Error(ErrorKind::OverlapConflict,
                    d.id + ": " + std::string(to_string(*owner[k])) + " and " +
                        std::string(to_string(r.label)) + " both claim token at [" +
                        std::to_string(t.tokens[k].start) + ", " + std::to_string(t.tokens[k].end) + ")");
      }
      owner[k] = r.label;
      tags[k] = std::string(k == r.first ? "B-" : "I-") + std::string(to_string(r.label));
    }
  }
  return tags;
}

std::vector<AnnotationSpan> bio_to_spans(const std::vector<std::string>& tags,
                                         const TokenizedDescription& t,
                                         const AnnotationSource& source) {
  std::vector<AnnotationSpan> spans;
  std::optional<AnnotationSpan> open;
  const std::size_t n = std::min(tags.size(), t.tokens.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto tag = parse_tag(tags[k]);
    if (tag.kind == 'I' && open && open->label == tag.label) {
      open->end = t.tokens[k].end;
      continue;
    }
    if (open) {
      spans.push_back(*open);
      open.reset();
    }
    if (tag.kind != 'O') {
      open = AnnotationSpan{t.tokens[k].start, t.tokens[k].end, tag.label, source};
    }
  }
  if (open) spans.push_back(*open);
  return spans;
}

std::vector<LabelSet> token_label_sets(const Description& d, const TokenizedDescription& t,
                                       const LabelSet& labels) {
  std::vector<LabelSet> out(t.tokens.size());
  for (const auto& a : d.annotations) {
    if (!labels.contains(a.label)) continue;
    if (auto cov = covered_tokens(t, a.start, a.end)) {
      for (std::size_t k = cov->first; k <= cov->second; ++k) out[k].insert(a.label);
    }
  }
  return out;
}

}  // namespace biaslens
