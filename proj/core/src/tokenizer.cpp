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
#include "biaslens/tokenizer.hpp"

#include <algorithm>

#include "biaslens/error.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

namespace {

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

bool is_abbreviation(const std::u32string& lowered) {
  static const std::vector<std::u32string> kAbbrev = [] {
    std::vector<std::u32string> v;
    for (const auto& a : abbreviations()) v.push_back(text::decode_utf8(a));
    return v;
  }();
  return std::find(kAbbrev.begin(), kAbbrev.end(), lowered) != kAbbrev.end();
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

}  // namespace

const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> kList = {"dr", "mr", "mrs", "ms", "prof",
                                                 "st", "no", "vol", "ed"};
  return kList;
}

TokenizedDescription tokenize(std::string_view utf8_text) {
  const std::u32string cps = text::decode_utf8(utf8_text);
  const std::u32string lowered = text::to_lower(cps);
  const std::size_t n = cps.size();

  TokenizedDescription out;
  std::vector<bool> ends_sentence;
  std::size_t i = 0;
  while (i < n) {
    if (text::is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool terminal = false;
    if (text::is_word_char(cps[i])) {
      while (j < n) {
        if (text::is_word_char(cps[j])) {
          ++j;
        } else if (is_apostrophe(cps[j]) && j + 1 < n && text::is_alpha(cps[j - 1]) &&
                   text::is_alpha(cps[j + 1])) {
          ++j;
        } else {
          break;
        }
      }
      if (j < n && cps[j] == U'.' && is_abbreviation(lowered.substr(i, j - i))) ++j;
    } else if (is_terminal(cps[i])) {
      std::size_t k = j;
      if (k < n && text::is_space(cps[k])) {
        while (k < n && text::is_space(cps[k])) ++k;
        terminal = k < n && text::is_upper(cps[k]);
      }
    }
    out.tokens.push_back(Token{text::encode_utf8(lowered.substr(i, j - i)), i, j});
    ends_sentence.push_back(terminal);
    i = j;
  }

  std::size_t begin = 0;
  for (std::size_t t = 0; t < out.tokens.size(); ++t) {
    if (ends_sentence[t] || t + 1 == out.tokens.size()) {
      out.sentences.push_back(SentenceRange{begin, t + 1});
      begin = t + 1;
    }
  }
  return out;
}

TokenizedDescription preprocess(const Description& d) {
  if (d.text.empty()) throw Error(ErrorKind::EmptyText, d.id);
  return tokenize(d.text);
}

}  // namespace biaslens
