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
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"

namespace biaslens {

struct Token {
  std::string surface;  // lowercased UTF-8
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Half-open token index range.
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const SentenceRange&, const SentenceRange&) = default;
};

struct TokenizedDescription {
  std::vector<Token> tokens;
  std::vector<SentenceRange> sentences;
};

/// Abbreviations that keep their trailing period and never end a sentence.
const std::vector<std::string>& abbreviations();

/// Rule-based word and sentence tokenizer.
///
/// Words are maximal runs of letters and digits (an apostrophe between two
/// letters stays inside the word); every other non-space character is its
/// own token. A period directly after a listed abbreviation is folded into
/// that token. A sentence ends at ".", "!" or "?" when followed by
/// whitespace and then an uppercase letter, or at end of text.
///
/// Throws Error(EmptyText) when the text is empty.
TokenizedDescription preprocess(const Description& d);
TokenizedDescription tokenize(std::string_view utf8_text);

}  // namespace biaslens
