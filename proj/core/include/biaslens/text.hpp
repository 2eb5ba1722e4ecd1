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
#include <string_view>

namespace biaslens::text {

/// Decodes UTF-8 into Unicode scalar values. Invalid sequences throw
/// Error(FormatError).
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view cps);

/// Number of scalar values in a UTF-8 string.
std::size_t scalar_length(std::string_view utf8);

/// Simple one-to-one case mapping: never changes the number of scalar
/// values, so offsets computed on the lowered text index the original.
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);

bool is_upper(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_space(char32_t c);
inline bool is_word_char(char32_t c) { return is_alpha(c) || is_digit(c); }

}  // namespace biaslens::text
