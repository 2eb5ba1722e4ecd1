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
#include "biaslens/binary_io.hpp"

#include "biaslens/error.hpp"

namespace biaslens {

std::string BinaryReader::get_string() {
  const auto n = get<std::uint32_t>();
  return std::string(take(n), n);
}

void BinaryReader::expect_magic(std::string_view magic) {
  if (remaining() < magic.size() || bytes_.substr(pos_, magic.size()) != magic) {
    fail("bad magic, expected '" + std::string(magic) + "'");
  }
  pos_ += magic.size();
}

void BinaryReader::expect_end() {
  if (remaining() != 0) fail(std::to_string(remaining()) + " trailing bytes");
}

const char* BinaryReader::take(std::size_t n) {
  if (n > remaining()) fail("unexpected end of input");
  const char* p = bytes_.data() + pos_;
  pos_ += n;
  return p;
}

void BinaryReader::fail(const std::string& why) const {
  throw Error(ErrorKind::FormatError, why + " at offset " + std::to_string(pos_));
}

}  // namespace biaslens
