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

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace biaslens {

/// Little-endian append-only byte sink for model weight files.
class BinaryWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void put_string(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_.append(s);
  }
  template <typename T>
  void put_array(std::span<const T> values) {
    put<std::uint64_t>(values.size());
    bytes_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
  }
  void put_magic(std::string_view magic) { bytes_.append(magic); }

  const std::string& bytes() const { return bytes_; }
  std::string take() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

/// Bounds-checked reader; truncated or corrupt input throws
/// Error(FormatError).
class BinaryReader {
 public:
  explicit BinaryReader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)), sizeof(T));
    return value;
  }
  std::string get_string();
  template <typename T>
  std::vector<T> get_array() {
    const auto n = get<std::uint64_t>();
    if (n > remaining() / sizeof(T)) fail("array length exceeds input");
    std::vector<T> out(n);
    if (n) std::memcpy(out.data(), take(n * sizeof(T)), n * sizeof(T));
    return out;
  }
  void expect_magic(std::string_view magic);

  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end();

 private:
  const char* take(std::size_t n);
  [[noreturn]] void fail(const std::string& why) const;

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace biaslens
