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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace biaslens {

/// Writes bytes to `path` via a sibling temp file, fsync and rename, so
/// readers only ever observe the old or the complete new file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Collects a command's artifacts in a hidden staging directory inside the
/// destination and moves them into place on commit(). Destroying an
/// uncommitted OutputDir removes the staging directory, so a failed command
/// leaves nothing new behind.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  ~OutputDir();

  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const std::filesystem::path& root() const { return root_; }

  /// Stages a file; `relative` may contain subdirectories.
  void write(const std::filesystem::path& relative, std::string_view bytes);

  /// Moves every staged file into root. Each rename is atomic.
  void commit();

 private:
  std::filesystem::path root_;
  std::filesystem::path staging_;
  std::vector<std::filesystem::path> staged_;
  bool committed_ = false;
};

}  // namespace biaslens
