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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/binary_io.hpp"

namespace biaslens {

/// Dense row-major float matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  float operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void append_row(std::span<const float> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

struct ForestConfig {
  std::size_t trees = 100;
  /// Features examined per split; 0 selects floor(sqrt(n_features)).
  std::size_t max_features = 0;
  bool bootstrap = true;
  std::size_t min_samples_split = 2;
  /// 0 means unlimited depth.
  std::size_t max_depth = 0;
  std::uint64_t seed = 22;
  /// Worker threads for tree construction. Results do not depend on it:
  /// tree i always draws from mix_seed(seed, i).
  std::size_t threads = 1;
};

nlohmann::json to_json(const ForestConfig& c);
ForestConfig forest_config_from_json(const nlohmann::json& j);

/// Binary random forest: gini impurity, bootstrap resampling, per-split
/// feature subsampling, majority vote over trees.
class RandomForest {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    float threshold = 0.0f;     // go left when x <= threshold
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    float positive_fraction = 0.0f;
    friend bool operator==(const Node&, const Node&) = default;
  };
  using Tree = std::vector<Node>;

  RandomForest() = default;

  /// Throws Error(EmptyTrainingSet) without rows and Error(AlignmentError)
  /// when labels and rows disagree.
  static RandomForest fit(const FeatureMatrix& x, std::span<const std::uint8_t> labels, const ForestConfig& config);

  std::size_t n_features() const { return n_features_; }
  std::size_t tree_count() const { return trees_.size(); }
  const std::vector<Tree>& trees() const { return trees_; }

  /// Fraction of trees voting positive.
  double vote_fraction(std::span<const float> row) const;
  /// Strict majority of positive votes.
  bool predict(std::span<const float> row) const;

  void write(BinaryWriter& w) const;
  static RandomForest read(BinaryReader& r);

  friend bool operator==(const RandomForest&, const RandomForest&) = default;

 private:
  std::size_t n_features_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace biaslens
