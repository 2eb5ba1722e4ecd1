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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"

namespace biaslens {

inline constexpr std::size_t kEmbeddingDim = 100;

/// Skip-gram with negative sampling over character n-gram subwords.
struct EmbeddingConfig {
  std::size_t dim = kEmbeddingDim;
  std::size_t window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  std::size_t min_count = 1;
  std::size_t min_n = 3;
  std::size_t max_n = 6;
  std::uint32_t buckets = 200000;
  double learning_rate = 0.025;
  double sampling_threshold = 1e-4;
  std::uint64_t seed = 22;

  friend bool operator==(const EmbeddingConfig&, const EmbeddingConfig&) = default;
};

nlohmann::json to_json(const EmbeddingConfig& c);
EmbeddingConfig embedding_config_from_json(const nlohmann::json& j);

/// Hash buckets of the character n-grams of "<word>", n in [min_n, max_n].
/// N-grams are taken over Unicode scalar values and hashed (FNV-1a, 32 bit)
/// over their UTF-8 bytes.
std::vector<std::uint32_t> subword_buckets(std::string_view word, std::size_t min_n, std::size_t max_n,
                                           std::uint32_t buckets);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  const EmbeddingConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }
  std::size_t vocab_size() const { return words_.size(); }
  std::size_t trained_bucket_count() const { return bucket_ids_.size(); }
  bool empty() const { return words_.empty(); }

  bool in_vocab(std::string_view token) const;

  /// In-vocabulary tokens: mean of the word row and the rows of its
  /// subword buckets. Out-of-vocabulary: mean over the subword buckets that
  /// were seen in training. Tokens with no such bucket map to zeros.
  std::vector<float> embed(std::string_view token) const;

  std::string serialize() const;
  static EmbeddingModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static EmbeddingModel load(const std::filesystem::path& path);

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
    return a.config_ == b.config_ && a.words_ == b.words_ && a.counts_ == b.counts_ &&
           a.word_rows_ == b.word_rows_ && a.bucket_ids_ == b.bucket_ids_ &&
           a.bucket_rows_ == b.bucket_rows_;
  }

 private:
  friend EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                         const EmbeddingConfig& config);
  void rebuild_index();
  void accumulate_buckets(std::string_view token, std::vector<float>& sum, std::size_t& rows) const;

  EmbeddingConfig config_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::vector<float> word_rows_;             // vocab_size x dim
  std::vector<std::uint32_t> bucket_ids_;    // ascending
  std::vector<float> bucket_rows_;           // bucket_ids_.size() x dim
  std::unordered_map<std::string, std::uint32_t> word_index_;
  std::unordered_map<std::uint32_t, std::uint32_t> bucket_index_;
};

/// Trains on pre-tokenized sentences. Single-threaded and deterministic for
/// a fixed config. Throws Error(EmptyCorpus) when there are no tokens.
EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                const EmbeddingConfig& config = {});

/// Trains on the lowercased token streams of each description.
EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config = {});

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace biaslens
