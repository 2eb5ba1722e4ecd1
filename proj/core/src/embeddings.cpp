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
#include "biaslens/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "biaslens/binary_io.hpp"
#include "biaslens/error.hpp"
#include "biaslens/output_dir.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/text.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

namespace {

constexpr std::string_view kMagic = "BLEMBED\n";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kMaxNegativeTable = 1'000'000;

std::uint32_t fnv1a(std::string_view bytes) {
  std::uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

nlohmann::json to_json(const EmbeddingConfig& c) {
  return nlohmann::json{{"dim", c.dim},
                        {"window", c.window},
                        {"epochs", c.epochs},
                        {"negatives", c.negatives},
                        {"min_count", c.min_count},
                        {"min_n", c.min_n},
                        {"max_n", c.max_n},
                        {"buckets", c.buckets},
                        {"learning_rate", c.learning_rate},
                        {"sampling_threshold", c.sampling_threshold},
                        {"seed", c.seed}};
}

EmbeddingConfig embedding_config_from_json(const nlohmann::json& j) {
  EmbeddingConfig c;
  c.dim = j.value("dim", c.dim);
  c.window = j.value("window", c.window);
  c.epochs = j.value("epochs", c.epochs);
  c.negatives = j.value("negatives", c.negatives);
  c.min_count = j.value("min_count", c.min_count);
  c.min_n = j.value("min_n", c.min_n);
  c.max_n = j.value("max_n", c.max_n);
  c.buckets = j.value("buckets", c.buckets);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.sampling_threshold = j.value("sampling_threshold", c.sampling_threshold);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<std::uint32_t> subword_buckets(std::string_view word, std::size_t min_n, std::size_t max_n,
                                           std::uint32_t buckets) {
  std::vector<std::uint32_t> out;
  if (buckets == 0) return out;
  std::u32string w = U"<";
  w += text::decode_utf8(word);
  w += U">";
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t n = min_n; n <= max_n && i + n <= w.size(); ++n) {
      out.push_back(fnv1a(text::encode_utf8(std::u32string_view(w).substr(i, n))) % buckets);
    }
  }
  return out;
}

bool EmbeddingModel::in_vocab(std::string_view token) const {
  return word_index_.contains(std::string(token));
}

void EmbeddingModel::accumulate_buckets(std::string_view token, std::vector<float>& sum,
                                        std::size_t& rows) const {
  const std::size_t d = dim();
  for (auto b : subword_buckets(token, config_.min_n, config_.max_n, config_.buckets)) {
    auto it = bucket_index_.find(b);
    if (it == bucket_index_.end()) continue;
    const float* row = &bucket_rows_[static_cast<std::size_t>(it->second) * d];
    for (std::size_t k = 0; k < d; ++k) sum[k] += row[k];
    ++rows;
  }
}

std::vector<float> EmbeddingModel::embed(std::string_view token) const {
  const std::size_t d = dim();
  std::vector<float> sum(d, 0.0f);
  std::size_t rows = 0;
  if (auto it = word_index_.find(std::string(token)); it != word_index_.end()) {
    const float* row = &word_rows_[static_cast<std::size_t>(it->second) * d];
    for (std::size_t k = 0; k < d; ++k) sum[k] += row[k];
    ++rows;
  }
  accumulate_buckets(token, sum, rows);
  if (rows > 1) {
    const float inv = 1.0f / static_cast<float>(rows);
    for (auto& v : sum) v *= inv;
  }
  return sum;
}

void EmbeddingModel::rebuild_index() {
  word_index_.clear();
  bucket_index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) word_index_.emplace(words_[i], static_cast<std::uint32_t>(i));
  for (std::size_t i = 0; i < bucket_ids_.size(); ++i) bucket_index_.emplace(bucket_ids_[i], static_cast<std::uint32_t>(i));
}

std::string EmbeddingModel::serialize() const {
  BinaryWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.dim));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(words_.size()));
  w.put<std::uint32_t>(config_.buckets);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(bucket_ids_.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.window));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.epochs));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.negatives));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.min_count));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.min_n));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.max_n));
  w.put<double>(config_.learning_rate);
  w.put<double>(config_.sampling_threshold);
  w.put<std::uint64_t>(config_.seed);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    w.put_string(words_[i]);
    w.put<std::uint64_t>(counts_[i]);
  }
  w.put_array<float>(word_rows_);
  w.put_array<std::uint32_t>(bucket_ids_);
  w.put_array<float>(bucket_rows_);
  return w.take();
}

EmbeddingModel EmbeddingModel::deserialize(std::string_view bytes) {
  BinaryReader r(bytes);
  r.expect_magic(kMagic);
  if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorKind::FormatError, "unsupported embedding file version");
  EmbeddingModel m;
  m.config_.dim = r.get<std::uint32_t>();
  const auto vocab = r.get<std::uint32_t>();
  m.config_.buckets = r.get<std::uint32_t>();
  const auto used = r.get<std::uint32_t>();
  m.config_.window = r.get<std::uint32_t>();
  m.config_.epochs = r.get<std::uint32_t>();
  m.config_.negatives = r.get<std::uint32_t>();
  m.config_.min_count = r.get<std::uint32_t>();
  m.config_.min_n = r.get<std::uint32_t>();
  m.config_.max_n = r.get<std::uint32_t>();
  m.config_.learning_rate = r.get<double>();
  m.config_.sampling_threshold = r.get<double>();
  m.config_.seed = r.get<std::uint64_t>();
  for (std::uint32_t i = 0; i < vocab; ++i) {
    m.words_.push_back(r.get_string());
    m.counts_.push_back(r.get<std::uint64_t>());
  }
  m.word_rows_ = r.get_array<float>();
  m.bucket_ids_ = r.get_array<std::uint32_t>();
  m.bucket_rows_ = r.get_array<float>();
  r.expect_end();
  if (m.word_rows_.size() != static_cast<std::size_t>(vocab) * m.config_.dim ||
      m.bucket_ids_.size() != used || m.bucket_rows_.size() != static_cast<std::size_t>(used) * m.config_.dim) {
    throw Error(ErrorKind::FormatError, "embedding file row counts disagree with header");
  }
  m.rebuild_index();
  return m;
}

void EmbeddingModel::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                const EmbeddingConfig& config) {
  if (config.dim == 0 || config.min_n == 0 || config.min_n > config.max_n) {
    throw Error(ErrorKind::InvalidArgument, "invalid embedding configuration");
  }
  std::map<std::string, std::uint64_t> freq;
  for (const auto& s : sentences) {
    for (const auto& tok : s) ++freq[tok];
  }
  EmbeddingModel m;
  m.config_ = config;
  std::vector<std::pair<std::string, std::uint64_t>> vocab;
  for (auto& [w, c] : freq) {
    if (c >= config.min_count) vocab.emplace_back(w, c);
  }
  if (vocab.empty()) throw Error(ErrorKind::EmptyCorpus, "no tokens to train embeddings on");
  std::stable_sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (auto& [w, c] : vocab) {
    m.words_.push_back(w);
    m.counts_.push_back(c);
  }

  const std::size_t d = config.dim;
  const std::size_t nwords = m.words_.size();

  // Every bucket reachable from the vocabulary gets a compact row after the
  // word rows; subwords[i] lists the input rows composing word i.
  std::map<std::uint32_t, std::uint32_t> bucket_rows;
  std::vector<std::vector<std::uint32_t>> subword_lists(nwords);
  for (std::size_t i = 0; i < nwords; ++i) {
    for (auto b : subword_buckets(m.words_[i], config.min_n, config.max_n, config.buckets)) bucket_rows.emplace(b, 0);
  }
  std::uint32_t next = static_cast<std::uint32_t>(nwords);
  for (auto& [b, row] : bucket_rows) row = next++;
  for (std::size_t i = 0; i < nwords; ++i) {
    subword_lists[i].push_back(static_cast<std::uint32_t>(i));
    for (auto b : subword_buckets(m.words_[i], config.min_n, config.max_n, config.buckets)) {
      subword_lists[i].push_back(bucket_rows.at(b));
    }
  }

  Rng rng(config.seed);
  const std::size_t nrows = next;
  std::vector<float> input(nrows * d);
  const double bound = 1.0 / static_cast<double>(d);
  for (auto& v : input) v = static_cast<float>(rng.uniform(-bound, bound));
  std::vector<float> output(nwords * d, 0.0f);

  std::uint64_t total = 0;
  for (auto c : m.counts_) total += c;
  std::vector<double> keep_prob(nwords);
  for (std::size_t i = 0; i < nwords; ++i) {
    const double f = static_cast<double>(m.counts_[i]) / static_cast<double>(total);
    const double t = config.sampling_threshold;
    keep_prob[i] = t > 0 ? std::sqrt(t / f) + t / f : 1.0;
  }

  std::vector<std::uint32_t> negatives;
  {
    double z = 0;
    for (auto c : m.counts_) z += std::sqrt(static_cast<double>(c));
    const double table = static_cast<double>(std::min<std::size_t>(kMaxNegativeTable, std::max<std::size_t>(nwords * 100, 1000)));
    for (std::size_t i = 0; i < nwords; ++i) {
      const double share = std::sqrt(static_cast<double>(m.counts_[i])) * table / z;
      const auto reps = std::max<std::size_t>(1, static_cast<std::size_t>(share));
      negatives.insert(negatives.end(), reps, static_cast<std::uint32_t>(i));
    }
    rng.shuffle(std::span<std::uint32_t>(negatives));
  }

  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < nwords; ++i) index.emplace(m.words_[i], static_cast<std::uint32_t>(i));

  std::vector<std::vector<std::uint32_t>> ids(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& tok : sentences[s]) {
      if (auto it = index.find(tok); it != index.end()) ids[s].push_back(it->second);
    }
  }

  const double planned = static_cast<double>(config.epochs) * static_cast<double>(total);
  std::uint64_t processed = 0;
  std::vector<float> hidden(d), grad(d);
  std::vector<std::uint32_t> line;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sent : ids) {
      line.clear();
      for (auto w : sent) {
        if (rng.uniform() <= keep_prob[w]) line.push_back(w);
      }
      processed += sent.size();
      const double lr = config.learning_rate * std::max(0.0, 1.0 - static_cast<double>(processed) / planned);
      for (std::size_t pos = 0; pos < line.size(); ++pos) {
        const auto& rows = subword_lists[line[pos]];
        const std::size_t boundary = 1 + rng.uniform_index(config.window);
        for (std::size_t c = pos >= boundary ? pos - boundary : 0; c <= pos + boundary && c < line.size(); ++c) {
          if (c == pos) continue;
          std::fill(hidden.begin(), hidden.end(), 0.0f);
          for (auto r : rows) {
            const float* in = &input[static_cast<std::size_t>(r) * d];
            for (std::size_t k = 0; k < d; ++k) hidden[k] += in[k];
          }
          const float inv = 1.0f / static_cast<float>(rows.size());
          for (auto& h : hidden) h *= inv;
          std::fill(grad.begin(), grad.end(), 0.0f);

          const auto step = [&](std::uint32_t target, double label) {
            float* out = &output[static_cast<std::size_t>(target) * d];
            double dot = 0;
            for (std::size_t k = 0; k < d; ++k) dot += static_cast<double>(out[k]) * hidden[k];
            const auto alpha = static_cast<float>(lr * (label - sigmoid(dot)));
            for (std::size_t k = 0; k < d; ++k) {
              grad[k] += alpha * out[k];
              out[k] += alpha * hidden[k];
            }
          };
          const std::uint32_t target = line[c];
          step(target, 1.0);
          for (std::size_t n = 0; n < config.negatives; ++n) {
            std::uint32_t neg;
            do {
              neg = negatives[rng.uniform_index(negatives.size())];
            } while (neg == target && nwords > 1);
            if (neg == target) break;
            step(neg, 0.0);
          }
          for (auto r : rows) {
            float* in = &input[static_cast<std::size_t>(r) * d];
            for (std::size_t k = 0; k < d; ++k) in[k] += grad[k];
          }
        }
      }
    }
  }

  m.word_rows_.assign(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(nwords * d));
  for (auto& [b, row] : bucket_rows) {
    m.bucket_ids_.push_back(b);
    const float* src = &input[static_cast<std::size_t>(row) * d];
    m.bucket_rows_.insert(m.bucket_rows_.end(), src, src + d);
  }
  m.rebuild_index();
  return m;
}

EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& d : corpus) {
    std::vector<std::string> toks;
    for (auto& t : tokenize(d.text).tokens) toks.push_back(std::move(t.surface));
    sentences.push_back(std::move(toks));
  }
  return train_embeddings(sentences, config);
}

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    dot += static_cast<double>(a[k]) * b[k];
    na += static_cast<double>(a[k]) * a[k];
    nb += static_cast<double>(b[k]) * b[k];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace biaslens
