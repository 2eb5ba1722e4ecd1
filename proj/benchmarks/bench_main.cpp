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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "biaslens/embeddings.hpp"
#include "biaslens/evaluation.hpp"
#include "biaslens/random_forest.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/sequence_crf.hpp"
#include "biaslens/synthetic.hpp"
#include "biaslens/tfidf.hpp"
#include "biaslens/tokenizer.hpp"

namespace {

using namespace biaslens;

// Sentence length x tag count lattice, the shape the sequence model decodes.
void BM_ViterbiDecode(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const std::size_t tags = 11;
  Rng rng(1);
  std::vector<double> emissions(length * tags);
  std::vector<double> transitions(tags * tags);
  for (auto& e : emissions) e = rng.uniform(-2, 2);
  for (auto& t : transitions) t = rng.uniform(-2, 2);
  for (auto _ : state) {
    auto r = viterbi_decode(emissions, length, transitions, tags);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ViterbiDecode)->Arg(8)->Arg(32)->Arg(128);

void BM_ForestFit(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 104;
  Rng rng(2);
  FeatureMatrix x(rows, cols);
  std::vector<std::uint8_t> y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : x.row(i)) v = static_cast<float>(rng.uniform(-1, 1));
    y[i] = x(i, 0) + 0.3f * x(i, 1) > 0.2f ? 1 : 0;
  }
  ForestConfig config;
  config.trees = 20;
  for (auto _ : state) {
    auto forest = RandomForest::fit(x, y, config);
    benchmark::DoNotOptimize(forest);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForestFit)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_LooseMatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<AnnotationSpan> predicted;
  std::vector<AnnotationSpan> reference;
  for (std::size_t i = 0; i < n; ++i) {
    const auto start = rng.uniform_index(2000);
    predicted.push_back({start, start + 1 + rng.uniform_index(20), CodeLabel::Omission, {}});
    const auto other = rng.uniform_index(2000);
    reference.push_back({other, other + 1 + rng.uniform_index(20), CodeLabel::Omission, {}});
  }
  for (auto _ : state) {
    auto c = loose_match(predicted, reference, CodeLabel::Omission);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LooseMatch)->Arg(10)->Arg(100)->Arg(1000);

std::vector<std::vector<std::string>> corpus_sentences(std::size_t descriptions) {
  SyntheticOptions o;
  o.descriptions = descriptions;
  std::vector<std::vector<std::string>> sentences;
  for (const auto& d : synthetic_corpus(o)) {
    std::vector<std::string> words;
    for (const auto& t : preprocess(d).tokens) words.push_back(t.surface);
    sentences.push_back(std::move(words));
  }
  return sentences;
}

void BM_EmbeddingTraining(benchmark::State& state) {
  const auto sentences = corpus_sentences(static_cast<std::size_t>(state.range(0)));
  EmbeddingConfig config;
  config.epochs = 1;
  config.buckets = 50000;
  for (auto _ : state) {
    auto m = train_embeddings(sentences, config);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_EmbeddingTraining)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_TfidfFit(benchmark::State& state) {
  const auto documents = corpus_sentences(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto m = fit_tfidf(documents);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_TfidfFit)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
