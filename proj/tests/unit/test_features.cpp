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

#include <doctest.h>

#include <cmath>

#include "biaslens/embeddings.hpp"
#include "biaslens/error.hpp"
#include "biaslens/features.hpp"
#include "biaslens/synthetic.hpp"
#include "biaslens/tfidf.hpp"
#include "biaslens/tokenizer.hpp"
#include "fixtures.hpp"

using namespace biaslens;
using biaslens::testing::make_description;
using biaslens::testing::span;

namespace {

bool nonzero(const std::vector<float>& v) {
  for (float x : v) {
    if (x != 0.0f) return true;
  }
  return false;
}

EmbeddingModel small_model() {
  std::vector<std::vector<std::string>> sentences;
  Rng rng(3);
  const std::vector<std::string> verbs{"wrote", "kept", "signed", "sent", "filed"};
  const std::vector<std::string> objects{"letters", "ledgers", "deeds", "maps", "diaries"};
  for (int i = 0; i < 400; ++i) {
    const std::string subject = (i % 2) ? "he" : "she";
    sentences.push_back({subject, verbs[rng.uniform_index(5)], "the", objects[rng.uniform_index(5)], "as",
                         "surgeon", "."});
    sentences.push_back({"in", "1873", "1874", "1875", "1876", "1877", "1878"});
  }
  EmbeddingConfig c;
  c.buckets = 20000;
  return train_embeddings(sentences, c);
}

}  // namespace

TEST_CASE("embeddings have 100 dimensions and handle OOV through n-grams") {
  const auto m = small_model();
  CHECK(m.dim() == 100);
  CHECK(m.embed("surgeon").size() == 100);
  CHECK(m.embed("he") == m.embed("he"));
  CHECK_FALSE(m.in_vocab("surgeoness"));
  CHECK(nonzero(m.embed("surgeoness")));
  CHECK(m.embed("").size() == 100);
  CHECK_FALSE(nonzero(m.embed("")));
  CHECK_FALSE(nonzero(m.embed("qqqqqqq")));
}

TEST_CASE("embeddings place words sharing contexts closer") {
  const auto m = small_model();
  CHECK(cosine_similarity(m.embed("he"), m.embed("she")) > cosine_similarity(m.embed("he"), m.embed("1873")));
}

TEST_CASE("embedding training is deterministic and serialization is bit exact") {
  const auto a = small_model();
  const auto b = small_model();
  CHECK(a == b);
  const auto round = EmbeddingModel::deserialize(a.serialize());
  CHECK(round == a);
  CHECK(round.embed("surgeoness") == a.embed("surgeoness"));
  CHECK_THROWS_AS(train_embeddings(std::vector<std::vector<std::string>>{}), Error);
}

TEST_CASE("tf-idf examples") {
  const auto one = fit_tfidf(std::vector<std::vector<std::string>>{{"x", "y", "z"}});
  const auto v = one.transform("x y z");
  REQUIRE(v.values.size() == 3);
  CHECK(v.values[0] == doctest::Approx(v.values[1]));
  CHECK(v.values[1] == doctest::Approx(v.values[2]));

  const auto two = fit_tfidf(std::vector<std::vector<std::string>>{{"a", "b"}, {"a", "c"}});
  const auto d1 = two.transform("a b");
  CHECK(d1.at(two.vocabulary().at("a")) < d1.at(two.vocabulary().at("b")));
  CHECK(two.transform("").values.empty());
  CHECK(two.transform("unseen words").values.empty());
  CHECK_THROWS_AS(TfidfModel().transform("a"), Error);
  CHECK(TfidfModel::from_json(two.to_json()) == two);
}

TEST_CASE("tf-idf vectors have unit or zero norm") {
  SyntheticOptions opts;
  opts.descriptions = 60;
  const auto corpus = synthetic_corpus(opts);
  const auto m = fit_tfidf(corpus);
  for (const auto& d : corpus) {
    const double n = m.transform(d).norm();
    CHECK((n == 0.0 || std::abs(n - 1.0) < 1e-9));
  }
}

TEST_CASE("token features mark sentence boundaries and carry injected labels") {
  const auto m = small_model();
  const auto t = tokenize("He wrote. She kept maps.");
  REQUIRE(t.sentences.size() == 2);
  std::vector<LabelSet> injected(t.tokens.size());
  injected[0].insert(CodeLabel::GenderedPronoun);
  const auto rows = assemble_token_features(t, m, &injected);
  REQUIRE(rows.size() == 2);
  std::size_t starts = 0;
  std::size_t ends = 0;
  for (const auto& sentence : rows) {
    CHECK(sentence.front().start_of_sentence);
    CHECK(sentence.back().end_of_sentence);
    for (const auto& r : sentence) {
      starts += r.start_of_sentence;
      ends += r.end_of_sentence;
      CHECK(r.bias == 1.0f);
      CHECK(r.embedding.size() == 100);
    }
  }
  CHECK(starts == 2);
  CHECK(ends == 2);
  CHECK(rows[0][0].injected.contains(CodeLabel::GenderedPronoun));
  CHECK(rows[0][1].injected.empty());

  const auto single = assemble_token_features(tokenize("A"), m);
  CHECK(single[0][0].start_of_sentence);
  CHECK(single[0][0].end_of_sentence);

  std::vector<LabelSet> short_injected(1);
  CHECK_THROWS_AS(assemble_token_features(t, m, &short_injected), Error);
}

TEST_CASE("token feature layout flattens in a fixed order") {
  TokenFeatureLayout layout;
  layout.injected_labels = {CodeLabel::GenderedPronoun, CodeLabel::Generalization};
  TokenFeatureRow row;
  row.embedding.assign(100, 0.5f);
  row.start_of_sentence = true;
  row.injected.insert(CodeLabel::Generalization);
  const auto flat = flatten(row, layout);
  REQUIRE(flat.size() == layout.width());
  CHECK(flat.size() == 105);
  CHECK(flat[100] == 1.0f);
  CHECK(flat[101] == 0.0f);
  CHECK(flat[102] == 1.0f);
  CHECK(flat[103] == 0.0f);
  CHECK(flat[104] == 1.0f);
}

TEST_CASE("document features encode presence and log count") {
  const auto d = make_description("d", "He said he and he left.");
  const auto tfidf = fit_tfidf(Corpus{d});
  const auto none = assemble_doc_features(d, tfidf, {CodeLabel::GenderedPronoun});
  CHECK(none.injected == std::vector<double>{0.0, 0.0});

  std::vector<PredictedSpan> spans;
  for (std::size_t s : {0, 8, 15}) spans.push_back({"d", span(s, s + 2, CodeLabel::GenderedPronoun), 0, Stage::Lc, 1.0});
  const auto three = assemble_doc_features(d, tfidf, {CodeLabel::GenderedPronoun}, spans);
  CHECK(three.injected[0] == 1.0);
  CHECK(three.injected[1] == std::log(4.0));

  spans[0].description_id = "other";
  CHECK_THROWS_AS(assemble_doc_features(d, tfidf, {CodeLabel::GenderedPronoun}, spans), Error);
}
