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

#include "biaslens/error.hpp"
#include "biaslens/evaluation.hpp"
#include "fixtures.hpp"

using namespace biaslens;
using biaslens::testing::span;

namespace {

CorpusAnnotations one(std::vector<AnnotationSpan> spans) { return {{"d", std::move(spans)}}; }

}  // namespace

TEST_CASE("loose match examples") {
  const auto F = CodeLabel::Feminine;
  const std::vector<AnnotationSpan> exact{span(0, 5, F)};
  CHECK(loose_match(exact, exact, F) == LabelCounts{1, 0, 1, 0, 0});

  const std::vector<AnnotationSpan> shifted{span(4, 10, F)};
  CHECK(loose_match(exact, shifted, F).tp == 1);

  const std::vector<AnnotationSpan> touching{span(5, 10, F)};
  CHECK(loose_match(exact, touching, F).tp == 0);

  const std::vector<AnnotationSpan> pred{span(0, 3, F), span(10, 12, F)};
  const std::vector<AnnotationSpan> gold{span(2, 8, F)};
  const auto forward = loose_match(pred, gold, F);
  CHECK(forward.tp == 1);
  CHECK(forward.fp == 1);
  CHECK(forward.fn == 0);
  const auto swapped = loose_match(gold, pred, F);
  CHECK(swapped.tp == 1);
  CHECK(swapped.fp == 0);
  CHECK(swapped.fn == 1);

  const std::vector<AnnotationSpan> other{span(0, 5, CodeLabel::Masculine)};
  CHECK(loose_match(other, exact, F) == LabelCounts{0, 0, 0, 1, 0});
}

TEST_CASE("score identity and zero conventions") {
  const auto x = one({span(0, 4, CodeLabel::Feminine), span(6, 9, CodeLabel::Masculine)});
  const auto self = score(x, x, LabelSet{CodeLabel::Feminine, CodeLabel::Masculine});
  CHECK(self.macro == Prf{1, 1, 1});
  CHECK(self.micro == Prf{1, 1, 1});

  const auto empty = one({});
  const auto r = score(empty, x, LabelSet{CodeLabel::Feminine});
  CHECK(r.per_label.at(CodeLabel::Feminine) == Prf{0, 0, 0});
  CHECK(r.macro == Prf{0, 0, 0});

  const auto none = score(empty, empty, LabelSet{CodeLabel::Feminine});
  CHECK(none.per_label.at(CodeLabel::Feminine) == Prf{0, 0, 0});
  CHECK(none.macro_labels.empty());
  CHECK(none.to_json()["conventions"]["zero_division"] == "0");
}

TEST_CASE("macro averages only labels present in the reference") {
  const auto gold = one({span(0, 4, CodeLabel::Feminine)});
  const auto pred = one({span(0, 4, CodeLabel::Feminine), span(6, 9, CodeLabel::Masculine)});
  const auto r = score(pred, gold, LabelSet{CodeLabel::Feminine, CodeLabel::Masculine});
  CHECK(r.macro_labels == std::vector<CodeLabel>{CodeLabel::Feminine});
  CHECK(r.macro.f1 == 1.0);
  CHECK(r.micro.precision == 0.5);
}

TEST_CASE("document labels produce true negatives") {
  CorpusAnnotations gold{{"a", {span(0, 5, CodeLabel::Omission)}}, {"b", {}}, {"c", {}}};
  CorpusAnnotations pred{{"a", {span(0, 5, CodeLabel::Omission)}}, {"b", {span(0, 5, CodeLabel::Omission)}}, {"c", {}}};
  const auto r = score(pred, gold, LabelSet{CodeLabel::Omission, CodeLabel::Feminine});
  CHECK(r.counts.at(CodeLabel::Omission).tn == 1);
  CHECK(r.counts.at(CodeLabel::Omission).fp == 1);
  CHECK(r.to_json()["Omission"].contains("tn"));
  CHECK_FALSE(r.to_json()["Feminine"].contains("tn"));
}

TEST_CASE("score requires matching corpora") {
  CorpusAnnotations a{{"a", {}}};
  CorpusAnnotations b{{"b", {}}};
  CHECK_THROWS_AS(score(a, b, LabelSet{CodeLabel::Feminine}), Error);
}

TEST_CASE("adding a predicted span never lowers tp or raises fn") {
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    auto cfg = biaslens::testing::random_configuration(rng);
    for (auto label : cfg.labels) {
      const auto before = loose_match(cfg.predicted, cfg.reference, label);
      auto more = cfg.predicted;
      const auto a = rng.uniform_index(40);
      more.push_back(span(a, a + 1 + rng.uniform_index(5), label));
      const auto after = loose_match(more, cfg.reference, label);
      CHECK(after.tp >= before.tp);
      CHECK(after.fn <= before.fn);
    }
  }
}

TEST_CASE("pairwise agreement averages every unordered pair") {
  const auto F = CodeLabel::Feminine;
  std::map<std::string, CorpusAnnotations> two{{"a", one({span(0, 4, F)})}, {"b", one({span(0, 4, F)})}};
  CHECK(pairwise_iaa(two, LabelSet{F}).macro.f1 == 1.0);

  // Hand computed: a vs b: P=1/2 R=1/1 F1=2/3 ; a vs c: P=0 R=0 ; b vs c: P=1/1 R=1/2 F1=2/3
  std::map<std::string, CorpusAnnotations> three{
      {"a", one({span(0, 4, F)})},
      {"b", one({span(0, 4, F), span(10, 12, F)})},
      {"c", one({span(10, 12, F)})},
  };
  const auto r = pairwise_iaa(three, LabelSet{F});
  CHECK(r.pairs == 3);
  CHECK(r.per_label.at(F).precision == doctest::Approx((0.5 + 0.0 + 1.0) / 3));
  CHECK(r.per_label.at(F).recall == doctest::Approx((1.0 + 0.0 + 0.5) / 3));
  CHECK(r.per_label.at(F).f1 == doctest::Approx((2.0 / 3 + 0.0 + 2.0 / 3) / 3));

  std::map<std::string, CorpusAnnotations> lonely{{"a", one({})}};
  CHECK_THROWS_AS(pairwise_iaa(lonely, LabelSet{F}), Error);
}

TEST_CASE("coders against a reference") {
  const auto F = CodeLabel::Feminine;
  const auto reference = one({span(0, 4, F)});
  std::map<std::string, CorpusAnnotations> same{{"a", reference}};
  CHECK(coders_vs_reference(same, reference, LabelSet{F}).macro.f1 == 1.0);
  std::map<std::string, CorpusAnnotations> disjoint{{"a", one({span(10, 14, F)})}};
  CHECK(coders_vs_reference(disjoint, reference, LabelSet{F}).macro.f1 == 0.0);
  // a: F1 1 ; b: P=1/2 R=1 F1=2/3
  std::map<std::string, CorpusAnnotations> pair{{"a", reference}, {"b", one({span(0, 4, F), span(8, 9, F)})}};
  const auto r = coders_vs_reference(pair, reference, LabelSet{F});
  CHECK(r.pairs == 2);
  CHECK(r.per_label.at(F).f1 == doctest::Approx((1.0 + 2.0 / 3) / 2));
}
