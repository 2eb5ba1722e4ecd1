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

#include <algorithm>
#include <map>
#include <set>

#include "biaslens/dashboard.hpp"
#include "biaslens/error.hpp"
#include "fixtures.hpp"

using namespace biaslens;
using biaslens::testing::make_description;
using biaslens::testing::span;

namespace {

PredictedSpan pred(const std::string& id, std::size_t s, std::size_t e, CodeLabel l, Stage stage = Stage::Lc) {
  return {id, span(s, e, l), 0, stage, 1.0};
}

Corpus fixture() {
  Corpus c;
  c.push_back(make_description("a", "He met his wife.", {}, "F1", {"English"}));
  c.push_back(make_description("b", "She and he left.", {}, "F2", {"English", "French"}));
  c.push_back(make_description("c", "The workmen met.", {}, "F2", {"French"}));
  c.push_back(make_description("d", "Nothing here.", {}, "F3", {"Latin"}));
  return c;
}

std::vector<PredictedSpan> fixture_predictions() {
  return {
      pred("a", 0, 2, CodeLabel::GenderedPronoun),
      pred("a", 7, 10, CodeLabel::GenderedPronoun),
      pred("a", 11, 15, CodeLabel::GenderedRole),
      pred("b", 0, 3, CodeLabel::GenderedPronoun),
      pred("b", 8, 10, CodeLabel::GenderedPronoun),
      pred("c", 4, 11, CodeLabel::Generalization),
      pred("a", 0, 16, CodeLabel::Omission, Stage::Osc),
      pred("b", 0, 16, CodeLabel::Omission, Stage::Osc),
      pred("b", 0, 16, CodeLabel::Stereotype, Stage::Osc),
      pred("c", 0, 16, CodeLabel::Stereotype, Stage::Osc),
  };
}

}  // namespace

TEST_CASE("fonds rankings sort by count then fonds id and match a group-by") {
  const auto corpus = fixture();
  const auto preds = fixture_predictions();
  const auto r = fonds_rankings(preds, corpus, CodeLabel::GenderedPronoun);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].fonds_id == "F1");
  CHECK(r.rows[0].count == 2);
  CHECK(r.rows[1].fonds_id == "F2");
  CHECK(r.rows[1].count == 2);
  CHECK(r.rows[0].fonds_title == "F1 Fonds");

  CHECK(fonds_rankings(preds, corpus, CodeLabel::Masculine).rows.empty());
  CHECK_THROWS_AS(fonds_rankings(preds, corpus, "Queen"), Error);
  CHECK(fonds_rankings(preds, corpus, "Stereotype").rows.front().fonds_id == "F2");
  CHECK(fonds_rankings(preds, corpus, CodeLabel::GenderedPronoun, 1).rows.size() == 1);
}

TEST_CASE("language table counts fonds, not descriptions") {
  const auto corpus = fixture();
  const std::vector<std::string> none;
  CHECK(language_table(corpus, none).empty());
  const std::vector<std::string> f2{"F2"};
  const auto t = language_table(corpus, f2);
  CHECK(t == std::vector<LanguageCount>{{"English", 1}, {"French", 1}});
  const std::vector<std::string> all{"F1", "F2", "F3"};
  const auto u = language_table(corpus, all);
  CHECK(u == std::vector<LanguageCount>{{"English", 2}, {"French", 1}, {"Latin", 1}});
}

TEST_CASE("bias breakdown buckets are disjoint and sum to the flagged total") {
  const auto corpus = fixture();
  const auto preds = fixture_predictions();
  const auto b = bias_breakdown(preds, corpus);
  CHECK(b.omission_only == 1);
  CHECK(b.both == 1);
  CHECK(b.stereotype_only == 1);
  std::set<std::string> flagged;
  for (const auto& p : preds) {
    if (p.stage == Stage::Osc) flagged.insert(p.description_id);
  }
  CHECK(b.flagged() == flagged.size());
  CHECK(b.words.at(CodeLabel::GenderedPronoun) == 4);
  CHECK(b.words.at(CodeLabel::GenderedRole) == 1);
  CHECK(b.words.at(CodeLabel::Generalization) == 1);
  CHECK(bias_breakdown({}, corpus).flagged() == 0);
}

TEST_CASE("quality chart percentages") {
  AgreementReport r;
  r.labels = {CodeLabel::Omission};
  r.counts[CodeLabel::Omission] = LabelCounts{3, 1, 3, 1, 5};
  const auto q = quality_chart(r);
  REQUIRE(q.size() == 1);
  CHECK(q[0].tp_percent + q[0].fp_percent + q[0].fn_percent + q[0].tn_percent == doctest::Approx(100.0));
  CHECK(q[0].tn_percent == doctest::Approx(50.0));
}

TEST_CASE("render is byte stable with one csv row per data row") {
  const auto corpus = fixture();
  const auto preds = fixture_predictions();
  const auto data = build_dashboard(preds, corpus, 10, &corpus);
  const auto a = render(data);
  const auto b = render(build_dashboard(preds, corpus, 10, &corpus));
  CHECK(a == b);
  std::map<std::string, std::string> files(a.begin(), a.end());
  const auto lines = [](const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); };
  CHECK(lines(files.at("rankings_GenderedPronoun.csv")) == 1 + 2);
  CHECK(lines(files.at("languages.csv")) == 1 + data.languages.size());
  for (const auto& [name, bytes] : a) {
    if (name.ends_with(".svg")) CHECK(bytes.starts_with("<svg"));
  }

  const auto empty = render(build_dashboard({}, corpus, 10));
  std::map<std::string, std::string> empty_files(empty.begin(), empty.end());
  CHECK(lines(empty_files.at("languages.csv")) == 1);
  CHECK(empty_files.at("rankings_Omission.svg").starts_with("<svg"));

  RenderFormats csv_only;
  csv_only.json = false;
  csv_only.svg = false;
  for (const auto& [name, bytes] : render(data, csv_only)) CHECK(name.ends_with(".csv"));
}
