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
#include "biaslens/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biaslens/rng.hpp"
#include "biaslens/text.hpp"

namespace biaslens {

namespace {

struct Title {
  std::string_view text;
  CodeLabel label;
};

constexpr std::array kTitles = {
    Title{"Mrs.", CodeLabel::Feminine},  Title{"Miss", CodeLabel::Feminine}, Title{"Lady", CodeLabel::Feminine},
    Title{"Mr.", CodeLabel::Masculine},  Title{"Sir", CodeLabel::Masculine}, Title{"Lord", CodeLabel::Masculine},
    Title{"Dr.", CodeLabel::Unknown},    Title{"Prof.", CodeLabel::Unknown}, Title{"Mx", CodeLabel::NonBinary},
};

constexpr std::array<std::string_view, 40> kSurnames = {
    "MacDonald", "Campbell", "Fraser",  "Chisholm", "Murray",   "Sinclair", "Cameron", "MacLeod",
    "Gillis",    "Boudreau", "LeBlanc", "Arsenault", "Comeau",  "Doucet",   "Gagnon",  "Tremblay",
    "Bergeron",  "Cormier",  "Landry",  "Richard",  "Morrison", "Ferguson", "Grant",   "Stewart",
    "MacIsaac",  "Beaton",   "Rankin",  "Walsh",    "O'Brien",  "Kennedy",  "Harvey",  "Dunn",
    "Young",     "Archibald", "Bishop", "Crowell",  "Eisenhauer", "Hirtle", "Zwicker", "Pelletier",
};

constexpr std::array<std::string_view, 6> kSubjectPronouns = {"he", "she", "he", "she", "he", "she"};
constexpr std::array<std::string_view, 2> kObjectPronouns = {"him", "her"};
constexpr std::array<std::string_view, 2> kPossessivePronouns = {"his", "her"};
constexpr std::array<std::string_view, 10> kRoles = {"husband", "mother", "father", "son",    "daughter",
                                                     "sister",  "brother", "widow", "nephew", "niece"};
constexpr std::array<std::string_view, 6> kGeneralizations = {"mankind", "workmen", "sportsmen",
                                                              "forefathers", "laymen", "servicemen"};
constexpr std::array<std::string_view, 11> kOccupations = {
    "engineer", "teacher", "surgeon", "merchant", "architect",    "minister",
    "nurse",    "lawyer",  "farmer",  "civil servant", "ship captain"};
constexpr std::array<std::string_view, 11> kTopics = {
    "agriculture", "shipping",     "education",   "the railway", "temperance", "the harbour",
    "local history", "church affairs", "public health", "the fishery", "the war effort"};
constexpr std::array<std::string_view, 10> kPlaces = {"Halifax", "Montréal", "Trois-Rivières", "Sydney", "Antigonish",
                                                      "Edinburgh", "Glasgow", "Québec", "Lunenburg", "Pictou"};
constexpr std::array<std::string_view, 5> kStereotypes = {"hysterical", "bossy", "meek and frail", "the weaker sex",
                                                          "shrill"};
constexpr std::array<std::string_view, 6> kFondsNames = {"Papers", "Fonds", "Collection", "Records", "Family papers",
                                                         "Photographs"};
constexpr std::array<std::string_view, 5> kLanguages = {"English", "French", "Gaelic", "Latin", "German"};

constexpr std::array<std::string_view, 13> kSentences = {
    "Correspondence between {PERSON} and {PERSON} concerning {TOPIC}.",
    "{PERSON} worked as {A_OCC} in {PLACE} from {YEAR} to {YEAR}.",
    "The fonds contains letters written by {PERSON} to {POS} {ROLE}.",
    "Records relating to {TOPIC} in {PLACE}.",
    "Photographs of {GENERAL} at work in {PLACE}.",
    "Minutes of meetings held in {PLACE} in {YEAR}.",
    "{PERSON} donated the collection in {YEAR}.",
    "Diaries kept by {PERSON} describe {POS} travels to {PLACE}.",
    "Includes notes on {TOPIC} and {TOPIC}.",
    "After {POS} retirement {SUBJ} moved to {PLACE}.",
    "Letters to {OBJ} from the {OCC} of {PLACE}.",
    "Materials document the role of {GENERAL} in {TOPIC}.",
    "Processed by {PERSON} in {YEAR}.",
};

constexpr std::array<std::string_view, 2> kOmissionSentences = {
    "{PERSON} travelled with his wife to {PLACE}.",
    "Also includes papers of the wife of {PERSON}.",
};

constexpr std::array<std::string_view, 2> kStereotypeSentences = {
    "Reports portray {GENERAL} as {STEREO}.",
    "The {OCC} was described as {STEREO} by {PERSON}.",
};

class TextBuilder {
 public:
  void add(std::string_view s, std::optional<CodeLabel> label = std::nullopt) {
    const std::size_t start = length_;
    text_ += s;
    length_ += text::scalar_length(s);
    if (label) spans_.push_back({start, length_, *label, AnnotationSource::aggregate()});
  }
  std::size_t length() const { return length_; }
  std::string& text() { return text_; }
  std::vector<AnnotationSpan>& spans() { return spans_; }

 private:
  std::string text_;
  std::size_t length_ = 0;
  std::vector<AnnotationSpan> spans_;
};

template <class A>
std::string_view pick(Rng& rng, const A& options) {
  return options[rng.uniform_index(options.size())];
}

void fill(TextBuilder& b, Rng& rng, std::string_view tmpl) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      std::size_t j = tmpl.find('{', i);
      if (j == std::string_view::npos) j = tmpl.size();
      std::string_view lit = tmpl.substr(i, j - i);
      // "his wife" inside a template is coded like the slot words.
      while (!lit.empty()) {
        const auto his = lit.find("his wife");
        const auto wife = lit.find("wife");
        if (his != std::string_view::npos && his <= wife) {
          b.add(lit.substr(0, his));
          b.add("his", CodeLabel::GenderedPronoun);
          b.add(" ");
          b.add("wife", CodeLabel::GenderedRole);
          lit.remove_prefix(his + 8);
        } else if (wife != std::string_view::npos) {
          b.add(lit.substr(0, wife));
          b.add("wife", CodeLabel::GenderedRole);
          lit.remove_prefix(wife + 4);
        } else {
          b.add(lit);
          lit = {};
        }
      }
      i = j;
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    const std::string_view slot = tmpl.substr(i + 1, close - i - 1);
    i = close + 1;
    if (slot == "PERSON") {
      // NonBinary titles are rare.
      std::size_t t = rng.uniform_index(kTitles.size() * 4);
      t = t < (kTitles.size() - 1) * 4 ? t / 4 : kTitles.size() - 1;
      const std::string person = std::string(kTitles[t].text) + " " + std::string(pick(rng, kSurnames));
      b.add(person, kTitles[t].label);
    } else if (slot == "SUBJ") {
      b.add(pick(rng, kSubjectPronouns), CodeLabel::GenderedPronoun);
    } else if (slot == "OBJ") {
      b.add(pick(rng, kObjectPronouns), CodeLabel::GenderedPronoun);
    } else if (slot == "POS") {
      b.add(pick(rng, kPossessivePronouns), CodeLabel::GenderedPronoun);
    } else if (slot == "ROLE") {
      b.add(pick(rng, kRoles), CodeLabel::GenderedRole);
    } else if (slot == "GENERAL") {
      b.add(pick(rng, kGeneralizations), CodeLabel::Generalization);
    } else if (slot == "OCC" || slot == "A_OCC") {
      const auto occ = pick(rng, kOccupations);
      if (slot == "A_OCC") {
        const bool vowel = std::string_view("aeiou").find(occ.front()) != std::string_view::npos;
        b.add(vowel ? "an " : "a ");
      }
      b.add(occ, CodeLabel::Occupation);
    } else if (slot == "TOPIC") {
      b.add(pick(rng, kTopics));
    } else if (slot == "PLACE") {
      b.add(pick(rng, kPlaces));
    } else if (slot == "YEAR") {
      b.add(std::to_string(1850 + rng.uniform_index(131)));
    } else if (slot == "STEREO") {
      b.add(pick(rng, kStereotypes));
    }
  }
}

char fonds_code(std::size_t i) { return static_cast<char>('A' + i % 26); }

}  // namespace

Corpus synthetic_corpus(const SyntheticOptions& options) {
  Rng rng(options.seed);
  const std::size_t n_fonds = std::max<std::size_t>(options.fonds, 1);

  struct Fonds {
    std::string id;
    std::string title;
    std::vector<std::string> languages;
  };
  std::vector<Fonds> fonds;
  for (std::size_t f = 0; f < n_fonds; ++f) {
    Fonds fd;
    char id[32];
    std::snprintf(id, sizeof id, "F%03zu", f + 1);
    fd.id = id;
    fd.title = std::string(kSurnames[(f * 7) % kSurnames.size()]) + " " + std::string(kFondsNames[f % kFondsNames.size()]) +
               " " + fonds_code(f);
    fd.languages.emplace_back(kLanguages[f % 2]);
    if (f % 3 == 0) fd.languages.emplace_back(kLanguages[2 + f % 3]);
    fonds.push_back(std::move(fd));
  }

  Corpus corpus;
  corpus.reserve(options.descriptions);
  for (std::size_t i = 0; i < options.descriptions; ++i) {
    const auto& fd = fonds[rng.uniform_index(fonds.size())];
    Description d;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", i + 1);
    d.id = id;
    d.fonds_id = fd.id;
    d.fonds_title = fd.title;
    d.field = static_cast<MetadataField>(rng.uniform_index(4));
    d.languages = fd.languages;

    std::vector<std::string_view> templates;
    const std::size_t plain = 1 + rng.uniform_index(3);
    for (std::size_t k = 0; k < plain; ++k) templates.push_back(pick(rng, kSentences));
    const bool omission = rng.uniform() < options.omission_rate;
    const bool stereotype = rng.uniform() < options.stereotype_rate;
    if (omission) templates.insert(templates.begin() + rng.uniform_index(templates.size() + 1), pick(rng, kOmissionSentences));
    if (stereotype) {
      templates.insert(templates.begin() + rng.uniform_index(templates.size() + 1), pick(rng, kStereotypeSentences));
    }

    TextBuilder b;
    for (std::size_t k = 0; k < templates.size(); ++k) {
      if (k > 0) b.add(" ");
      fill(b, rng, templates[k]);
    }
    d.annotations = std::move(b.spans());
    if (omission) d.annotations.push_back({0, b.length(), CodeLabel::Omission, AnnotationSource::aggregate()});
    if (stereotype) d.annotations.push_back({0, b.length(), CodeLabel::Stereotype, AnnotationSource::aggregate()});
    d.text = std::move(b.text());
    corpus.push_back(std::move(d));
  }
  return corpus;
}

}  // namespace biaslens
