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
#include "biaslens/dashboard.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "biaslens/error.hpp"
#include "biaslens/tokenizer.hpp"

namespace biaslens {

namespace {

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Bar {
  std::string name;
  std::vector<double> values;
};

// Horizontal bar chart; stacked when bars carry several values.
std::string bar_chart(std::string_view title, const std::vector<std::string>& series, const std::vector<Bar>& bars) {
  static constexpr const char* kColors[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"};
  constexpr int kLabelWidth = 260;
  constexpr int kPlotWidth = 400;
  constexpr int kRow = 22;
  constexpr int kTop = 40;
  double max_total = 0.0;
  for (const auto& b : bars) {
    double t = 0.0;
    for (double v : b.values) t += v;
    max_total = std::max(max_total, t);
  }
  const int legend = series.size() > 1 ? 24 : 0;
  const int height = kTop + static_cast<int>(bars.size()) * kRow + legend + 20;
  const int width = kLabelWidth + kPlotWidth + 80;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                  std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<text x=\"10\" y=\"22\" font-size=\"15\">" + xml_escape(title) + "</text>\n";
  if (bars.empty()) s += "<text x=\"10\" y=\"" + std::to_string(kTop + 14) + "\">no data</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const int y = kTop + static_cast<int>(i) * kRow;
    s += "<text x=\"" + std::to_string(kLabelWidth - 6) + "\" y=\"" + std::to_string(y + 14) +
         "\" text-anchor=\"end\">" + xml_escape(bars[i].name) + "</text>\n";
    double x = kLabelWidth;
    double total = 0.0;
    for (std::size_t k = 0; k < bars[i].values.size(); ++k) {
      const double w = max_total > 0 ? bars[i].values[k] / max_total * kPlotWidth : 0.0;
      s += "<rect x=\"" + fmt(x) + "\" y=\"" + std::to_string(y + 3) + "\" width=\"" + fmt(w) +
           "\" height=\"16\" fill=\"" + kColors[k % 6] + "\"/>\n";
      x += w;
      total += bars[i].values[k];
    }
    s += "<text x=\"" + fmt(x + 4) + "\" y=\"" + std::to_string(y + 14) + "\">" + fmt(total, total == static_cast<long long>(total) ? 0 : 2) + "</text>\n";
  }
  if (series.size() > 1) {
    int x = 10;
    const int y = kTop + static_cast<int>(bars.size()) * kRow + 10;
    for (std::size_t k = 0; k < series.size(); ++k) {
      s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"12\" height=\"12\" fill=\"" +
           kColors[k % 6] + "\"/>\n";
      s += "<text x=\"" + std::to_string(x + 16) + "\" y=\"" + std::to_string(y + 11) + "\">" + xml_escape(series[k]) +
           "</text>\n";
      x += 16 + 8 * static_cast<int>(series[k].size()) + 16;
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

FondsRanking fonds_rankings(std::span<const PredictedSpan> predictions, const Corpus& corpus, CodeLabel label,
                            std::size_t n) {
  std::unordered_map<std::string_view, const Description*> by_id;
  for (const auto& d : corpus) by_id.emplace(d.id, &d);
  std::map<std::string, FondsRankingRow, std::less<>> counts;
  for (const auto& p : predictions) {
    if (p.span.label != label) continue;
    const auto it = by_id.find(p.description_id);
    if (it == by_id.end()) throw Error(ErrorKind::CorpusMismatch, "prediction for unknown description '" + p.description_id + "'");
    auto& row = counts[it->second->fonds_id];
    row.fonds_id = it->second->fonds_id;
    if (row.fonds_title.empty()) row.fonds_title = it->second->fonds_title;
    ++row.count;
  }
  FondsRanking out;
  out.label = label;
  for (auto& [id, row] : counts) out.rows.push_back(std::move(row));
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const FondsRankingRow& a, const FondsRankingRow& b) { return a.count > b.count; });
  if (out.rows.size() > n) out.rows.resize(n);
  return out;
}

FondsRanking fonds_rankings(std::span<const PredictedSpan> predictions, const Corpus& corpus, std::string_view label,
                            std::size_t n) {
  return fonds_rankings(predictions, corpus, require_label(label), n);
}

std::vector<LanguageCount> language_table(const Corpus& corpus, std::span<const std::string> fonds_ids) {
  const std::set<std::string, std::less<>> wanted(fonds_ids.begin(), fonds_ids.end());
  std::map<std::string, std::set<std::string>> fonds_by_language;
  for (const auto& d : corpus) {
    if (!wanted.contains(d.fonds_id)) continue;
    for (const auto& lang : d.languages) fonds_by_language[lang].insert(d.fonds_id);
  }
  std::vector<LanguageCount> out;
  for (const auto& [lang, fonds] : fonds_by_language) out.push_back({lang, fonds.size()});
  std::stable_sort(out.begin(), out.end(), [](const LanguageCount& a, const LanguageCount& b) { return a.fonds > b.fonds; });
  return out;
}

BiasBreakdown bias_breakdown(std::span<const PredictedSpan> predictions, const Corpus& corpus) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus[i].id, i);
  std::vector<LabelSet> doc_labels(corpus.size());
  std::vector<std::vector<const AnnotationSpan*>> linguistic(corpus.size());
  for (const auto& p : predictions) {
    const auto it = index.find(p.description_id);
    if (it == index.end()) throw Error(ErrorKind::CorpusMismatch, "prediction for unknown description '" + p.description_id + "'");
    if (is_document_label(p.span.label)) doc_labels[it->second].insert(p.span.label);
    if (category_of(p.span.label) == Category::Linguistic) linguistic[it->second].push_back(&p.span);
  }
  BiasBreakdown out;
  for (auto l : kLinguisticLabels) out.words[l] = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const bool o = doc_labels[i].contains(CodeLabel::Omission);
    const bool s = doc_labels[i].contains(CodeLabel::Stereotype);
    if (o && s) {
      ++out.both;
    } else if (o) {
      ++out.omission_only;
    } else if (s) {
      ++out.stereotype_only;
    }
    if (linguistic[i].empty()) continue;
    const auto t = tokenize(corpus[i].text);
    for (auto l : kLinguisticLabels) {
      for (const auto& tok : t.tokens) {
        const bool covered = std::any_of(linguistic[i].begin(), linguistic[i].end(), [&](const AnnotationSpan* sp) {
          return sp->label == l && sp->start < tok.end && tok.start < sp->end;
        });
        if (covered) ++out.words[l];
      }
    }
  }
  return out;
}

std::vector<QualityRow> quality_chart(const AgreementReport& report) {
  std::vector<QualityRow> out;
  for (auto label : report.labels) {
    QualityRow r;
    r.label = label;
    r.counts = report.counts.at(label);
    const double total = static_cast<double>(r.counts.tp + r.counts.fp + r.counts.fn + r.counts.tn);
    if (total > 0) {
      r.tp_percent = 100.0 * static_cast<double>(r.counts.tp) / total;
      r.fp_percent = 100.0 * static_cast<double>(r.counts.fp) / total;
      r.fn_percent = 100.0 * static_cast<double>(r.counts.fn) / total;
      r.tn_percent = 100.0 * static_cast<double>(r.counts.tn) / total;
    }
    out.push_back(r);
  }
  return out;
}

DashboardData build_dashboard(std::span<const PredictedSpan> predictions, const Corpus& corpus, std::size_t top_n,
                              const Corpus* gold) {
  DashboardData data;
  std::set<std::string> ranked;
  for (auto label : kAllLabels) {
    data.rankings.push_back(fonds_rankings(predictions, corpus, label, top_n));
    for (const auto& row : data.rankings.back().rows) ranked.insert(row.fonds_id);
  }
  const std::vector<std::string> fonds(ranked.begin(), ranked.end());
  data.languages = language_table(corpus, fonds);
  data.breakdown = bias_breakdown(predictions, corpus);
  if (gold) {
    const auto report = score(annotations_of(predictions, *gold), annotations_of(*gold), LabelSet(kAllLabels));
    data.quality = quality_chart(report);
  }
  return data;
}

std::vector<std::pair<std::string, std::string>> render(const DashboardData& data, const RenderFormats& formats) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& r : data.rankings) {
    const std::string label(to_string(r.label));
    if (formats.csv) {
      std::string csv = "rank,fonds_id,fonds_title,count\n";
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        csv += std::to_string(i + 1) + "," + csv_field(r.rows[i].fonds_id) + "," + csv_field(r.rows[i].fonds_title) +
               "," + std::to_string(r.rows[i].count) + "\n";
      }
      files.emplace_back("rankings_" + label + ".csv", std::move(csv));
    }
    if (formats.svg) {
      std::vector<Bar> bars;
      for (const auto& row : r.rows) {
        bars.push_back({row.fonds_title.empty() ? row.fonds_id : row.fonds_title, {static_cast<double>(row.count)}});
      }
      files.emplace_back("rankings_" + label + ".svg", bar_chart("Fonds with the most " + label + " codes", {label}, bars));
    }
  }
  if (formats.csv) {
    std::string csv = "language,fonds\n";
    for (const auto& l : data.languages) csv += csv_field(l.language) + "," + std::to_string(l.fonds) + "\n";
    files.emplace_back("languages.csv", std::move(csv));
  }
  if (formats.svg) {
    std::vector<Bar> bars;
    for (const auto& l : data.languages) bars.push_back({l.language, {static_cast<double>(l.fonds)}});
    files.emplace_back("languages.svg", bar_chart("Languages of the ranked fonds", {"fonds"}, bars));
  }

  const auto& b = data.breakdown;
  if (formats.json) {
    nlohmann::json words = nlohmann::json::object();
    for (const auto& [label, n] : b.words) words[std::string(to_string(label))] = n;
    const nlohmann::json j = {{"stereotype_only", b.stereotype_only},
                              {"both", b.both},
                              {"omission_only", b.omission_only},
                              {"flagged", b.flagged()},
                              {"words", words}};
    files.emplace_back("breakdown.json", j.dump(2) + "\n");
  }
  if (formats.svg) {
    std::vector<Bar> bars = {{"Stereotype only", {static_cast<double>(b.stereotype_only)}},
                             {"Omission and Stereotype", {static_cast<double>(b.both)}},
                             {"Omission only", {static_cast<double>(b.omission_only)}}};
    for (const auto& [label, n] : b.words) bars.push_back({std::string(to_string(label)) + " words", {static_cast<double>(n)}});
    files.emplace_back("breakdown.svg", bar_chart("Gender biased descriptions and gendered words", {"count"}, bars));
  }

  if (formats.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& q : data.quality) {
      nlohmann::json row = {{"label", to_string(q.label)},
                            {"tp", q.counts.tp},
                            {"fp", q.counts.fp},
                            {"fn", q.counts.fn},
                            {"tn", q.counts.tn},
                            {"tp_percent", q.tp_percent},
                            {"fp_percent", q.fp_percent},
                            {"fn_percent", q.fn_percent},
                            {"tn_percent", q.tn_percent}};
      rows.push_back(std::move(row));
    }
    files.emplace_back("quality.json", nlohmann::json{{"labels", rows}}.dump(2) + "\n");
  }
  if (formats.svg) {
    std::vector<Bar> bars;
    for (const auto& q : data.quality) {
      bars.push_back({std::string(to_string(q.label)),
                      {static_cast<double>(q.counts.tp), static_cast<double>(q.counts.fp),
                       static_cast<double>(q.counts.fn), static_cast<double>(q.counts.tn)}});
    }
    files.emplace_back("quality.svg",
                       bar_chart("Model agreement with the gold annotations",
                                 {"true positive", "false positive", "false negative", "true negative"}, bars));
  }
  return files;
}

}  // namespace biaslens
