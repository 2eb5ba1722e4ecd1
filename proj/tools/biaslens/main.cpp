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
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "biaslens/error.hpp"
#include "commands.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("biaslens");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("BIASLENS_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  namespace cli = biaslens::cli;
  cli::Options o;

  CLI::App app{"Flag gendered and gender-biased language in archival catalog descriptions."};
  app.require_subcommand(1);

  const auto corpus = [&](CLI::App* c, bool required = true) {
    auto* opt = c->add_option("--corpus", o.corpus, "Corpus JSONL");
    if (required) opt->required();
    c->add_flag("--strip-field-prefix", o.strip_field_prefix, "Strip a leading metadata field name from texts");
  };
  const auto out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output directory")->required(); };
  const auto cascade = [&](CLI::App* c) {
    c->add_option("--variant", o.variant, "baseline, c1, c2 or c3")
        ->check(CLI::IsMember({"baseline", "c1", "c2", "c3"}));
    c->add_option("--policy", o.policy, "Upstream features for downstream training")
        ->check(CLI::IsMember({"same-training-folds", "nested", "gold"}));
    c->add_option("--seed", o.seed, "Seed for every random choice");
    c->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  };

  std::function<int(const cli::Options&)> command;
  const auto bind = [&](CLI::App* c, int (*fn)(const cli::Options&)) {
    c->callback([&command, fn] { command = fn; });
  };

  auto* embed = app.add_subcommand("embed", "Train subword embeddings on a corpus");
  corpus(embed);
  out(embed);
  embed->add_option("--seed", o.seed, "Seed");
  bind(embed, cli::embed);

  auto* train = app.add_subcommand("train", "Train one cascade on a whole corpus");
  corpus(train);
  out(train);
  cascade(train);
  bind(train, cli::train);

  auto* predict = app.add_subcommand("predict", "Predict a corpus with a trained model directory");
  corpus(predict);
  out(predict);
  predict->add_option("--model", o.model, "Model directory written by train")->required();
  bind(predict, cli::predict);

  auto* crossval = app.add_subcommand("crossval", "Cross-validated cascade over a corpus");
  corpus(crossval);
  out(crossval);
  cascade(crossval);
  crossval->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1000));
  crossval->add_flag("--save-models", o.save_models, "Also write each fold's models");
  bind(crossval, cli::crossval);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a gold corpus");
  evaluate->add_option("files", o.files, "PREDICTIONS GOLD")->expected(2)->required();
  evaluate->add_option("--out", o.out, "Also write metrics.json here");
  evaluate->add_flag("--strip-field-prefix", o.strip_field_prefix, "Strip a leading metadata field name from texts");
  bind(evaluate, cli::evaluate);

  auto* iaa = app.add_subcommand("iaa", "Pairwise agreement between annotation files");
  iaa->add_option("files", o.files, "Annotation files, one per coder")->required();
  iaa->add_option("--reference", o.reference, "Also score each coder against this corpus");
  iaa->add_option("--out", o.out, "Also write iaa.json here");
  bind(iaa, cli::iaa);

  auto* dashboard = app.add_subcommand("dashboard", "Render rankings, language tables and charts");
  corpus(dashboard);
  out(dashboard);
  dashboard->add_option("--run", o.run, "Directory written by crossval")->required();
  dashboard->add_option("--top-n", o.top_n, "Fonds per ranking")->check(CLI::PositiveNumber);
  bind(dashboard, cli::dashboard);

  auto* serve = app.add_subcommand("serve", "Serve the review workflow over HTTP");
  corpus(serve);
  out(serve);
  serve->add_option("--run", o.run, "Directory written by crossval");
  serve->add_option("--listen", o.listen, "host:port (port 0 picks a free one)");
  serve->add_option("--decisions", o.decisions, "Decision log (default <out>/decisions.jsonl)");
  serve->add_option("--ui-dir", o.ui_dir, "Static UI assets served under /ui");
  bind(serve, cli::serve);

  auto* review_export = app.add_subcommand("review-export", "Merge accepted review decisions into a corpus");
  corpus(review_export);
  out(review_export);
  review_export->add_option("--decisions", o.decisions, "Decision log")->required();
  bind(review_export, cli::review_export);

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with planted codes");
  out(synth);
  synth->add_option("--descriptions", o.descriptions, "Number of descriptions")->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Seed");
  bind(synth, cli::synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    return command ? command(o) : kOk;
  } catch (const biaslens::Error& e) {
    spdlog::error("{}", e.what());
    return e.is_validation() ? kValidationError : kRuntimeError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeError;
  }
}
