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
#include "biaslens/folds.hpp"

#include <set>

#include "biaslens/error.hpp"
#include "biaslens/rng.hpp"

namespace biaslens {

std::size_t FoldAssignment::fold_of(const std::string& id) const {
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (const auto& x : folds[f]) {
      if (x == id) return f;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "description '" + id + "' is in no fold");
}

FoldAssignment make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "fold count must be at least 2");
  if (corpus.size() < k) {
    throw Error(ErrorKind::TooFewDescriptions,
                std::to_string(corpus.size()) + " descriptions for " + std::to_string(k) + " folds");
  }
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& d : corpus) ids.push_back(d.id);
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.folds.resize(k);
  const std::size_t base = ids.size() / k;
  const std::size_t extra = ids.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out.folds[f].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                        ids.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return out;
}

void validate_folds(const FoldAssignment& folds, const Corpus& corpus) {
  if (folds.folds.size() != folds.k) throw Error(ErrorKind::InvalidArgument, "fold count mismatch");
  std::set<std::string> seen;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& f : folds.folds) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
    for (const auto& id : f) {
      if (!seen.insert(id).second) throw Error(ErrorKind::InvalidArgument, "id '" + id + "' in two folds");
    }
  }
  if (hi - lo > 1) throw Error(ErrorKind::InvalidArgument, "fold sizes differ by more than one");
  if (seen.size() != corpus.size()) throw Error(ErrorKind::InvalidArgument, "folds do not cover the corpus");
  for (const auto& d : corpus) {
    if (!seen.contains(d.id)) throw Error(ErrorKind::InvalidArgument, "id '" + d.id + "' missing from folds");
  }
}

nlohmann::json to_json(const FoldAssignment& folds) {
  return nlohmann::json{{"k", folds.k}, {"seed", folds.seed}, {"folds", folds.folds}};
}

FoldAssignment folds_from_json(const nlohmann::json& j) {
  FoldAssignment f;
  try {
    f.k = j.at("k").get<std::size_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.folds = j.at("folds").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("fold file: ") + e.what());
  }
  return f;
}

}  // namespace biaslens
