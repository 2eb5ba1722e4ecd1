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
#include "biaslens/random_forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <string_view>
#include <thread>
#include <unordered_map>

#include "biaslens/error.hpp"
#include "biaslens/rng.hpp"

namespace biaslens {

void FeatureMatrix::append_row(std::span<const float> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(ErrorKind::FeatureShapeMismatch, "row width differs from matrix");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

nlohmann::json to_json(const ForestConfig& c) {
  return nlohmann::json{{"trees", c.trees},
                        {"max_features", c.max_features == 0 ? nlohmann::json("sqrt") : nlohmann::json(c.max_features)},
                        {"criterion", "gini"},
                        {"bootstrap", c.bootstrap},
                        {"min_samples_split", c.min_samples_split},
                        {"max_depth", c.max_depth == 0 ? nlohmann::json(nullptr) : nlohmann::json(c.max_depth)},
                        {"seed", c.seed}};
}

ForestConfig forest_config_from_json(const nlohmann::json& j) {
  ForestConfig c;
  c.trees = j.value("trees", c.trees);
  if (j.contains("max_features") && j.at("max_features").is_number()) c.max_features = j.at("max_features").get<std::size_t>();
  c.bootstrap = j.value("bootstrap", c.bootstrap);
  c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
  if (j.contains("max_depth") && j.at("max_depth").is_number()) c.max_depth = j.at("max_depth").get<std::size_t>();
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace {

// Training rows are deduplicated: identical feature vectors collapse into one
// unique row carrying per-class weights, which is equivalent to splitting
// on the duplicates themselves.
struct UniqueRows {
  FeatureMatrix x;
  std::vector<std::uint32_t> of_sample;  // sample index -> unique row
  std::vector<std::uint8_t> label;       // per sample
};

struct Weighted {
  std::uint32_t row;
  double pos;
  double neg;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const ForestConfig& config, std::size_t max_features)
      : x_(x), config_(config), max_features_(max_features) {}

  RandomForest::Tree build(std::vector<Weighted> samples, Rng& rng) {
    RandomForest::Tree tree;
    struct Task {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    samples_ = std::move(samples);
    tree.push_back({});
    std::vector<Task> stack{{0, 0, samples_.size(), 0}};
    std::vector<std::size_t> features(x_.cols());
    for (std::size_t f = 0; f < features.size(); ++f) features[f] = f;

    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      double pos = 0, neg = 0;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        pos += samples_[i].pos;
        neg += samples_[i].neg;
      }
      auto& leaf = tree[task.node];
      leaf.positive_fraction = static_cast<float>(pos / (pos + neg));
      const bool depth_capped = config_.max_depth != 0 && task.depth >= config_.max_depth;
      if (pos == 0 || neg == 0 || pos + neg < static_cast<double>(config_.min_samples_split) || depth_capped ||
          task.end - task.begin < 2) {
        continue;
      }
      const auto split = best_split(task.begin, task.end, features, rng);
      if (!split.found) continue;

      auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                samples_.begin() + static_cast<std::ptrdiff_t>(task.end),
                                [&](const Weighted& s) { return x_(s.row, split.feature) <= split.threshold; });
      const std::size_t m = static_cast<std::size_t>(mid - samples_.begin());
      const auto left = static_cast<std::uint32_t>(tree.size());
      tree.push_back({});
      tree.push_back({});
      tree[task.node].feature = static_cast<std::int32_t>(split.feature);
      tree[task.node].threshold = split.threshold;
      tree[task.node].left = left;
      tree[task.node].right = left + 1;
      stack.push_back({left + 1, m, task.end, task.depth + 1});
      stack.push_back({left, task.begin, m, task.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    float threshold = 0;
    double proxy = -1;
  };

  Split best_split(std::size_t begin, std::size_t end, std::vector<std::size_t>& features, Rng& rng) {
    Split best;
    std::vector<Weighted> local(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                samples_.begin() + static_cast<std::ptrdiff_t>(end));
    double total_pos = 0, total_neg = 0;
    for (const auto& s : local) {
      total_pos += s.pos;
      total_neg += s.neg;
    }
    // Draw features without replacement until max_features non-constant
    // ones have been examined (constant features do not count).
    std::size_t visited_informative = 0;
    for (std::size_t drawn = 0; drawn < features.size() && visited_informative < max_features_; ++drawn) {
      const std::size_t j = drawn + rng.uniform_index(features.size() - drawn);
      std::swap(features[drawn], features[j]);
      const std::size_t f = features[drawn];

      std::sort(local.begin(), local.end(), [&](const Weighted& a, const Weighted& b) {
        const float va = x_(a.row, f), vb = x_(b.row, f);
        return va < vb || (va == vb && a.row < b.row);
      });
      if (x_(local.front().row, f) == x_(local.back().row, f)) continue;
      ++visited_informative;

      double lp = 0, ln = 0;
      for (std::size_t i = 0; i + 1 < local.size(); ++i) {
        lp += local[i].pos;
        ln += local[i].neg;
        const float a = x_(local[i].row, f);
        const float b = x_(local[i + 1].row, f);
        if (a == b) continue;
        const double rp = total_pos - lp, rn = total_neg - ln;
        const double proxy = (lp * lp + ln * ln) / (lp + ln) + (rp * rp + rn * rn) / (rp + rn);
        if (proxy > best.proxy) {
          float t = a / 2.0f + b / 2.0f;
          if (t >= b || t < a) t = a;
          best = {true, f, t, proxy};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  const ForestConfig& config_;
  std::size_t max_features_;
  std::vector<Weighted> samples_;
};

UniqueRows deduplicate(const FeatureMatrix& x, std::span<const std::uint8_t> labels) {
  UniqueRows u;
  std::unordered_map<std::string_view, std::uint32_t> seen;
  seen.reserve(x.rows());
  u.of_sample.resize(x.rows());
  u.label.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    std::string_view key(reinterpret_cast<const char*>(r.data()), r.size_bytes());
    auto [it, inserted] = seen.emplace(key, static_cast<std::uint32_t>(u.x.rows()));
    if (inserted) u.x.append_row(r);
    u.of_sample[i] = it->second;
  }
  return u;
}

}  // namespace

RandomForest RandomForest::fit(const FeatureMatrix& x, std::span<const std::uint8_t> labels, const ForestConfig& config) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyTrainingSet, "random forest needs at least one row");
  if (labels.size() != x.rows()) {
    throw Error(ErrorKind::AlignmentError,
                std::to_string(labels.size()) + " labels for " + std::to_string(x.rows()) + " rows");
  }
  if (config.trees == 0) throw Error(ErrorKind::InvalidArgument, "forest needs at least one tree");

  const UniqueRows u = deduplicate(x, labels);
  const std::size_t max_features =
      config.max_features != 0
          ? std::min(config.max_features, x.cols())
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));

  RandomForest forest;
  forest.n_features_ = x.cols();
  forest.trees_.resize(config.trees);

  const auto build_tree = [&](std::size_t t) {
    Rng rng(mix_seed(config.seed, t));
    std::vector<double> pos(u.x.rows(), 0.0), neg(u.x.rows(), 0.0);
    const std::size_t n = x.rows();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = config.bootstrap ? rng.uniform_index(n) : i;
      (u.label[s] ? pos : neg)[u.of_sample[s]] += 1.0;
    }
    std::vector<Weighted> samples;
    for (std::uint32_t r = 0; r < u.x.rows(); ++r) {
      if (pos[r] + neg[r] > 0) samples.push_back({r, pos[r], neg[r]});
    }
    TreeBuilder builder(u.x, config, max_features);
    forest.trees_[t] = builder.build(std::move(samples), rng);
  };

  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.trees);
  if (workers == 1) {
    for (std::size_t t = 0; t < config.trees; ++t) build_tree(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < config.trees;) build_tree(t);
      });
    }
  }
  return forest;
}

double RandomForest::vote_fraction(std::span<const float> row) const {
  if (row.size() != n_features_) {
    throw Error(ErrorKind::FeatureShapeMismatch,
                "row has " + std::to_string(row.size()) + " features, forest expects " + std::to_string(n_features_));
  }
  if (trees_.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto& tree : trees_) {
    std::uint32_t node = 0;
    while (tree[node].feature >= 0) {
      node = row[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    if (tree[node].positive_fraction > 0.5f) ++votes;
  }
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

bool RandomForest::predict(std::span<const float> row) const { return vote_fraction(row) > 0.5; }

void RandomForest::write(BinaryWriter& w) const {
  w.put<std::uint64_t>(n_features_);
  w.put<std::uint64_t>(trees_.size());
  for (const auto& tree : trees_) {
    w.put<std::uint64_t>(tree.size());
    for (const auto& n : tree) {
      w.put<std::int32_t>(n.feature);
      w.put<float>(n.threshold);
      w.put<std::uint32_t>(n.left);
      w.put<std::uint32_t>(n.right);
      w.put<float>(n.positive_fraction);
    }
  }
}

RandomForest RandomForest::read(BinaryReader& r) {
  RandomForest f;
  f.n_features_ = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto nodes = r.get<std::uint64_t>();
    if (nodes == 0 || nodes > r.remaining()) throw Error(ErrorKind::FormatError, "corrupt tree");
    Tree tree(nodes);
    for (auto& n : tree) {
      n.feature = r.get<std::int32_t>();
      n.threshold = r.get<float>();
      n.left = r.get<std::uint32_t>();
      n.right = r.get<std::uint32_t>();
      n.positive_fraction = r.get<float>();
      if (n.feature >= 0 && (static_cast<std::size_t>(n.feature) >= f.n_features_ || n.left >= nodes || n.right >= nodes)) {
        throw Error(ErrorKind::FormatError, "corrupt tree node");
      }
    }
    f.trees_.push_back(std::move(tree));
  }
  return f;
}

}  // namespace biaslens
