// Copyright 2026 The synth-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synth_audit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "synth_audit/rng.hpp"
#include "synth_audit/stats.hpp"

namespace synth_audit {

namespace {

void softmax_inplace(std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double gini(const std::vector<double>& counts, double total) {
  double g = 1.0;
  for (const double c : counts) {
    const double p = c / total;
    g -= p * p;
  }
  return g;
}

}  // namespace

//===----------------------------------------------------------------------===//
// LogisticRegression
//===----------------------------------------------------------------------===//

void LogisticRegression::fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
                             const LogisticRegressionConfig& cfg) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw std::invalid_argument("LogisticRegression::fit: bad shapes");
  }
  if (n_classes < 2) throw std::invalid_argument("LogisticRegression::fit: need >= 2 classes");
  n_classes_ = n_classes;
  dims_ = x.dims;
  weights_.assign(n_classes_ * dims_, 0.0);
  bias_.assign(n_classes_, 0.0);

  const double n = static_cast<double>(x.rows);
  std::vector<double> probs(n_classes_);
  std::vector<double> grad_w(n_classes_ * dims_);
  std::vector<double> grad_b(n_classes_);
  for (int it = 0; it < cfg.iterations; ++it) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (size_t r = 0; r < x.rows; ++r) {
      const auto row = x.row(r);
      for (size_t c = 0; c < n_classes_; ++c) {
        double z = bias_[c];
        const double* w = &weights_[c * dims_];
        for (size_t d = 0; d < dims_; ++d) z += w[d] * row[d];
        probs[c] = z;
      }
      softmax_inplace(probs);
      probs[static_cast<size_t>(y[r])] -= 1.0;
      for (size_t c = 0; c < n_classes_; ++c) {
        const double g = probs[c] / n;
        if (g == 0.0) continue;
        double* gw = &grad_w[c * dims_];
        for (size_t d = 0; d < dims_; ++d) gw[d] += g * row[d];
        grad_b[c] += g;
      }
    }
    for (size_t i = 0; i < weights_.size(); ++i) {
      weights_[i] -= cfg.learning_rate * (grad_w[i] + cfg.l2 * weights_[i]);
    }
    for (size_t c = 0; c < n_classes_; ++c) {
      bias_[c] -= cfg.learning_rate * grad_b[c];
    }
  }
}

std::vector<double> LogisticRegression::predict_proba(std::span<const double> row) const {
  if (row.size() != dims_) throw std::invalid_argument("LogisticRegression: dims mismatch");
  std::vector<double> logits(n_classes_);
  for (size_t c = 0; c < n_classes_; ++c) {
    double z = bias_[c];
    const double* w = &weights_[c * dims_];
    for (size_t d = 0; d < dims_; ++d) z += w[d] * row[d];
    logits[c] = z;
  }
  softmax_inplace(logits);
  return logits;
}

//===----------------------------------------------------------------------===//
// NaiveBayes
//===----------------------------------------------------------------------===//

void NaiveBayes::fit(const Table& train, size_t target_col) {
  if (train.is_numeric(target_col)) {
    throw std::invalid_argument("NaiveBayes::fit: target must be categorical");
  }
  target_col_ = target_col;
  const size_t n_classes = train.schema(target_col).categories.size();
  const auto& y = train.codes(target_col);
  const double n = static_cast<double>(train.row_count());

  priors_.assign(n_classes, 0.0);
  for (const int32_t c : y) priors_[static_cast<size_t>(c)] += 1.0;
  for (double& p : priors_) p /= n;

  feature_cols_.clear();
  for (size_t c = 0; c < train.column_count(); ++c) {
    if (c != target_col) feature_cols_.push_back(c);
  }
  numeric_.assign(feature_cols_.size(), {});
  categorical_.assign(feature_cols_.size(), {});
  is_numeric_.assign(feature_cols_.size(), false);

  for (size_t f = 0; f < feature_cols_.size(); ++f) {
    const size_t col = feature_cols_[f];
    if (train.is_numeric(col)) {
      is_numeric_[f] = true;
      NumericFeature feat;
      feat.mean.assign(n_classes, 0.0);
      feat.variance.assign(n_classes, 0.0);
      std::vector<double> class_n(n_classes, 0.0);
      const auto& v = train.numeric(col);
      for (size_t r = 0; r < v.size(); ++r) {
        const auto cls = static_cast<size_t>(y[r]);
        feat.mean[cls] += v[r];
        class_n[cls] += 1.0;
      }
      for (size_t c = 0; c < n_classes; ++c) {
        if (class_n[c] > 0) feat.mean[c] /= class_n[c];
      }
      for (size_t r = 0; r < v.size(); ++r) {
        const auto cls = static_cast<size_t>(y[r]);
        const double d = v[r] - feat.mean[cls];
        feat.variance[cls] += d * d;
      }
      for (size_t c = 0; c < n_classes; ++c) {
        feat.variance[c] = class_n[c] > 0 ? feat.variance[c] / class_n[c] : 0.0;
        feat.variance[c] = std::max(feat.variance[c], 1e-9);
      }
      numeric_[f] = std::move(feat);
    } else {
      CategoricalFeature feat;
      feat.counts.assign(n_classes, {});
      feat.class_totals.assign(n_classes, 0.0);
      const auto& codes = train.codes(col);
      for (size_t r = 0; r < codes.size(); ++r) {
        const auto cls = static_cast<size_t>(y[r]);
        feat.counts[cls][train.category_label(col, codes[r])] += 1.0;
        feat.class_totals[cls] += 1.0;
      }
      categorical_[f] = std::move(feat);
    }
  }
}

std::vector<double> NaiveBayes::predict_proba(const Table& t, size_t row) const {
  const size_t n_classes = priors_.size();
  std::vector<double> log_post(n_classes);
  for (size_t c = 0; c < n_classes; ++c) {
    log_post[c] = priors_[c] > 0 ? std::log(priors_[c]) : -1e30;
  }
  for (size_t f = 0; f < feature_cols_.size(); ++f) {
    const size_t col = feature_cols_[f];
    if (is_numeric_[f]) {
      const double v = t.numeric(col)[row];
      const NumericFeature& feat = numeric_[f];
      for (size_t c = 0; c < n_classes; ++c) {
        const double var = feat.variance[c];
        const double d = v - feat.mean[c];
        log_post[c] += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
      }
    } else {
      const std::string& label = t.category_label(col, t.codes(col)[row]);
      const CategoricalFeature& feat = categorical_[f];
      for (size_t c = 0; c < n_classes; ++c) {
        const auto it = feat.counts[c].find(label);
        const double count = it == feat.counts[c].end() ? 0.0 : it->second;
        // Add-one smoothing with an extra slot for unseen labels.
        const double denom = feat.class_totals[c] + static_cast<double>(feat.counts[c].size()) + 1.0;
        log_post[c] += std::log((count + 1.0) / denom);
      }
    }
  }
  softmax_inplace(log_post);
  return log_post;
}

//===----------------------------------------------------------------------===//
// DecisionTree
//===----------------------------------------------------------------------===//

void DecisionTree::fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
                       const DecisionTreeConfig& cfg, uint64_t seed) {
  if (x.rows == 0 || x.rows != y.size()) throw std::invalid_argument("DecisionTree::fit: bad shapes");
  n_classes_ = n_classes;
  nodes_.clear();
  Rng rng(seed);

  std::vector<size_t> all(x.rows);
  std::iota(all.begin(), all.end(), size_t{0});

  struct Pending {
    std::vector<size_t> rows;
    int depth = 0;
    size_t node = 0;
  };

  const auto make_leaf = [&](Node& node, const std::vector<size_t>& rows) {
    node.feature = -1;
    node.distribution.assign(n_classes_, 0.0);
    for (const size_t r : rows) node.distribution[static_cast<size_t>(y[r])] += 1.0;
    const double total = static_cast<double>(rows.size());
    for (double& d : node.distribution) d /= total;
  };

  std::vector<Pending> stack;
  nodes_.emplace_back();
  stack.push_back({std::move(all), 0, 0});

  std::vector<double> left_counts(n_classes_), right_counts(n_classes_), node_counts(n_classes_);
  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();
    const std::vector<size_t>& rows = item.rows;

    std::fill(node_counts.begin(), node_counts.end(), 0.0);
    for (const size_t r : rows) node_counts[static_cast<size_t>(y[r])] += 1.0;
    const double total = static_cast<double>(rows.size());
    const bool pure = std::count_if(node_counts.begin(), node_counts.end(),
                                    [](double c) { return c > 0.0; }) <= 1;

    if (pure || item.depth >= cfg.max_depth || rows.size() < cfg.min_samples_split) {
      make_leaf(nodes_[item.node], rows);
      continue;
    }

    // Candidate features: all, or a seeded subsample for forests.
    std::vector<size_t> features(x.dims);
    std::iota(features.begin(), features.end(), size_t{0});
    if (cfg.features_per_split > 0 && cfg.features_per_split < x.dims) {
      rng.shuffle(features);
      features.resize(cfg.features_per_split);
      std::sort(features.begin(), features.end());
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, size_t>> order(rows.size());
    for (const size_t f : features) {
      for (size_t i = 0; i < rows.size(); ++i) {
        order[i] = {x.row(rows[i])[f], rows[i]};
      }
      std::sort(order.begin(), order.end());
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      right_counts = node_counts;
      for (size_t i = 0; i + 1 < order.size(); ++i) {
        const auto cls = static_cast<size_t>(y[order[i].second]);
        left_counts[cls] += 1.0;
        right_counts[cls] -= 1.0;
        if (order[i].first == order[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = total - nl;
        const double score = (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / total;
        if (score < best_score - 1e-15) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = (order[i].first + order[i + 1].first) / 2.0;
        }
      }
    }

    if (best_feature < 0) {
      make_leaf(nodes_[item.node], rows);
      continue;
    }

    std::vector<size_t> left_rows, right_rows;
    for (const size_t r : rows) {
      (x.row(r)[static_cast<size_t>(best_feature)] <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) {
      make_leaf(nodes_[item.node], rows);
      continue;
    }

    nodes_[item.node].feature = best_feature;
    nodes_[item.node].threshold = best_threshold;
    nodes_.emplace_back();
    nodes_[item.node].left = nodes_.size() - 1;
    nodes_.emplace_back();
    nodes_[item.node].right = nodes_.size() - 1;
    stack.push_back({std::move(right_rows), item.depth + 1, nodes_[item.node].right});
    stack.push_back({std::move(left_rows), item.depth + 1, nodes_[item.node].left});
  }
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> row) const {
  size_t node = 0;
  while (nodes_[node].feature >= 0) {
    node = row[static_cast<size_t>(nodes_[node].feature)] <= nodes_[node].threshold
               ? nodes_[node].left
               : nodes_[node].right;
  }
  return nodes_[node].distribution;
}

//===----------------------------------------------------------------------===//
// RandomForest
//===----------------------------------------------------------------------===//

void RandomForest::fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
                       uint64_t seed, const RandomForestConfig& cfg) {
  if (x.rows == 0 || x.rows != y.size()) throw std::invalid_argument("RandomForest::fit: bad shapes");
  n_classes_ = n_classes;
  trees_.assign(cfg.n_trees, {});

  DecisionTreeConfig tree_cfg = cfg.tree;
  if (tree_cfg.features_per_split == 0) {
    tree_cfg.features_per_split = std::max<size_t>(
        1, static_cast<size_t>(std::lround(std::sqrt(static_cast<double>(x.dims)))));
  }

  for (size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng(seed_combine(seed, seed_combine(fnv1a("random_forest"), t)));
    EncodedMatrix boot;
    boot.rows = x.rows;
    boot.dims = x.dims;
    boot.data.resize(x.data.size());
    std::vector<int32_t> boot_y(x.rows);
    for (size_t r = 0; r < x.rows; ++r) {
      const size_t src = rng.uniform_index(x.rows);
      const auto row = x.row(src);
      std::copy(row.begin(), row.end(), boot.data.begin() + static_cast<ptrdiff_t>(r * x.dims));
      boot_y[r] = y[src];
    }
    trees_[t].fit(boot, boot_y, n_classes, tree_cfg, rng.next_u64());
  }
}

std::vector<double> RandomForest::predict_proba(std::span<const double> row) const {
  std::vector<double> acc(n_classes_, 0.0);
  for (const DecisionTree& tree : trees_) {
    const auto p = tree.predict_proba(row);
    for (size_t c = 0; c < n_classes_; ++c) acc[c] += p[c];
  }
  for (double& v : acc) v /= static_cast<double>(trees_.size());
  return acc;
}

//===----------------------------------------------------------------------===//
// MlpBinary
//===----------------------------------------------------------------------===//

void MlpBinary::fit(const EncodedMatrix& x, std::span<const int32_t> y01, uint64_t seed,
                    const MlpConfig& cfg) {
  if (x.rows == 0 || x.rows != y01.size()) throw std::invalid_argument("MlpBinary::fit: bad shapes");
  dims_ = x.dims;
  hidden_ = cfg.hidden;

  Rng rng(seed_combine(seed, fnv1a("mlp_binary")));
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(std::max<size_t>(dims_, 1)));
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(hidden_));
  w1_.resize(hidden_ * dims_);
  for (double& w : w1_) w = rng.normal() * w1_scale;
  b1_.assign(hidden_, 0.0);
  w2_.resize(hidden_);
  for (double& w : w2_) w = rng.normal() * w2_scale;
  b2_ = 0.0;

  const double n = static_cast<double>(x.rows);
  std::vector<double> hidden_act(x.rows * hidden_);
  std::vector<double> delta_out(x.rows);
  std::vector<double> gw1(w1_.size()), gb1(hidden_), gw2(hidden_);

  for (int step = 0; step < cfg.steps; ++step) {
    // Forward pass.
    for (size_t r = 0; r < x.rows; ++r) {
      const auto row = x.row(r);
      double* h = &hidden_act[r * hidden_];
      for (size_t j = 0; j < hidden_; ++j) {
        double z = b1_[j];
        const double* w = &w1_[j * dims_];
        for (size_t d = 0; d < dims_; ++d) z += w[d] * row[d];
        h[j] = std::tanh(z);
      }
      double z2 = b2_;
      for (size_t j = 0; j < hidden_; ++j) z2 += w2_[j] * h[j];
      delta_out[r] = (sigmoid(z2) - static_cast<double>(y01[r])) / n;
    }
    // Backward pass.
    std::fill(gw1.begin(), gw1.end(), 0.0);
    std::fill(gb1.begin(), gb1.end(), 0.0);
    std::fill(gw2.begin(), gw2.end(), 0.0);
    double gb2 = 0.0;
    for (size_t r = 0; r < x.rows; ++r) {
      const auto row = x.row(r);
      const double* h = &hidden_act[r * hidden_];
      const double dout = delta_out[r];
      gb2 += dout;
      for (size_t j = 0; j < hidden_; ++j) {
        gw2[j] += dout * h[j];
        const double dh = dout * w2_[j] * (1.0 - h[j] * h[j]);
        if (dh == 0.0) continue;
        gb1[j] += dh;
        double* gw = &gw1[j * dims_];
        for (size_t d = 0; d < dims_; ++d) gw[d] += dh * row[d];
      }
    }
    for (size_t i = 0; i < w1_.size(); ++i) w1_[i] -= cfg.learning_rate * gw1[i];
    for (size_t j = 0; j < hidden_; ++j) {
      b1_[j] -= cfg.learning_rate * gb1[j];
      w2_[j] -= cfg.learning_rate * gw2[j];
    }
    b2_ -= cfg.learning_rate * gb2;
  }
}

double MlpBinary::predict_proba(std::span<const double> row) const {
  if (row.size() != dims_) throw std::invalid_argument("MlpBinary: dims mismatch");
  double z2 = b2_;
  for (size_t j = 0; j < hidden_; ++j) {
    double z = b1_[j];
    const double* w = &w1_[j * dims_];
    for (size_t d = 0; d < dims_; ++d) z += w[d] * row[d];
    z2 += w2_[j] * std::tanh(z);
  }
  return sigmoid(z2);
}

}  // namespace synth_audit
