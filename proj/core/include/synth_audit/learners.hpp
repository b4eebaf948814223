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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/encode.hpp"
#include "synth_audit/table.hpp"

namespace synth_audit {

// Deterministic in-repo learners. All of them train with fixed budgets and
// produce identical models for identical (inputs, seed); none of them
// depends on thread count or stdlib distribution details.

struct LogisticRegressionConfig {
  int iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-3;
};

// Multinomial softmax regression trained by full-batch gradient descent from
// a zero initialization (the loss is convex, so no seed is needed).
class LogisticRegression {
 public:
  void fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
           const LogisticRegressionConfig& cfg = {});
  std::vector<double> predict_proba(std::span<const double> row) const;
  size_t n_classes() const { return n_classes_; }

 private:
  size_t n_classes_ = 0;
  size_t dims_ = 0;
  std::vector<double> weights_;  // n_classes x dims
  std::vector<double> bias_;     // n_classes
};

// Naive Bayes on raw table columns: Gaussian per numeric feature (variance
// floored), add-one-smoothed frequency tables per categorical feature.
class NaiveBayes {
 public:
  void fit(const Table& train, size_t target_col);
  std::vector<double> predict_proba(const Table& t, size_t row) const;
  size_t n_classes() const { return priors_.size(); }

 private:
  struct NumericFeature {
    std::vector<double> mean;      // per class
    std::vector<double> variance;  // per class, floored
  };
  struct CategoricalFeature {
    // per class: label -> count; smoothing handles unseen labels
    std::vector<std::map<std::string, double>> counts;
    std::vector<double> class_totals;
  };
  std::vector<size_t> feature_cols_;
  std::vector<NumericFeature> numeric_;          // indexed like feature_cols_
  std::vector<CategoricalFeature> categorical_;  // ditto (one of the two active per col)
  std::vector<bool> is_numeric_;
  std::vector<double> priors_;
  size_t target_col_ = 0;
};

struct DecisionTreeConfig {
  int max_depth = 6;
  size_t min_samples_split = 2;
  // 0 = consider every feature at every split; otherwise sample this many
  // (used by the forest), which requires an rng seed.
  size_t features_per_split = 0;
};

// CART with Gini impurity; thresholds at midpoints between consecutive
// distinct values, ties broken toward the lower feature index and threshold.
class DecisionTree {
 public:
  void fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
           const DecisionTreeConfig& cfg = {}, uint64_t seed = 0);
  std::vector<double> predict_proba(std::span<const double> row) const;

 private:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    size_t left = 0, right = 0;
    std::vector<double> distribution;
  };
  std::vector<Node> nodes_;
  size_t n_classes_ = 0;
};

struct RandomForestConfig {
  size_t n_trees = 25;
  DecisionTreeConfig tree;  // features_per_split filled with sqrt(dims) when 0
};

// Bagged CART trees with per-split feature subsampling.
class RandomForest {
 public:
  void fit(const EncodedMatrix& x, std::span<const int32_t> y, size_t n_classes,
           uint64_t seed, const RandomForestConfig& cfg = {});
  std::vector<double> predict_proba(std::span<const double> row) const;

 private:
  std::vector<DecisionTree> trees_;
  size_t n_classes_ = 0;
};

struct MlpConfig {
  size_t hidden = 32;
  int steps = 500;
  double learning_rate = 0.05;
};

// One-hidden-layer tanh network with a sigmoid output, trained by full-batch
// gradient descent on mean binary cross-entropy. Seed fixes the Gaussian
// init, making training bit-reproducible.
class MlpBinary {
 public:
  void fit(const EncodedMatrix& x, std::span<const int32_t> y01, uint64_t seed,
           const MlpConfig& cfg = {});
  double predict_proba(std::span<const double> row) const;

 private:
  size_t dims_ = 0;
  size_t hidden_ = 0;
  std::vector<double> w1_;  // hidden x dims
  std::vector<double> b1_;
  std::vector<double> w2_;  // hidden
  double b2_ = 0.0;
};

}  // namespace synth_audit
