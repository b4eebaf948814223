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

#include "synth_audit/utility_eval.hpp"

#include <cmath>

#include "doctest.h"
#include "synth_audit/rng.hpp"
#include "testutil.hpp"

using namespace synth_audit;
using testutil::make_table;

namespace {

// Two well-separated 2-D Gaussian blobs with class labels.
Table blobs(Rng& rng, size_t n) {
  std::vector<double> x(n), y(n);
  std::vector<std::string> label(n);
  for (size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    x[i] = rng.normal() * 0.4 + (pos ? 3.0 : -3.0);
    y[i] = rng.normal() * 0.4 + (pos ? -3.0 : 3.0);
    label[i] = pos ? "p" : "q";
  }
  return make_table({{"x", x}, {"y", y}, {"label", label}});
}

}  // namespace

TEST_CASE("eval_utility: separable blobs reach near-perfect logistic macro AUC") {
  Rng rng(3);
  const Table holdout = blobs(rng, 60);
  const UtilityReport report = eval_utility(holdout, holdout, 0);
  REQUIRE(report.classifiers.size() == 4);
  REQUIRE(report.classifiers[0].name == "logistic_regression");
  REQUIRE(report.classifiers[0].macro_auc.has_value());
  CHECK(*report.classifiers[0].macro_auc >= 0.99);
  REQUIRE(report.mean_macro_auc.has_value());
  CHECK(*report.mean_macro_auc > 0.9);
}

TEST_CASE("eval_utility: shuffled training labels land near chance") {
  Rng rng(5);
  const Table holdout = blobs(rng, 60);
  double total = 0.0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    Rng shuffle_rng(seed_combine(100, static_cast<uint64_t>(t)));
    const Table synth = blobs(shuffle_rng, 60);
    // Shuffle the target column only.
    std::vector<int32_t> codes = synth.codes(2);
    shuffle_rng.shuffle(codes);
    const Table shuffled(synth.schema(),
                         {Column(synth.numeric(0)), Column(synth.numeric(1)), Column(codes)});
    const UtilityReport report = eval_utility(shuffled, holdout, static_cast<uint64_t>(t));
    REQUIRE(report.mean_macro_auc.has_value());
    total += *report.mean_macro_auc;
  }
  const double mean = total / trials;
  CHECK(mean > 0.4);
  CHECK(mean < 0.6);
}

TEST_CASE("eval_utility: holdout class missing from synth scores 0.5 and is flagged") {
  Rng rng(7);
  std::vector<double> x(60), y(60);
  std::vector<std::string> label(60);
  for (size_t i = 0; i < 60; ++i) {
    const size_t cls = i % 3;
    x[i] = rng.normal() * 0.3 + static_cast<double>(cls) * 3.0;
    y[i] = rng.normal() * 0.3 - static_cast<double>(cls) * 2.0;
    label[i] = "c" + std::to_string(cls);
  }
  const Table holdout = make_table({{"x", x}, {"y", y}, {"label", label}});
  // Synth keeps only classes c0 and c1.
  std::vector<size_t> keep;
  for (size_t i = 0; i < 60; ++i) {
    if (label[i] != "c2") keep.push_back(i);
  }
  const Table synth = holdout.select_rows(keep);
  const UtilityReport report = eval_utility(synth, holdout, 1);
  for (const ClassifierResult& clf : report.classifiers) {
    REQUIRE(clf.macro_auc.has_value());
    REQUIRE(clf.flagged_classes.size() == 1);
    CHECK(clf.flagged_classes[0] == "c2");
  }
}

TEST_CASE("eval_utility: single-class synthetic fails every classifier") {
  Rng rng(9);
  const Table holdout = blobs(rng, 40);
  std::vector<size_t> keep;
  for (size_t i = 0; i < 40; i += 2) keep.push_back(i);  // class "p" only
  const Table synth = holdout.select_rows(keep);
  const UtilityReport report = eval_utility(synth, holdout, 0);
  for (const ClassifierResult& clf : report.classifiers) {
    CHECK(!clf.macro_auc.has_value());
    CHECK(clf.failure_reason.find("single class") != std::string::npos);
  }
  CHECK(!report.mean_macro_auc.has_value());
}

TEST_CASE("eval_utility: deterministic given seed") {
  Rng rng(11);
  const Table holdout = blobs(rng, 50);
  const Table synth = blobs(rng, 50);
  const UtilityReport a = eval_utility(synth, holdout, 42);
  const UtilityReport b = eval_utility(synth, holdout, 42);
  REQUIRE(a.mean_macro_auc.has_value());
  CHECK(*a.mean_macro_auc == *b.mean_macro_auc);
  for (size_t i = 0; i < a.classifiers.size(); ++i) {
    CHECK(a.classifiers[i].macro_auc == b.classifiers[i].macro_auc);
  }
}

TEST_CASE("eval_utility: duplicated synthetic rows leave deterministic learners unchanged") {
  Rng rng(13);
  const Table holdout = blobs(rng, 40);
  const Table synth = blobs(rng, 40);
  std::vector<size_t> doubled;
  for (size_t i = 0; i < synth.row_count(); ++i) doubled.push_back(i);
  for (size_t i = 0; i < synth.row_count(); ++i) doubled.push_back(i);
  const Table dup = synth.select_rows(doubled);

  const UtilityReport a = eval_utility(synth, holdout, 3);
  const UtilityReport b = eval_utility(dup, holdout, 3);
  // Logistic within 1e-6, NB and the single tree exactly. The forest
  // bootstraps n rows and is excluded: duplication changes its draws.
  REQUIRE(a.classifiers[0].macro_auc.has_value());
  CHECK(std::abs(*a.classifiers[0].macro_auc - *b.classifiers[0].macro_auc) < 1e-6);
  CHECK(*a.classifiers[1].macro_auc == *b.classifiers[1].macro_auc);
  CHECK(*a.classifiers[2].macro_auc == *b.classifiers[2].macro_auc);
}
