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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

inline constexpr double kDefaultTestFrac = 0.2;
inline constexpr std::array<size_t, 3> kDefaultSubsetSizes{32, 64, 128};
inline constexpr std::array<uint64_t, 3> kDefaultSeeds{0, 1, 2};

struct SplitResult {
  std::vector<size_t> train_idx;
  std::vector<size_t> test_idx;
};

// Stratified train-test split on the (categorical) target column. Per-class
// test counts are round(class_count * test_frac), nudged by +-1 toward the
// global total round(rows * test_frac); singleton classes are forced into
// train with a warning. Deterministic given seed; both index lists ascend.
SplitResult stratified_split(const Table& t, double test_frac, uint64_t seed,
                             std::vector<std::string>* warnings = nullptr);

// One experimental unit: a size-n training subsample with its unused
// train-partition complement (the shadow-box reference) and the holdout.
struct AuditCell {
  std::string dataset_id;
  size_t n = 0;
  uint64_t seed = 0;
  std::vector<size_t> train_idx;
  std::vector<size_t> holdout_idx;
  std::vector<size_t> reference_idx;
};

// Builds the (size x seed) grid of cells. Sizes exceeding the train
// partition are skipped with a warning. Subsamples are stratified by target
// using largest-remainder allocation, so per-class counts stay within one
// row of exact proportionality.
std::vector<AuditCell> make_cells(const Table& t, const std::string& dataset_id,
                                  std::span<const size_t> sizes, std::span<const uint64_t> seeds,
                                  double test_frac = kDefaultTestFrac, uint64_t split_seed = 0,
                                  std::vector<std::string>* warnings = nullptr);

// Replaces a numeric target with quantile-bin labels ("q1".."qk"); bins with
// duplicate quantile edges merge, and a constant target is an error.
Table discretize_target(const Table& t, size_t bins = 4);

}  // namespace synth_audit
