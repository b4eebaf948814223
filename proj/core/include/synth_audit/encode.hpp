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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

// One category mismatch costs exactly one distance unit under the Euclidean
// metric: two one-hot slots differ, each weighted 1/sqrt(2).
inline constexpr double kCategoryWeight = 0.70710678118654752440;

struct EncodedMatrix {
  size_t rows = 0;
  size_t dims = 0;
  std::vector<double> data;  // row-major

  std::span<const double> row(size_t i) const {
    return std::span<const double>(data).subspan(i * dims, dims);
  }
};

// Fitted mixed-type encoder: z-scores numeric columns (stddev clamped to 1
// below 1e-12) and one-hot encodes categorical columns with a reserved
// "unseen" slot, scaled by kCategoryWeight. Categorical values are matched
// by label, so tables with private category code spaces encode correctly.
class Encoder {
 public:
  // Fits on all columns, or on the subset `cols` (in the given order).
  static Encoder fit(const Table& t);
  static Encoder fit(const Table& t, std::span<const size_t> cols);

  EncodedMatrix encode(const Table& t) const;
  size_t dim() const { return dims_; }

 private:
  struct NumericStats {
    double mean = 0.0;
    double stddev = 1.0;
  };
  struct ColumnPlan {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    size_t offset = 0;            // first output dim of this column
    NumericStats stats;           // Numeric
    std::unordered_map<std::string, size_t> slot_of_label;  // Categorical
    size_t slot_count = 0;        // categories + 1 (unseen)
  };
  std::vector<ColumnPlan> plan_;
  size_t dims_ = 0;
};

double mixed_distance(std::span<const double> a, std::span<const double> b);

// Equal-width binning over [min, max]: bin i covers
// [min + i*w, min + (i+1)*w) with the max value folded into bin k-1; a
// constant vector maps everything to bin 0.
std::vector<size_t> equal_width_bins(std::span<const double> values, size_t k);

// Quantile binning with merged duplicate edges: boundaries are the
// 0, 1/k, ..., 1 empirical quantiles, deduplicated, so heavy ties shrink
// the number of bins. Fit once, assignable to other vectors (out-of-range
// values clamp into the end bins).
class QuantileBinner {
 public:
  QuantileBinner(std::span<const double> fit_values, size_t k);

  size_t bin_count() const { return bin_count_; }
  size_t assign(double value) const;
  std::vector<size_t> assign(std::span<const double> values) const;

 private:
  std::vector<double> upper_;  // ascending upper boundaries, one per bin
  size_t bin_count_ = 1;
};

std::vector<size_t> quantile_bins(std::span<const double> values, size_t k = 10);

}  // namespace synth_audit
