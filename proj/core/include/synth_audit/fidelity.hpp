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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

// 1 - sup |F_real - F_synth| over the two empirical CDFs. Both inputs
// nonempty; 1.0 means identical marginal shape.
double ks_complement(std::span<const double> real, std::span<const double> synth);

// 1 - TVD between two categorical frequency tables; categories absent from
// one side count with probability zero.
using LabelCounts = std::map<std::string, double>;
double tv_complement(const LabelCounts& real, const LabelCounts& synth);
double tv_complement(const Table& real, size_t real_col, const Table& synth, size_t synth_col);

struct ColumnShapeScore {
  std::string column;
  double score = 0.0;
};

struct ColumnShapesResult {
  double mean = 0.0;
  std::vector<ColumnShapeScore> columns;
};

// Per-column marginal similarity: KS complement for numeric columns, TVD
// complement for categorical ones, averaged unweighted (target included).
ColumnShapesResult column_shapes(const Table& real, const Table& synth);

struct PairTrendScore {
  std::string column_a;
  std::string column_b;
  double score = 0.0;
  bool constant_column = false;  // a Pearson side was constant; rho taken as 0
};

struct PairTrendsResult {
  double mean = 0.0;
  std::vector<PairTrendScore> pairs;
};

// Pairwise dependence similarity over all unordered column pairs:
// numeric-numeric via 1 - |rho_real - rho_synth| / 2, categorical pairs via
// TVD complement of normalized joint contingency tables, mixed pairs with
// the numeric side decile-binned on the real data.
PairTrendsResult pair_trends(const Table& real, const Table& synth, size_t quantile_bins = 10);

// Diversity: fraction of real rows within the beta-quantile of synthetic
// k-NN radii of their nearest synthetic row, averaged over the beta grid
// {0.05, 0.10, ..., 0.95}. Requires |synth| > k.
double beta_recall(const Table& real, const Table& synth, size_t k = 5);

}  // namespace synth_audit
