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

#include "synth_audit/generators.hpp"

#include <algorithm>
#include <stdexcept>

#include "synth_audit/encode.hpp"
#include "synth_audit/rng.hpp"

namespace synth_audit {

Table smote_generate(const Table& train, size_t n_out, const SmoteConfig& cfg,
                     std::vector<std::string>* warnings) {
  if (train.row_count() < 2) {
    throw std::invalid_argument("smote_generate: need at least 2 training rows");
  }
  if (cfg.k == 0) throw std::invalid_argument("smote_generate: k must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw std::invalid_argument("smote_generate: alpha must be in (0, 1]");
  }
  const size_t target = train.target_column();
  if (train.is_numeric(target)) {
    throw std::invalid_argument("smote_generate: target must be categorical");
  }

  // Group rows by class; classes below 2 rows cannot interpolate.
  const auto& y = train.codes(target);
  std::vector<std::vector<size_t>> classes(train.schema(target).categories.size());
  for (size_t r = 0; r < y.size(); ++r) classes[static_cast<size_t>(y[r])].push_back(r);

  std::vector<size_t> usable;
  size_t usable_rows = 0;
  for (size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() >= 2) {
      usable.push_back(c);
      usable_rows += classes[c].size();
    } else if (!classes[c].empty() && warnings) {
      warnings->push_back("smote_generate: class '" + train.schema(target).categories[c] +
                          "' has fewer than 2 rows; excluded");
    }
  }
  if (usable.empty()) {
    throw std::invalid_argument("smote_generate: no class has >= 2 rows");
  }

  // Per-class neighbor lists under the mixed metric (encoder fitted on the
  // whole train split).
  const Encoder enc = Encoder::fit(train);
  const EncodedMatrix te = enc.encode(train);
  std::vector<std::vector<std::vector<size_t>>> neighbors(classes.size());
  for (const size_t c : usable) {
    const auto& rows = classes[c];
    const size_t k_eff = std::min(cfg.k, rows.size() - 1);
    neighbors[c].resize(rows.size());
    std::vector<std::pair<double, size_t>> dist;
    for (size_t i = 0; i < rows.size(); ++i) {
      dist.clear();
      for (size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        dist.emplace_back(mixed_distance(te.row(rows[i]), te.row(rows[j])), j);
      }
      std::sort(dist.begin(), dist.end());
      for (size_t j = 0; j < k_eff; ++j) neighbors[c][i].push_back(dist[j].second);
    }
  }

  Rng rng(seed_combine(cfg.seed, fnv1a("smote")));
  std::vector<Column> out_cols(train.column_count());
  for (size_t c = 0; c < train.column_count(); ++c) {
    if (train.is_numeric(c)) {
      out_cols[c] = std::vector<double>();
      std::get<std::vector<double>>(out_cols[c]).reserve(n_out);
    } else {
      out_cols[c] = std::vector<int32_t>();
      std::get<std::vector<int32_t>>(out_cols[c]).reserve(n_out);
    }
  }

  for (size_t r = 0; r < n_out; ++r) {
    // Class by empirical frequency among usable classes.
    size_t cls = usable.back();
    size_t pick = rng.uniform_index(usable_rows);
    for (const size_t c : usable) {
      if (pick < classes[c].size()) {
        cls = c;
        break;
      }
      pick -= classes[c].size();
    }
    const auto& rows = classes[cls];
    const size_t base_pos = rng.uniform_index(rows.size());
    const auto& nn = neighbors[cls][base_pos];
    const size_t partner_pos = nn[rng.uniform_index(nn.size())];
    const size_t base = rows[base_pos];
    const size_t partner = rows[partner_pos];
    const double lambda = rng.uniform(0.0, cfg.alpha);

    for (size_t c = 0; c < train.column_count(); ++c) {
      if (train.is_numeric(c)) {
        const auto& v = train.numeric(c);
        std::get<std::vector<double>>(out_cols[c])
            .push_back(v[base] + lambda * (v[partner] - v[base]));
      } else {
        std::get<std::vector<int32_t>>(out_cols[c]).push_back(train.codes(c)[base]);
      }
    }
  }
  return Table(train.schema(), std::move(out_cols));
}

Table marginal_generate(const Table& train, size_t n_out, uint64_t seed) {
  if (train.row_count() == 0) throw std::invalid_argument("marginal_generate: empty train table");
  Rng rng(seed_combine(seed, fnv1a("marginal")));
  std::vector<Column> out_cols(train.column_count());
  for (size_t c = 0; c < train.column_count(); ++c) {
    if (train.is_numeric(c)) {
      const auto& v = train.numeric(c);
      std::vector<double> col(n_out);
      for (size_t r = 0; r < n_out; ++r) col[r] = v[rng.uniform_index(v.size())];
      out_cols[c] = std::move(col);
    } else {
      const auto& v = train.codes(c);
      std::vector<int32_t> col(n_out);
      for (size_t r = 0; r < n_out; ++r) col[r] = v[rng.uniform_index(v.size())];
      out_cols[c] = std::move(col);
    }
  }
  return Table(train.schema(), std::move(out_cols));
}

}  // namespace synth_audit
