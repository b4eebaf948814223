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

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "synth_audit/leakage.hpp"
#include "synth_audit/rng.hpp"
#include "synth_audit/table.hpp"

namespace synth_audit::testutil {

// Shorthand table construction: numeric columns from doubles, categorical
// columns from label strings (codes assigned in first-appearance order).
struct Col {
  std::string name;
  std::variant<std::vector<double>, std::vector<std::string>> values;
};

inline Table make_table(const std::vector<Col>& cols) {
  std::vector<ColumnSchema> schema;
  std::vector<Column> columns;
  for (const Col& col : cols) {
    ColumnSchema cs;
    cs.name = col.name;
    if (std::holds_alternative<std::vector<double>>(col.values)) {
      cs.kind = ColumnKind::Numeric;
      columns.emplace_back(std::get<std::vector<double>>(col.values));
    } else {
      cs.kind = ColumnKind::Categorical;
      std::map<std::string, int32_t> index;
      std::vector<int32_t> codes;
      for (const std::string& label : std::get<std::vector<std::string>>(col.values)) {
        auto it = index.find(label);
        if (it == index.end()) {
          it = index.emplace(label, static_cast<int32_t>(cs.categories.size())).first;
          cs.categories.push_back(label);
        }
        codes.push_back(it->second);
      }
      columns.emplace_back(std::move(codes));
    }
    schema.push_back(std::move(cs));
  }
  return Table(std::move(schema), std::move(columns));
}

// O(n^2) pairwise AUC oracle with tie credit 0.5.
inline double pairwise_auc_oracle(const ScoreVector& sv) {
  double credit = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < sv.scores.size(); ++i) {
    if (!sv.labels[i]) continue;
    for (size_t j = 0; j < sv.scores.size(); ++j) {
      if (sv.labels[j]) continue;
      ++pairs;
      if (sv.scores[i] > sv.scores[j]) {
        credit += 1.0;
      } else if (sv.scores[i] == sv.scores[j]) {
        credit += 0.5;
      }
    }
  }
  return credit / static_cast<double>(pairs);
}

// Brute-force KS complement: evaluates both empirical CDFs at every pooled
// sample point with a double loop.
inline double ks_complement_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  double ks = 0.0;
  for (const double v : pooled) {
    double fa = 0.0, fb = 0.0;
    for (const double x : a) {
      if (x <= v) fa += 1.0;
    }
    for (const double x : b) {
      if (x <= v) fb += 1.0;
    }
    ks = std::max(ks, std::abs(fa / static_cast<double>(a.size()) -
                               fb / static_cast<double>(b.size())));
  }
  return 1.0 - ks;
}

// Half-L1 total variation complement over label vectors: empirical
// frequencies count/total, summed over the sorted union of labels.
inline double tv_complement_oracle(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::map<std::string, double> ca, cb;
  for (const auto& s : a) ca[s] += 1.0;
  for (const auto& s : b) cb[s] += 1.0;
  std::map<std::string, double> keys = ca;
  for (const auto& [k, v] : cb) keys.emplace(k, 0.0);
  double l1 = 0.0;
  for (const auto& [k, unused] : keys) {
    const double x = ca.count(k) ? ca[k] / static_cast<double>(a.size()) : 0.0;
    const double y = cb.count(k) ? cb[k] / static_cast<double>(b.size()) : 0.0;
    l1 += std::abs(x - y);
  }
  return 1.0 - 0.5 * l1;
}

// 4-column mixed distribution (3 numeric + categorical target) used for
// null-calibration draws; every call with the same rng stream position is
// i.i.d. from one fixed distribution.
inline Table sample_mixed(Rng& rng, size_t n) {
  std::vector<double> x(n), y(n), z(n);
  std::vector<std::string> t(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = rng.normal(0.0, 1.0);
    y[i] = rng.normal(1.0, 2.0);
    z[i] = rng.normal(-0.5, 0.7);
    const double u = rng.uniform();
    t[i] = u < 0.5 ? "a" : (u < 0.8 ? "b" : "c");
  }
  return make_table({{"x", x}, {"y", y}, {"z", z}, {"t", t}});
}

// Continuous-only sampler (distinct rows almost surely), with a 2-class
// target appended so the table satisfies the protocol's shape.
inline Table sample_continuous(Rng& rng, size_t n, size_t dims) {
  std::vector<Col> cols;
  for (size_t d = 0; d < dims; ++d) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = rng.normal(0.0, 1.0 + 0.5 * static_cast<double>(d));
    cols.push_back({"x" + std::to_string(d), v});
  }
  std::vector<std::string> t(n);
  for (size_t i = 0; i < n; ++i) t[i] = rng.uniform() < 0.5 ? "c0" : "c1";
  cols.push_back({"t", t});
  return make_table(cols);
}

// Small benchmark suite: Gaussian-mixture numerics (2-6 columns), one
// class-dependent categorical feature and a 2-3 class target whose class
// shifts the numeric means, so structure-aware generators differ from
// marginal resampling.
inline Table toy_dataset(size_t variant, size_t rows, uint64_t seed) {
  Rng rng(seed_combine(seed, seed_combine(fnv1a("toy_dataset"), variant)));
  const size_t num_dims = 2 + variant % 5;
  const size_t n_classes = 2 + variant % 2;

  std::vector<std::vector<double>> numeric(num_dims, std::vector<double>(rows));
  std::vector<std::string> cat(rows), target(rows);
  for (size_t i = 0; i < rows; ++i) {
    const size_t cls = rng.uniform_index(n_classes);
    const bool second_mode = rng.uniform() < 0.35;
    for (size_t d = 0; d < num_dims; ++d) {
      double mean = 0.8 * static_cast<double>((cls + 1) * (d + 1));
      if (second_mode) mean += 2.5;
      numeric[d][i] = rng.normal(mean, 1.0);
    }
    const double u = rng.uniform();
    cat[i] = (cls == 0 ? (u < 0.7 ? "u" : "v") : (u < 0.3 ? "u" : (u < 0.8 ? "v" : "w")));
    target[i] = "c" + std::to_string(cls);
  }
  std::vector<Col> cols;
  for (size_t d = 0; d < num_dims; ++d) cols.push_back({"x" + std::to_string(d), numeric[d]});
  cols.push_back({"g", cat});
  cols.push_back({"y", target});
  return make_table(cols);
}

inline std::filesystem::path make_temp_dir(std::string_view tag) {
  static std::atomic<uint64_t> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("synth_audit_test_" + std::string(tag) + "_" +
                    std::to_string(counter.fetch_add(1)) + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace synth_audit::testutil
