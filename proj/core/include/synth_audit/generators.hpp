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
#include <string>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

struct SmoteConfig {
  size_t k = 5;          // neighbors, clamped to class size - 1
  double alpha = 0.5;    // interpolation cap; lambda ~ Uniform(0, alpha)
  uint64_t seed = 0;
};

// All-class SMOTE: samples a target class by empirical frequency, a base row
// uniformly within it, and one of the base row's k nearest same-class
// neighbors; numeric cells interpolate x1 + lambda * (x2 - x1), categorical
// cells copy the base row. Classes with fewer than 2 rows are excluded with
// a warning.
Table smote_generate(const Table& train, size_t n_out, const SmoteConfig& cfg,
                     std::vector<std::string>* warnings = nullptr);

// Independence baseline: every cell resampled from its column's empirical
// distribution. Matches marginals asymptotically while destroying joint
// structure; used for null calibration.
Table marginal_generate(const Table& train, size_t n_out, uint64_t seed);

}  // namespace synth_audit
