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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/encode.hpp"
#include "synth_audit/table.hpp"

namespace synth_audit {

// The eight attacks. Scores are oriented so that higher means "more likely
// a training member"; thresholding is deferred to ROC evaluation.
enum class AttackName {
  Dcr,
  DcrDiff,
  McEstimation,
  DensityEstimator,
  Domias,
  Dpi,
  Classifier,
  Logan,
};

enum class ThreatModel { BlackBox, ShadowBox };

ThreatModel threat_of(AttackName name);
std::string to_string(AttackName name);
std::string to_string(ThreatModel threat);
std::optional<AttackName> attack_from_string(std::string_view s);

struct AttackSpec {
  AttackName name = AttackName::Dcr;
  ThreatModel threat = ThreatModel::BlackBox;
  std::map<std::string, double> hyperparams;
};

AttackSpec make_attack_spec(AttackName name);
std::vector<AttackSpec> default_attack_roster();

// Per-query membership scores with ground-truth member flags
// (1 = drawn from train, 0 = holdout).
struct ScoreVector {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Member/non-member query rows in a fixed order shared by every attack.
struct QuerySet {
  Table rows;
  std::vector<int> labels;
};

// Gaussian product-kernel density estimate with per-dimension Silverman
// bandwidths (sigma clamped at 1e-6); evaluation is exact via log-sum-exp.
class GaussianKde {
 public:
  explicit GaussianKde(const EncodedMatrix& fit,
                       std::optional<std::vector<double>> bandwidth_override = std::nullopt);

  std::vector<double> log_density(const EncodedMatrix& queries) const;
  const std::vector<double>& bandwidths() const { return bandwidth_; }

 private:
  EncodedMatrix fit_;
  std::vector<double> bandwidth_;
  double log_norm_ = 0.0;  // -log(m) - sum_j log(h_j * sqrt(2 pi))
};

std::vector<double> kde_log_density(const EncodedMatrix& fit, const EncodedMatrix& queries);

// Black-box attacks (synthetic set only).
ScoreVector attack_dcr(const Table& synth, const QuerySet& queries);
ScoreVector attack_mc(const Table& synth, const QuerySet& queries);
ScoreVector attack_density(const Table& synth, const QuerySet& queries);

// Shadow-box attacks (synthetic set plus reference sample).
ScoreVector attack_dcr_diff(const Table& synth, const Table& reference, const QuerySet& queries);
ScoreVector attack_domias(const Table& synth, const Table& reference, const QuerySet& queries);
ScoreVector attack_dpi(const Table& synth, const Table& reference, const QuerySet& queries,
                       size_t k = 5);
ScoreVector attack_classifier(const Table& synth, const Table& reference, const QuerySet& queries,
                              uint64_t seed);
ScoreVector attack_logan(const Table& synth, const Table& reference, const QuerySet& queries,
                         uint64_t seed);

struct AttackRun {
  AttackSpec spec;
  std::optional<ScoreVector> scores;  // empty when skipped
  std::string skip_reason;
};

struct AttackBattery {
  QuerySet queries;
  std::vector<AttackRun> runs;
};

// Runs every spec against a balanced member/non-member query set (the larger
// side is subsampled by seed). Shadow-box attacks are skipped with a flag
// when no reference rows are available.
AttackBattery run_attacks(const Table& synth, const Table* reference, const Table& members,
                          const Table& nonmembers, std::span<const AttackSpec> specs, uint64_t seed);

}  // namespace synth_audit
