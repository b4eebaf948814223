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

#include "synth_audit/mia.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "synth_audit/learners.hpp"
#include "synth_audit/rng.hpp"
#include "synth_audit/stats.hpp"

namespace synth_audit {

namespace {

// Minimum distance from each query row to any row of `fit`.
std::vector<double> min_distances(const EncodedMatrix& queries, const EncodedMatrix& fit) {
  std::vector<double> out(queries.rows, std::numeric_limits<double>::infinity());
  for (size_t q = 0; q < queries.rows; ++q) {
    const auto qr = queries.row(q);
    for (size_t i = 0; i < fit.rows; ++i) {
      out[q] = std::min(out[q], mixed_distance(qr, fit.row(i)));
    }
  }
  return out;
}

ScoreVector with_labels(std::vector<double> scores, const QuerySet& queries) {
  return ScoreVector{std::move(scores), queries.labels};
}

}  // namespace

ThreatModel threat_of(AttackName name) {
  switch (name) {
    case AttackName::Dcr:
    case AttackName::McEstimation:
    case AttackName::DensityEstimator:
      return ThreatModel::BlackBox;
    case AttackName::DcrDiff:
    case AttackName::Domias:
    case AttackName::Dpi:
    case AttackName::Classifier:
    case AttackName::Logan:
      return ThreatModel::ShadowBox;
  }
  throw std::logic_error("threat_of: unknown attack");
}

std::string to_string(AttackName name) {
  switch (name) {
    case AttackName::Dcr: return "dcr";
    case AttackName::DcrDiff: return "dcr_diff";
    case AttackName::McEstimation: return "mc_estimation";
    case AttackName::DensityEstimator: return "density_estimator";
    case AttackName::Domias: return "domias";
    case AttackName::Dpi: return "dpi";
    case AttackName::Classifier: return "classifier";
    case AttackName::Logan: return "logan";
  }
  throw std::logic_error("to_string: unknown attack");
}

std::string to_string(ThreatModel threat) {
  return threat == ThreatModel::BlackBox ? "black_box" : "shadow_box";
}

std::optional<AttackName> attack_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dcr") return AttackName::Dcr;
  if (lower == "dcr_diff" || lower == "dcr-diff") return AttackName::DcrDiff;
  if (lower == "mc_estimation" || lower == "mc") return AttackName::McEstimation;
  if (lower == "density_estimator" || lower == "density") return AttackName::DensityEstimator;
  if (lower == "domias") return AttackName::Domias;
  if (lower == "dpi") return AttackName::Dpi;
  if (lower == "classifier") return AttackName::Classifier;
  if (lower == "logan") return AttackName::Logan;
  return std::nullopt;
}

AttackSpec make_attack_spec(AttackName name) {
  AttackSpec spec;
  spec.name = name;
  spec.threat = threat_of(name);
  if (name == AttackName::Dpi) spec.hyperparams["k"] = 5.0;
  return spec;
}

std::vector<AttackSpec> default_attack_roster() {
  std::vector<AttackSpec> roster;
  for (const AttackName name :
       {AttackName::Dcr, AttackName::DcrDiff, AttackName::McEstimation,
        AttackName::DensityEstimator, AttackName::Domias, AttackName::Dpi,
        AttackName::Classifier, AttackName::Logan}) {
    roster.push_back(make_attack_spec(name));
  }
  return roster;
}

//===----------------------------------------------------------------------===//
// Gaussian KDE
//===----------------------------------------------------------------------===//

GaussianKde::GaussianKde(const EncodedMatrix& fit, std::optional<std::vector<double>> bandwidth_override)
    : fit_(fit) {
  if (fit_.rows < 2) throw std::invalid_argument("GaussianKde: need at least 2 fit rows");
  const double m = static_cast<double>(fit_.rows);
  if (bandwidth_override) {
    if (bandwidth_override->size() != fit_.dims) {
      throw std::invalid_argument("GaussianKde: bandwidth override has wrong dimension");
    }
    bandwidth_ = std::move(*bandwidth_override);
  } else {
    // Per-dimension Silverman rule: h_j = 1.06 * sigma_j * m^(-1/5).
    bandwidth_.resize(fit_.dims);
    std::vector<double> column(fit_.rows);
    const double m_pow = std::pow(m, -0.2);
    for (size_t d = 0; d < fit_.dims; ++d) {
      for (size_t r = 0; r < fit_.rows; ++r) column[r] = fit_.data[r * fit_.dims + d];
      const double sigma = std::max(population_stddev(column), 1e-6);
      bandwidth_[d] = 1.06 * sigma * m_pow;
    }
  }
  log_norm_ = -std::log(m);
  for (const double h : bandwidth_) {
    if (!(h > 0.0)) throw std::invalid_argument("GaussianKde: bandwidths must be positive");
    log_norm_ -= std::log(h * std::sqrt(2.0 * std::numbers::pi));
  }
}

std::vector<double> GaussianKde::log_density(const EncodedMatrix& queries) const {
  if (queries.dims != fit_.dims) throw std::invalid_argument("GaussianKde: dims mismatch");
  std::vector<double> out(queries.rows);
  std::vector<double> exponents(fit_.rows);
  for (size_t q = 0; q < queries.rows; ++q) {
    const auto qr = queries.row(q);
    double max_e = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < fit_.rows; ++i) {
      const auto fr = fit_.row(i);
      double e = 0.0;
      for (size_t d = 0; d < fit_.dims; ++d) {
        const double z = (qr[d] - fr[d]) / bandwidth_[d];
        e -= 0.5 * z * z;
      }
      exponents[i] = e;
      max_e = std::max(max_e, e);
    }
    double sum = 0.0;
    for (const double e : exponents) sum += std::exp(e - max_e);
    out[q] = max_e + std::log(sum) + log_norm_;
  }
  return out;
}

std::vector<double> kde_log_density(const EncodedMatrix& fit, const EncodedMatrix& queries) {
  return GaussianKde(fit).log_density(queries);
}

//===----------------------------------------------------------------------===//
// Attacks
//===----------------------------------------------------------------------===//

ScoreVector attack_dcr(const Table& synth, const QuerySet& queries) {
  const Encoder enc = Encoder::fit(synth);
  const auto dist = min_distances(enc.encode(queries.rows), enc.encode(synth));
  std::vector<double> scores(dist.size());
  for (size_t i = 0; i < dist.size(); ++i) scores[i] = -dist[i];
  return with_labels(std::move(scores), queries);
}

ScoreVector attack_dcr_diff(const Table& synth, const Table& reference, const QuerySet& queries) {
  const Encoder enc = Encoder::fit(concat_rows(synth, reference));
  const EncodedMatrix qe = enc.encode(queries.rows);
  const auto to_synth = min_distances(qe, enc.encode(synth));
  const auto to_ref = min_distances(qe, enc.encode(reference));
  std::vector<double> scores(to_synth.size());
  for (size_t i = 0; i < scores.size(); ++i) scores[i] = to_ref[i] - to_synth[i];
  return with_labels(std::move(scores), queries);
}

ScoreVector attack_mc(const Table& synth, const QuerySet& queries) {
  const Encoder enc = Encoder::fit(synth);
  const EncodedMatrix se = enc.encode(synth);
  const EncodedMatrix qe = enc.encode(queries.rows);

  // Ball radius: median nearest-neighbor distance within the synthetic set,
  // floored so an all-duplicates set still counts exact matches.
  double epsilon = 1e-6;
  if (se.rows >= 2) {
    std::vector<double> nn(se.rows, std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < se.rows; ++i) {
      for (size_t j = 0; j < se.rows; ++j) {
        if (i == j) continue;
        nn[i] = std::min(nn[i], mixed_distance(se.row(i), se.row(j)));
      }
    }
    epsilon = std::max(median_of(nn), 1e-6);
  }

  std::vector<double> scores(qe.rows, 0.0);
  for (size_t q = 0; q < qe.rows; ++q) {
    size_t inside = 0;
    for (size_t i = 0; i < se.rows; ++i) {
      if (mixed_distance(qe.row(q), se.row(i)) < epsilon) ++inside;
    }
    scores[q] = static_cast<double>(inside) / static_cast<double>(se.rows);
  }
  return with_labels(std::move(scores), queries);
}

ScoreVector attack_density(const Table& synth, const QuerySet& queries) {
  const Encoder enc = Encoder::fit(synth);
  return with_labels(kde_log_density(enc.encode(synth), enc.encode(queries.rows)), queries);
}

ScoreVector attack_domias(const Table& synth, const Table& reference, const QuerySet& queries) {
  const Encoder enc = Encoder::fit(concat_rows(synth, reference));
  const EncodedMatrix qe = enc.encode(queries.rows);
  const auto log_s = kde_log_density(enc.encode(synth), qe);
  const auto log_r = kde_log_density(enc.encode(reference), qe);
  std::vector<double> scores(log_s.size());
  for (size_t i = 0; i < scores.size(); ++i) scores[i] = log_s[i] - log_r[i];
  return with_labels(std::move(scores), queries);
}

ScoreVector attack_dpi(const Table& synth, const Table& reference, const QuerySet& queries,
                       size_t k) {
  const size_t pool = synth.row_count() + reference.row_count();
  if (k == 0 || k > pool) throw std::invalid_argument("attack_dpi: k must be in [1, |S|+|R|]");
  const Encoder enc = Encoder::fit(concat_rows(synth, reference));
  const EncodedMatrix se = enc.encode(synth);
  const EncodedMatrix re = enc.encode(reference);
  const EncodedMatrix qe = enc.encode(queries.rows);

  std::vector<double> scores(qe.rows);
  // (distance, pool index); synthetic rows occupy the low indices, and index
  // order breaks distance ties.
  std::vector<std::pair<double, size_t>> neighbors(pool);
  for (size_t q = 0; q < qe.rows; ++q) {
    const auto qr = qe.row(q);
    for (size_t i = 0; i < se.rows; ++i) neighbors[i] = {mixed_distance(qr, se.row(i)), i};
    for (size_t i = 0; i < re.rows; ++i) {
      neighbors[se.rows + i] = {mixed_distance(qr, re.row(i)), se.rows + i};
    }
    std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<ptrdiff_t>(k),
                      neighbors.end());
    size_t synth_hits = 0;
    for (size_t i = 0; i < k; ++i) {
      if (neighbors[i].second < se.rows) ++synth_hits;
    }
    scores[q] = static_cast<double>(synth_hits) / static_cast<double>(k);
  }
  return with_labels(std::move(scores), queries);
}

namespace {

// Shared setup for the two trained density-ratio attacks: encoded pool with
// label 1 = synthetic, 0 = reference.
struct DiscriminatorData {
  EncodedMatrix x;
  std::vector<int32_t> y;
  EncodedMatrix queries;
};

DiscriminatorData discriminator_data(const Table& synth, const Table& reference,
                                     const QuerySet& queries) {
  const Encoder enc = Encoder::fit(concat_rows(synth, reference));
  DiscriminatorData out;
  const EncodedMatrix se = enc.encode(synth);
  const EncodedMatrix re = enc.encode(reference);
  out.x.rows = se.rows + re.rows;
  out.x.dims = se.dims;
  out.x.data = se.data;
  out.x.data.insert(out.x.data.end(), re.data.begin(), re.data.end());
  out.y.assign(se.rows, 1);
  out.y.insert(out.y.end(), re.rows, 0);
  out.queries = enc.encode(queries.rows);
  return out;
}

}  // namespace

ScoreVector attack_classifier(const Table& synth, const Table& reference, const QuerySet& queries,
                              uint64_t seed) {
  (void)seed;  // convex training from zero init; kept for interface symmetry
  const DiscriminatorData data = discriminator_data(synth, reference, queries);
  LogisticRegression clf;
  clf.fit(data.x, data.y, 2);
  std::vector<double> scores(data.queries.rows);
  for (size_t q = 0; q < data.queries.rows; ++q) {
    scores[q] = clf.predict_proba(data.queries.row(q))[1];
  }
  return with_labels(std::move(scores), queries);
}

ScoreVector attack_logan(const Table& synth, const Table& reference, const QuerySet& queries,
                         uint64_t seed) {
  const DiscriminatorData data = discriminator_data(synth, reference, queries);
  MlpBinary disc;
  disc.fit(data.x, data.y, seed);
  std::vector<double> scores(data.queries.rows);
  for (size_t q = 0; q < data.queries.rows; ++q) {
    scores[q] = disc.predict_proba(data.queries.row(q));
  }
  return with_labels(std::move(scores), queries);
}

//===----------------------------------------------------------------------===//
// Battery
//===----------------------------------------------------------------------===//

AttackBattery run_attacks(const Table& synth, const Table* reference, const Table& members,
                          const Table& nonmembers, std::span<const AttackSpec> specs,
                          uint64_t seed) {
  if (members.row_count() == 0 || nonmembers.row_count() == 0) {
    throw std::invalid_argument("run_attacks: empty member or nonmember set");
  }
  if (!members.schema_compatible(nonmembers)) {
    throw std::invalid_argument("run_attacks: member/nonmember schemas differ");
  }

  // Balance the two query classes; the larger side is subsampled by seed.
  const size_t m = std::min(members.row_count(), nonmembers.row_count());
  const auto subsample = [&](const Table& t, uint64_t tag) {
    if (t.row_count() == m) return t;
    Rng rng(seed_combine(seed, tag));
    auto idx = rng.sample_without_replacement(t.row_count(), m);
    std::sort(idx.begin(), idx.end());
    return t.select_rows(idx);
  };
  const Table mem = subsample(members, fnv1a("members"));
  const Table non = subsample(nonmembers, fnv1a("nonmembers"));

  AttackBattery battery;
  battery.queries.rows = concat_rows(mem, non);
  battery.queries.labels.assign(mem.row_count(), 1);
  battery.queries.labels.insert(battery.queries.labels.end(), non.row_count(), 0);

  const bool have_reference = reference != nullptr && reference->row_count() > 0;
  for (const AttackSpec& spec : specs) {
    AttackRun run;
    run.spec = spec;
    if (spec.threat == ThreatModel::ShadowBox && !have_reference) {
      run.skip_reason = "reference unavailable";
      battery.runs.push_back(std::move(run));
      continue;
    }
    const uint64_t attack_seed = seed_combine(seed, fnv1a(to_string(spec.name)));
    try {
      switch (spec.name) {
        case AttackName::Dcr:
          run.scores = attack_dcr(synth, battery.queries);
          break;
        case AttackName::DcrDiff:
          run.scores = attack_dcr_diff(synth, *reference, battery.queries);
          break;
        case AttackName::McEstimation:
          run.scores = attack_mc(synth, battery.queries);
          break;
        case AttackName::DensityEstimator:
          run.scores = attack_density(synth, battery.queries);
          break;
        case AttackName::Domias:
          run.scores = attack_domias(synth, *reference, battery.queries);
          break;
        case AttackName::Dpi: {
          size_t k = 5;
          if (const auto it = spec.hyperparams.find("k"); it != spec.hyperparams.end()) {
            k = static_cast<size_t>(it->second);
          }
          k = std::min(k, synth.row_count() + reference->row_count());
          run.scores = attack_dpi(synth, *reference, battery.queries, k);
          break;
        }
        case AttackName::Classifier:
          run.scores = attack_classifier(synth, *reference, battery.queries, attack_seed);
          break;
        case AttackName::Logan:
          run.scores = attack_logan(synth, *reference, battery.queries, attack_seed);
          break;
      }
    } catch (const std::exception& e) {
      // A degenerate input for one attack (say a single-row reference under
      // the KDE) skips that attack, not the battery.
      run.scores.reset();
      run.skip_reason = e.what();
    }
    battery.runs.push_back(std::move(run));
  }
  return battery;
}

}  // namespace synth_audit
