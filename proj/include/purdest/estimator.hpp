//
// Copyright 2026 The purdest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Pure-DP estimator for binary product distributions in total variation.
//
// The sample is cut into disjoint blocks. Partitioning rounds repeatedly
// threshold noisy truncated means to peel off heavy coordinates, halving the
// marginal bound u each round. Peeled coordinates are rescaled by 1/sqrt(u)
// and handed to a DP mean learner; whatever survives every round is estimated
// directly from a final block with a small truncation radius. Every block is
// touched by exactly one noise-bearing operation.
//
// All logarithms are natural; derived sample counts are rounded up.

#ifndef PURDEST_ESTIMATOR_HPP_
#define PURDEST_ESTIMATOR_HPP_

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "purdest/dataset.hpp"
#include "purdest/errors.hpp"
#include "purdest/learner.hpp"
#include "purdest/mechanisms.hpp"
#include "purdest/metrics.hpp"
#include "purdest/random.hpp"

namespace purdest {

struct EstimatorConfig {
  std::size_t d = 2;
  double epsilon = 1.0;
  double alpha = 0.1;
  double beta = 0.1;
  // Multiplier on every derived sample count. Below 1 the accuracy guarantee
  // no longer applies.
  double c_scale = 1.0;
  // Stand-in for the polylog(1/alpha) factor of the learner's sample size.
  double c_alpha = 1.0;
  std::string learner = ClippedLaplaceLearner::kId;
  std::uint64_t seed = 0;
  // Privately flip coordinates whose mean looks larger than 1/2 first.
  bool flip_preprocess = false;

  void validate() const {
    auto unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (d < 2) throw InvalidConfig("dimension must be at least 2");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
      throw InvalidConfig("epsilon must lie in (0, 1]");
    }
    if (!unit(alpha)) throw InvalidConfig("alpha must lie in (0, 1)");
    if (!unit(beta) || beta > 0.5) {
      throw InvalidConfig("beta must lie in (0, 1/2]");
    }
    if (!(c_scale > 0.0 && c_scale <= 1.0)) {
      throw InvalidConfig("c_scale must lie in (0, 1]");
    }
    if (!(c_alpha > 0.0) || !std::isfinite(c_alpha)) {
      throw InvalidConfig("c_alpha must be positive");
    }
    make_learner(learner);
  }
};

struct DerivedParams {
  std::size_t R = 0;
  std::size_t m = 0;
  std::size_t m0 = 0;
  std::size_t m1 = 0;
  std::size_t n_total = 0;  // m R + m1 + m0
  std::size_t m_flip = 0;   // extra leading block, 0 unless flipping

  std::size_t rows_required() const { return n_total + m_flip; }

  friend bool operator==(const DerivedParams&, const DerivedParams&) = default;
};

namespace internal {

inline std::size_t checked_count(long double value, const char* name) {
  // Counts are kept exactly representable as doubles too.
  constexpr long double kLimit = 9007199254740992.0L;  // 2^53
  if (!std::isfinite(static_cast<double>(value)) || value > kLimit) {
    throw ParameterOverflow(std::string("derived sample count ") + name +
                            " overflows");
  }
  return static_cast<std::size_t>(std::ceil(value));
}

inline std::size_t checked_add(std::size_t a, std::size_t b) {
  if (a > std::numeric_limits<std::size_t>::max() - b) {
    throw ParameterOverflow("total sample count overflows");
  }
  return a + b;
}

inline std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (b != 0 && a > std::numeric_limits<std::size_t>::max() / b) {
    throw ParameterOverflow("total sample count overflows");
  }
  return a * b;
}

}  // namespace internal

// floor(log2(d / 2)) clamped at 0.
inline std::size_t round_count(std::size_t d) {
  const auto width = static_cast<std::size_t>(std::bit_width(d));
  return width >= 2 ? width - 2 : 0;
}

// Block size for the optional flip vote.
inline std::size_t flip_block_size(const EstimatorConfig& cfg) {
  const long double d = static_cast<long double>(cfg.d);
  const long double log_term = std::log(d / cfg.beta);
  return internal::checked_count(
      cfg.c_scale * (16.0L * d * log_term / cfg.epsilon + 32.0L * log_term),
      "m_flip");
}

inline DerivedParams derive_params(const EstimatorConfig& cfg) {
  cfg.validate();
  const long double d = static_cast<long double>(cfg.d);
  const long double eps = cfg.epsilon;
  const long double alpha = cfg.alpha;
  const long double beta = cfg.beta;
  const long double c = cfg.c_scale;

  DerivedParams p;
  p.R = round_count(cfg.d);
  p.m = internal::checked_count(
      c * (2048.0L * d * std::log(d / beta) +
           2048.0L * d * std::log(d / (eps * beta)) / eps),
      "m");
  p.m1 = internal::checked_count(
      c * (128.0L * d * std::log(d / beta) / (alpha * alpha) +
           256.0L * d * std::log(d / (eps * alpha * beta)) / (eps * alpha)),
      "m1");
  const long double tail = d + std::log(1.0L / beta);
  p.m0 = internal::checked_count(
      c * cfg.c_alpha *
          (tail / (alpha * alpha) + tail / (alpha * eps) +
           d * std::log(d) / eps),
      "m0");
  p.n_total = internal::checked_add(
      internal::checked_add(internal::checked_mul(p.m, p.R), p.m1), p.m0);
  p.m_flip = cfg.flip_preprocess ? flip_block_size(cfg) : 0;
  internal::checked_add(p.n_total, p.m_flip);
  return p;
}

// Disjoint contiguous blocks, in row order: [flip][Y^1 .. Y^R][Y^F][Z].
struct DataSplit {
  BlockView flip;
  std::vector<BlockView> rounds;
  BlockView final_block;
  BlockView learner_block;
  std::size_t surplus = 0;
};

inline DataSplit split_dataset(const BinaryMatrix& X, const DerivedParams& p) {
  if (X.rows() < p.rows_required()) {
    throw InsufficientSamples("estimator needs " +
                              std::to_string(p.rows_required()) +
                              " rows, dataset has " + std::to_string(X.rows()));
  }
  DataSplit split;
  std::size_t cursor = 0;
  split.flip = X.block(cursor, p.m_flip);
  cursor += p.m_flip;
  for (std::size_t r = 0; r < p.R; ++r) {
    split.rounds.push_back(X.block(cursor, p.m));
    cursor += p.m;
  }
  split.final_block = X.block(cursor, p.m1);
  cursor += p.m1;
  split.learner_block = X.block(cursor, p.m0);
  cursor += p.m0;
  split.surplus = X.rows() - cursor;
  return split;
}

inline std::string round_block_id(std::size_t r) { return "Y" + std::to_string(r); }
inline constexpr const char* kFinalBlockId = "YF";
inline constexpr const char* kLearnerBlockId = "Z";
inline constexpr const char* kFlipBlockId = "flip";

struct PartitionRound {
  std::size_t r = 0;
  std::vector<std::size_t> active;    // S_r
  std::vector<std::size_t> filtered;  // T_r
  double u = 0.0;
  double tau = 0.0;
  double radius = 0.0;              // B_r
  std::vector<double> noisy;        // q_r over `active`, same order
  std::size_t truncation_count = 0;

  friend bool operator==(const PartitionRound&, const PartitionRound&) = default;
};

struct PartitionTrace {
  std::vector<PartitionRound> rounds;
  std::vector<std::size_t> final_set;     // S_F
  std::vector<std::size_t> learner_set;   // T_P, grouped by round
  std::vector<double> learner_u;          // u of the round that filtered it
  double exit_u = 0.5;                    // u when the loop stopped
  std::vector<std::string> warnings;

  std::size_t truncations() const {
    std::size_t total = 0;
    for (const auto& round : rounds) total += round.truncation_count;
    return total;
  }

  friend bool operator==(const PartitionTrace&, const PartitionTrace&) = default;
};

inline PartitionTrace partition_rounds(std::span<const BlockView> blocks,
                                       const DerivedParams& p,
                                       const EstimatorConfig& cfg, Rng& rng,
                                       AuditTrail& audit) {
  PartitionTrace trace;
  std::vector<std::size_t> active(cfg.d);
  for (std::size_t j = 0; j < cfg.d; ++j) active[j] = j;
  double u = 0.5;
  double tau = 3.0 / 16.0;
  const double log_term =
      std::log(static_cast<double>(p.m) * static_cast<double>(p.R) / cfg.beta);

  for (std::size_t r = 1;
       u * static_cast<double>(active.size()) >= 1.0 && r <= p.R; ++r) {
    if (blocks.size() < r) throw InsufficientSamples("missing round block");
    PartitionRound round;
    round.r = r;
    round.u = u;
    round.tau = tau;
    round.radius = 3.0 * u * static_cast<double>(active.size()) * log_term;
    round.active = active;

    const BlockView& block = blocks[r - 1];
    const TruncationRadius radius(round.radius);
    const auto clipped = tmean(block, active, {}, radius);
    round.truncation_count = clipped.truncated_rows;
    const NoiseSpec spec(
        tmean_sensitivity(radius, block.rows, coordinate_cap(active.size(), {})),
        cfg.epsilon);
    round.noisy =
        laplace_mechanism(clipped.mean, spec, rng, &audit, round_block_id(r));

    std::vector<std::size_t> survivors;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (round.noisy[k] < tau) {
        survivors.push_back(active[k]);
      } else {
        round.filtered.push_back(active[k]);
        trace.learner_set.push_back(active[k]);
        trace.learner_u.push_back(u);
      }
    }
    active = std::move(survivors);
    trace.rounds.push_back(std::move(round));
    u *= 0.5;
    tau *= 0.5;
  }

  trace.exit_u = u;
  trace.final_set = std::move(active);
  const double load = u * static_cast<double>(trace.final_set.size());
  if (load == 1.0) {
    trace.warnings.push_back(
        "final round entered with u*|S_F| = 1 exactly; boundary case accepted");
  } else if (load > 1.0) {
    trace.warnings.push_back("partitioning exhausted its rounds with u*|S_F| = " +
                             std::to_string(load) +
                             " > 1; final-round accuracy is not guaranteed");
  }
  return trace;
}

struct PartialEstimate {
  std::vector<std::size_t> columns;
  std::vector<double> values;
  bool invoked = false;
  std::size_t truncation_count = 0;
  double radius = 0.0;
};

// Runs the learner on the learner block restricted to T_P, with each column
// scaled by 1/sqrt(u) of its round, and maps the answer back by sqrt(u).
inline PartialEstimate learner_phase(const BlockView& learner_block,
                                     const PartitionTrace& trace,
                                     const EstimatorConfig& cfg,
                                     const MeanLearner& learner, Rng& rng,
                                     AuditTrail& audit) {
  PartialEstimate out;
  out.columns = trace.learner_set;
  if (out.columns.empty()) return out;

  LearnerRequest request;
  request.data = learner_block;
  request.columns = trace.learner_set;
  request.marginal_bounds = trace.learner_u;
  request.scales.reserve(trace.learner_u.size());
  for (double u : trace.learner_u) request.scales.push_back(1.0 / std::sqrt(u));
  request.epsilon = cfg.epsilon;
  request.alpha = cfg.alpha / 5.0;
  request.beta = cfg.beta;
  request.norm_bound = std::sqrt(static_cast<double>(cfg.d));
  request.block = kLearnerBlockId;

  const LearnerResult result = learner.learn(request, rng, audit);
  out.invoked = true;
  out.values.resize(out.columns.size());
  for (std::size_t k = 0; k < out.columns.size(); ++k) {
    out.values[k] = std::sqrt(trace.learner_u[k]) * result.mu_hat[k];
  }
  return out;
}

// B_F = 4 ln(m1 / beta).
inline double final_round_radius(std::size_t m1, double beta) {
  return 4.0 * std::log(static_cast<double>(m1) / beta);
}

inline PartialEstimate final_round(const BlockView& final_block,
                                   std::span<const std::size_t> final_set,
                                   const DerivedParams& p,
                                   const EstimatorConfig& cfg, Rng& rng,
                                   AuditTrail& audit) {
  PartialEstimate out;
  out.columns.assign(final_set.begin(), final_set.end());
  if (final_set.empty()) return out;
  out.radius = final_round_radius(p.m1, cfg.beta);
  const TruncationRadius radius(out.radius);
  const auto clipped = tmean(final_block, final_set, {}, radius);
  out.truncation_count = clipped.truncated_rows;
  const NoiseSpec spec(
      tmean_sensitivity(radius, final_block.rows,
                        coordinate_cap(final_set.size(), {})),
      cfg.epsilon);
  out.values = laplace_mechanism(clipped.mean, spec, rng, &audit, kFinalBlockId);
  out.invoked = true;
  return out;
}

// Votes per coordinate on whether its mean exceeds 1/2, from the flip block:
// the plain column means (l1 sensitivity d/m_flip) plus Laplace noise.
// Returns the mask of coordinates to flip.
inline std::vector<bool> flip_preprocess(const BlockView& flip_block,
                                         const EstimatorConfig& cfg, Rng& rng,
                                         AuditTrail& audit) {
  if (flip_block.rows == 0) throw InsufficientSamples("flip block is empty");
  const TruncationRadius radius(static_cast<double>(flip_block.dim));
  const auto mean = tmean(flip_block, radius).mean;
  const NoiseSpec spec(
      tmean_sensitivity(radius, flip_block.rows,
                        coordinate_cap(flip_block.dim, {})),
      cfg.epsilon);
  const auto noisy = laplace_mechanism(mean, spec, rng, &audit, kFlipBlockId);
  std::vector<bool> mask(noisy.size());
  for (std::size_t j = 0; j < noisy.size(); ++j) mask[j] = noisy[j] > 0.5;
  return mask;
}

// x -> 1 - x on masked columns for rows [first_row, rows()).
inline void apply_flip(BinaryMatrix& X, const std::vector<bool>& mask,
                       std::size_t first_row = 0) {
  if (mask.size() != X.dim()) throw DimensionMismatch("flip mask dimension");
  auto cells = X.mutable_cells();
  for (std::size_t i = first_row; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.dim(); ++j) {
      if (mask[j]) cells[i * X.dim() + j] ^= 1;
    }
  }
}

struct SampleUsage {
  std::size_t flip = 0;
  std::size_t partition = 0;
  std::size_t final_round = 0;
  std::size_t learner = 0;
  std::size_t surplus = 0;

  std::size_t total() const {
    return flip + partition + final_round + learner + surplus;
  }
  friend bool operator==(const SampleUsage&, const SampleUsage&) = default;
};

struct EstimateReport {
  ProductDistribution q{std::vector<double>{0.0}};
  PartitionTrace trace;
  DerivedParams params;
  AuditTrail audit;
  SampleUsage usage;
  std::vector<bool> flip_mask;
  std::string learner_id;
  bool learner_private = true;
  std::size_t final_truncations = 0;
  double wall_ms = 0.0;

  std::vector<std::string> warnings() const {
    auto out = trace.warnings;
    if (!learner_private) {
      out.push_back("learner '" + learner_id +
                    "' is not differentially private");
    }
    return out;
  }
};

inline EstimateReport estimate(const BinaryMatrix& X,
                               const EstimatorConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const DerivedParams params = derive_params(cfg);
  if (X.dim() != cfg.d) {
    throw DimensionMismatch("dataset has dimension " + std::to_string(X.dim()) +
                            ", config says " + std::to_string(cfg.d));
  }
  const auto learner = make_learner(cfg.learner);
  Rng rng(cfg.seed);

  EstimateReport report;
  report.params = params;
  report.learner_id = learner->id();
  report.learner_private = learner->is_private();

  DataSplit split = split_dataset(X, params);
  BinaryMatrix flipped;
  if (cfg.flip_preprocess) {
    report.flip_mask = flip_preprocess(split.flip, cfg, rng, report.audit);
    if (std::find(report.flip_mask.begin(), report.flip_mask.end(), true) !=
        report.flip_mask.end()) {
      flipped = X;
      apply_flip(flipped, report.flip_mask, params.m_flip);
      split = split_dataset(flipped, params);
    }
  }

  report.trace =
      partition_rounds(split.rounds, params, cfg, rng, report.audit);
  const PartialEstimate heavy = learner_phase(
      split.learner_block, report.trace, cfg, *learner, rng, report.audit);
  const PartialEstimate light = final_round(
      split.final_block, report.trace.final_set, params, cfg, rng, report.audit);
  report.final_truncations = light.truncation_count;

  std::vector<double> q(cfg.d, 0.0);
  for (const PartialEstimate* part : {&heavy, &light}) {
    for (std::size_t k = 0; k < part->values.size(); ++k) {
      q[part->columns[k]] = part->values[k];
    }
  }
  for (std::size_t j = 0; j < cfg.d; ++j) {
    q[j] = std::clamp(q[j], 0.0, 1.0);
    if (!report.flip_mask.empty() && report.flip_mask[j]) q[j] = 1.0 - q[j];
  }
  report.q = ProductDistribution(std::move(q));

  report.usage.flip = params.m_flip;
  report.usage.partition = params.m * params.R;
  report.usage.final_round = params.m1;
  report.usage.learner = params.m0;
  report.usage.surplus = split.surplus;

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace purdest

#endif  // PURDEST_ESTIMATOR_HPP_
