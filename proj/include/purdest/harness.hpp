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

// Experiment plumbing: synthetic product distributions, i.i.d. sampling,
// repeated seeded estimation trials and the truncated-mean sensitivity audit.

#ifndef PURDEST_HARNESS_HPP_
#define PURDEST_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "purdest/dataset.hpp"
#include "purdest/errors.hpp"
#include "purdest/estimator.hpp"
#include "purdest/mechanisms.hpp"
#include "purdest/metrics.hpp"
#include "purdest/random.hpp"

namespace purdest {

struct MarginalProfile {
  enum class Kind { kUniform, kPowerLaw, kMixed, kExplicit };

  Kind kind = Kind::kUniform;
  std::size_t d = 0;
  std::vector<double> args;  // kind-specific; the list itself for kExplicit

  static MarginalProfile uniform(std::size_t d, double p) {
    return {Kind::kUniform, d, {p}};
  }
  static MarginalProfile powerlaw(std::size_t d, double exponent, double pmax) {
    return {Kind::kPowerLaw, d, {exponent, pmax}};
  }
  static MarginalProfile mixed(std::size_t d, std::size_t heavy_count,
                               double p_heavy, double p_light) {
    return {Kind::kMixed, d,
            {static_cast<double>(heavy_count), p_heavy, p_light}};
  }
  static MarginalProfile explicit_list(std::vector<double> means) {
    const std::size_t d = means.size();
    return {Kind::kExplicit, d, std::move(means)};
  }

  // Grammar: uniform:P | powerlaw:EXP,PMAX | mixed:H,PH,PL | explicit:P1,P2,..
  // `d` is ignored for explicit lists, which carry their own dimension.
  static MarginalProfile parse(const std::string& spec, std::size_t d) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw InvalidConfig("profile '" + spec + "' lacks a ':'");
    }
    const std::string kind = spec.substr(0, colon);
    std::vector<double> values;
    std::stringstream body(spec.substr(colon + 1));
    std::string item;
    while (std::getline(body, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidConfig("profile '" + spec + "': bad number '" + item + "'");
      }
    }
    auto expect = [&](std::size_t n) {
      if (values.size() != n) {
        throw InvalidConfig("profile '" + spec + "' expects " +
                            std::to_string(n) + " values");
      }
    };
    if (kind == "uniform") {
      expect(1);
      return uniform(d, values[0]);
    }
    if (kind == "powerlaw") {
      expect(2);
      return powerlaw(d, values[0], values[1]);
    }
    if (kind == "mixed") {
      expect(3);
      if (values[0] < 0 || values[0] != std::floor(values[0])) {
        throw InvalidConfig("mixed heavy count must be a nonnegative integer");
      }
      return mixed(d, static_cast<std::size_t>(values[0]), values[1], values[2]);
    }
    if (kind == "explicit") {
      if (values.empty()) throw InvalidConfig("explicit profile is empty");
      return explicit_list(std::move(values));
    }
    throw InvalidConfig("unknown profile kind '" + kind + "'");
  }
};

namespace internal {

inline void require_mean(double p, bool allow_zero, const char* what) {
  const bool ok = allow_zero ? (p >= 0.0 && p <= 1.0) : (p > 0.0 && p <= 1.0);
  if (!ok) {
    throw InvalidConfig(std::string(what) + " " + std::to_string(p) +
                        (allow_zero ? " outside [0, 1]" : " outside (0, 1]"));
  }
}

// Fisher-Yates with a fixed index rule so positions do not depend on the
// standard library's shuffle.
inline void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace internal

inline ProductDistribution gen_distribution(const MarginalProfile& profile,
                                            std::uint64_t seed) {
  using Kind = MarginalProfile::Kind;
  if (profile.kind != Kind::kExplicit && profile.d < 1) {
    throw InvalidConfig("profile dimension must be at least 1");
  }
  std::vector<double> means;
  switch (profile.kind) {
    case Kind::kUniform:
      internal::require_mean(profile.args.at(0), false, "uniform marginal");
      means.assign(profile.d, profile.args[0]);
      break;
    case Kind::kPowerLaw: {
      const double exponent = profile.args.at(0);
      const double pmax = profile.args.at(1);
      if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
        throw InvalidConfig("power-law exponent must be >= 0");
      }
      internal::require_mean(pmax, false, "power-law pmax");
      means.resize(profile.d);
      for (std::size_t j = 0; j < profile.d; ++j) {
        means[j] = pmax * std::pow(static_cast<double>(j + 1), -exponent);
      }
      break;
    }
    case Kind::kMixed: {
      const auto heavy = static_cast<std::size_t>(profile.args.at(0));
      if (heavy > profile.d) {
        throw InvalidConfig("mixed profile has more heavy coordinates than d");
      }
      internal::require_mean(profile.args.at(1), false, "mixed p_heavy");
      internal::require_mean(profile.args.at(2), false, "mixed p_light");
      std::vector<std::size_t> order(profile.d);
      for (std::size_t j = 0; j < profile.d; ++j) order[j] = j;
      internal::seeded_shuffle(order, derive_seed(seed, 0x6d69786564ULL));
      means.assign(profile.d, profile.args[2]);
      for (std::size_t k = 0; k < heavy; ++k) means[order[k]] = profile.args[1];
      break;
    }
    case Kind::kExplicit:
      for (double p : profile.args) {
        internal::require_mean(p, true, "explicit marginal");
      }
      means = profile.args;
      break;
  }
  return ProductDistribution(std::move(means));
}

// n i.i.d. rows from P.
inline BinaryMatrix sample_dataset(const ProductDistribution& P, std::size_t n,
                                   std::uint64_t seed) {
  const std::size_t d = P.dim();
  // Entry j is 1 iff a 53-bit uniform integer falls below p_j * 2^53.
  std::vector<std::uint64_t> cutoff(d);
  for (std::size_t j = 0; j < d; ++j) {
    cutoff[j] = static_cast<std::uint64_t>(std::ldexp(P[j], 53));
  }
  BinaryMatrix X(n, d);
  auto cells = X.mutable_cells();
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t* row = cells.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = static_cast<std::uint8_t>((rng() >> 11) < cutoff[j]);
    }
  }
  return X;
}

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> tv_exact;
  double tv_upper = 0.0;
  bool success = false;
  std::size_t rounds = 0;
  std::size_t truncations = 0;
  double wall_ms = 0.0;
  std::vector<double> q;

  double tv() const { return tv_exact.value_or(tv_upper); }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Aggregate {
  double success_rate = 0.0;
  double mean_tv = 0.0;
  double median_tv = 0.0;
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct TrialAudit {
  std::size_t trial = 0;
  AuditRecord record;
  friend bool operator==(const TrialAudit&, const TrialAudit&) = default;
};

inline constexpr const char* kTvExact = "exact";
inline constexpr const char* kTvUpperBound = "upper-bound";

struct ExperimentReport {
  EstimatorConfig config;
  std::string profile;
  std::size_t trials_requested = 0;
  std::vector<double> p;  // planted marginals
  DerivedParams params;
  std::string tv_kind = kTvExact;
  std::vector<TrialRecord> trials;
  Aggregate aggregate;
  std::vector<TrialAudit> audit_trail;
  std::vector<std::string> warnings;
};

inline Aggregate aggregate_trials(const std::vector<TrialRecord>& trials) {
  Aggregate agg;
  if (trials.empty()) return agg;
  std::vector<double> tvs;
  std::size_t wins = 0;
  double sum = 0.0;
  for (const auto& t : trials) {
    tvs.push_back(t.tv());
    sum += t.tv();
    if (t.success) ++wins;
  }
  const double n = static_cast<double>(trials.size());
  agg.success_rate = static_cast<double>(wins) / n;
  agg.mean_tv = sum / n;
  std::sort(tvs.begin(), tvs.end());
  const std::size_t mid = tvs.size() / 2;
  agg.median_tv =
      tvs.size() % 2 == 1 ? tvs[mid] : 0.5 * (tvs[mid - 1] + tvs[mid]);
  return agg;
}

// PURDEST_THREADS, with 0 or unset meaning one worker per hardware thread.
inline std::size_t thread_budget() {
  std::size_t requested = 0;
  if (const char* env = std::getenv("PURDEST_THREADS")) {
    requested = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
  }
  if (requested == 0) {
    requested = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  return requested;
}

struct ExperimentOptions {
  std::size_t threads = 0;      // 0 = thread_budget()
  bool redact_timing = false;   // write wall_ms as 0 for byte-stable output
};

// Seeds used by trial `index` of an experiment with `master` seed.
struct TrialSeeds {
  std::uint64_t trial;
  std::uint64_t data;
  std::uint64_t estimator;
};

inline TrialSeeds trial_seeds(std::uint64_t master, std::size_t index) {
  const std::uint64_t trial = derive_seed(master, index);
  return {trial, derive_seed(trial, 1), derive_seed(trial, 2)};
}

inline ExperimentReport run_experiment(const EstimatorConfig& cfg,
                                       const MarginalProfile& profile,
                                       const std::string& profile_spec,
                                       std::size_t trials,
                                       ExperimentOptions options = {}) {
  if (trials < 1) throw InvalidConfig("trials must be at least 1");
  cfg.validate();
  const ProductDistribution P = gen_distribution(profile, cfg.seed);
  if (P.dim() != cfg.d) {
    throw InvalidConfig("profile dimension " + std::to_string(P.dim()) +
                        " does not match d=" + std::to_string(cfg.d));
  }
  const double pmax = *std::max_element(P.means().begin(), P.means().end());
  if (pmax > 0.5 && !cfg.flip_preprocess) {
    throw InvalidConfig(
        "profile has a marginal above 1/2; enable flip preprocessing");
  }

  ExperimentReport report;
  report.config = cfg;
  report.profile = profile_spec;
  report.trials_requested = trials;
  report.p.assign(P.means().begin(), P.means().end());
  report.params = derive_params(cfg);
  const bool exact = cfg.d <= kMaxEnumerationDim;
  report.tv_kind = exact ? kTvExact : kTvUpperBound;
  report.trials.resize(trials);
  std::vector<AuditTrail> audits(trials);
  std::vector<std::vector<std::string>> warnings(trials);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        const TrialSeeds seeds = trial_seeds(cfg.seed, t);
        const auto start = std::chrono::steady_clock::now();
        const BinaryMatrix X =
            sample_dataset(P, report.params.rows_required(), seeds.data);
        EstimatorConfig trial_cfg = cfg;
        trial_cfg.seed = seeds.estimator;
        EstimateReport est = estimate(X, trial_cfg);
        const double wall = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();

        TrialRecord& rec = report.trials[t];
        rec.trial = t;
        rec.seed = seeds.trial;
        rec.tv_upper = tv_product_upper(P, est.q);
        if (exact) rec.tv_exact = tv_product_exact(P, est.q);
        rec.success = rec.tv() <= cfg.alpha;
        rec.rounds = est.trace.rounds.size();
        rec.truncations = est.trace.truncations();
        rec.wall_ms = options.redact_timing ? 0.0 : wall;
        rec.q.assign(est.q.means().begin(), est.q.means().end());
        audits[t] = std::move(est.audit);
        warnings[t] = est.warnings();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const std::size_t threads =
      std::min(trials, options.threads ? options.threads : thread_budget());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& rec : audits[t]) report.audit_trail.push_back({t, std::move(rec)});
    for (auto& w : warnings[t]) {
      if (std::find(report.warnings.begin(), report.warnings.end(), w) ==
          report.warnings.end()) {
        report.warnings.push_back(std::move(w));
      }
    }
  }
  if (cfg.c_scale < 1.0) {
    report.warnings.push_back(
        "c_scale < 1: sample sizes are below the guarantee regime");
  }
  report.aggregate = aggregate_trials(report.trials);
  return report;
}

struct SensitivityAudit {
  std::size_t m = 0;
  std::size_t d = 0;
  double radius = 0.0;
  std::size_t pairs = 0;
  double max_diff = 0.0;
  double bound = 0.0;          // replacement sensitivity, min(2B, d)/m
  double claimed_bound = 0.0;  // B/m

  bool holds() const { return max_diff <= bound + 1e-12; }
  bool holds_claimed() const { return max_diff <= claimed_bound + 1e-12; }
};

// Replaces one row of seeded random datasets and records the largest l1 move
// of the truncated mean. Row densities vary from empty to full so that both
// clipped and unclipped rows appear on either side of a pair.
inline SensitivityAudit audit_sensitivity(std::size_t m, std::size_t d,
                                          double radius, std::size_t pairs,
                                          std::uint64_t seed) {
  if (pairs < 1) throw InvalidConfig("audit needs at least one pair");
  if (m < 1 || d < 1) throw InvalidConfig("audit needs m >= 1 and d >= 1");
  const TruncationRadius B(radius);
  SensitivityAudit out;
  out.m = m;
  out.d = d;
  out.radius = radius;
  out.pairs = pairs;
  out.bound = tmean_sensitivity(B, m, static_cast<double>(d));
  out.claimed_bound = radius / static_cast<double>(m);

  Rng rng(seed);
  auto random_row = [&](std::uint8_t* row) {
    const double density = uniform01(rng);
    for (std::size_t j = 0; j < d; ++j) row[j] = uniform01(rng) < density;
  };
  constexpr std::size_t kPairsPerDataset = 50;
  BinaryMatrix base;
  std::vector<double> base_mean;
  for (std::size_t k = 0; k < pairs; ++k) {
    if (k % kPairsPerDataset == 0) {
      base = BinaryMatrix(m, d);
      for (std::size_t i = 0; i < m; ++i) {
        random_row(base.mutable_cells().data() + i * d);
      }
      base_mean = tmean(base.all(), B).mean;
    }
    BinaryMatrix neighbor = base;
    const std::size_t victim = static_cast<std::size_t>(rng() % m);
    random_row(neighbor.mutable_cells().data() + victim * d);
    const auto other = tmean(neighbor.all(), B).mean;
    double diff = 0.0;
    for (std::size_t j = 0; j < d; ++j) diff += std::abs(base_mean[j] - other[j]);
    out.max_diff = std::max(out.max_diff, diff);
  }
  return out;
}

}  // namespace purdest

#endif  // PURDEST_HARNESS_HPP_
