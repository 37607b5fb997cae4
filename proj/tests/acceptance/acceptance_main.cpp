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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance [path-to-purdest-cli]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "purdest/purdest.hpp"

namespace purdest {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Every estimate run made by the suite, for the privacy-structure check.
struct EstimateRun {
  EstimatorConfig cfg;
  EstimateReport report;
};
std::vector<EstimateRun> g_runs;

EstimatorConfig full_scale_config(std::size_t d, double alpha, const char* learner) {
  EstimatorConfig cfg;
  cfg.d = d;
  cfg.epsilon = 1.0;
  cfg.alpha = alpha;
  cfg.beta = 0.1;
  cfg.learner = learner;
  return cfg;
}

EstimateReport run_estimate(const ProductDistribution& P, EstimatorConfig cfg,
                            std::uint64_t master, std::size_t index,
                            BinaryMatrix* keep = nullptr) {
  const TrialSeeds seeds = trial_seeds(master, index);
  cfg.seed = seeds.estimator;
  BinaryMatrix X =
      sample_dataset(P, derive_params(cfg).rows_required(), seeds.data);
  EstimateReport report = estimate(X, cfg);
  g_runs.push_back({cfg, report});
  if (keep != nullptr) *keep = std::move(X);
  return report;
}

Outcome ac01_divergence_chain() {
  const auto start = Clock::now();
  std::size_t bad = 0;
  for (int i = 1; i <= 99; ++i) {
    for (int k = 1; k <= 99; ++k) {
      const BernoulliPair pq(i / 100.0, k / 100.0);
      const double tv = tv_bernoulli(pq);
      const double kl = kl_bernoulli(pq);
      const double chi2 = chi2_bernoulli(pq);
      bad += !(2.0 * tv * tv <= kl && kl <= chi2);
    }
  }
  const double secs = seconds_since(start);
  return {bad == 0 && secs < 1.0,
          fmt("9801 points, %zu violations, %.3f s (< 1 s)", bad, secs)};
}

Outcome ac02_chi2_bound() {
  std::size_t points = 0;
  std::size_t bad = 0;
  for (int i = 1; i <= 99; ++i) {
    for (int k = 1; k <= 99; ++k) {
      const double p = i / 100.0;
      const double q = k / 100.0;
      if (std::abs(p - q) > 0.25 || p > 0.5) continue;
      ++points;
      bad += !(chi2_bernoulli(BernoulliPair(p, q)) <= 4.0 * (p - q) * (p - q) / q);
    }
  }
  return {bad == 0, fmt("%zu grid points, %zu violations", points, bad)};
}

Outcome ac03_kl_additivity() {
  Rng rng(3);
  double worst = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const auto a = testing::random_means(rng, 8, 0.02, 0.98);
    const auto b = testing::random_means(rng, 8, 0.02, 0.98);
    const double lib = kl_product(ProductDistribution(a), ProductDistribution(b));
    worst = std::max(worst, std::abs(lib - testing::enumerate_kl(a, b)));
  }
  return {worst <= 1e-12, fmt("1000 pairs, max |diff| = %.3e (<= 1e-12)", worst)};
}

Outcome ac04_tv_subadditivity() {
  const auto start = Clock::now();
  Rng rng(4);
  std::size_t bad = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const ProductDistribution P(testing::random_means(rng, 10, 0.0, 1.0));
    const ProductDistribution Q(testing::random_means(rng, 10, 0.0, 1.0));
    bad += !(tv_product_exact(P, Q) <= tv_product_upper(P, Q));
  }
  const double secs = seconds_since(start);
  return {bad == 0 && secs < 10.0,
          fmt("1000 pairs, %zu violations, %.3f s (< 10 s)", bad, secs)};
}

Outcome ac05_tmean_sensitivity() {
  bool pass = true;
  std::string detail;
  for (double B : {1.0, 4.0, 16.0}) {
    const auto audit = audit_sensitivity(100, 16, B, 1000, 5);
    pass = pass && audit.holds_claimed();
    detail += fmt("B=%g: max=%.4f vs B/m=%.4f (replacement bound %.4f); ", B,
                  audit.max_diff, audit.claimed_bound, audit.bound);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome ac06_laplace() {
  const auto start = Clock::now();
  constexpr std::size_t n = 1000000;
  Rng rng(6);
  std::vector<double> draws(n);
  for (double& x : draws) x = laplace_sample(1.0, rng);
  double tail10 = 0.0;
  double tail01 = 0.0;
  const double level10 = laplace_tail_threshold(1.0, 0.1);
  const double level01 = laplace_tail_threshold(1.0, 0.01);
  for (double x : draws) {
    tail10 += std::abs(x) > level10;
    tail01 += std::abs(x) > level01;
  }
  tail10 /= n;
  tail01 /= n;
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draws[i];
    const double cdf = x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                   std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  const double secs = seconds_since(start);
  const bool pass = ks < 0.01 &&
                    tail10 <= 0.1 + testing::binomial_slack(0.1, n) &&
                    tail01 <= 0.01 + testing::binomial_slack(0.01, n) &&
                    secs < 5.0;
  return {pass, fmt("KS=%.5f (< 0.01), tail(0.1)=%.5f, tail(0.01)=%.5f, %.2f s (< 5 s)",
                    ks, tail10, tail01, secs)};
}

// Fraction of `trials` seeded experiments for which `event` holds.
double frequency(std::uint64_t seed, std::size_t trials,
                 const std::function<bool(Rng&)>& event) {
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) hits += event(rng);
  return static_cast<double>(hits) / static_cast<double>(trials);
}

std::size_t binomial_draw(Rng& rng, double p, std::size_t m) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m; ++i) hits += uniform01(rng) < p;
  return hits;
}

Outcome ac07_tail_bounds() {
  constexpr std::size_t kTrials = 100000;
  bool pass = true;
  int checks = 0;
  double worst_excess = -1.0;
  auto check = [&](double observed, double bound) {
    ++checks;
    const double excess = observed - bound - testing::binomial_slack(bound, kTrials);
    worst_excess = std::max(worst_excess, excess);
    pass = pass && excess <= 0.0;
  };
  struct Point {
    double p;
    std::size_t m;
    double dev;
  };
  for (const Point& pt : {Point{0.2, 40, 0.1}, Point{0.1, 100, 0.05}, Point{0.5, 20, 0.2}}) {
    const double f = frequency(71, kTrials, [&](Rng& rng) {
      return binomial_draw(rng, pt.p, pt.m) >= (pt.p + pt.dev) * pt.m;
    });
    check(f, bernstein_upper_tail(TailQuery(pt.p, pt.m, pt.dev)));
  }
  for (const Point& pt : {Point{0.1, 100, 0.5}, Point{0.3, 30, 0.5}, Point{0.05, 200, 1.0}}) {
    const double f = frequency(72, kTrials, [&](Rng& rng) {
      return binomial_draw(rng, pt.p, pt.m) >= (1.0 + pt.dev) * pt.p * pt.m;
    });
    check(f, chernoff_mult_tail(TailQuery(pt.p, pt.m, pt.dev)));
  }
  struct RowPoint {
    double p;
    std::size_t t;
    double m;
    double beta;
  };
  for (const RowPoint& pt : {RowPoint{0.25, 8, 2.0, 0.5}, RowPoint{0.05, 10, 1.0, 0.9},
                             RowPoint{0.2, 16, 1.0, 0.5}}) {
    const double level = row_norm_threshold(pt.p, pt.t, pt.m, pt.beta);
    const double f = frequency(73, kTrials, [&](Rng& rng) {
      return static_cast<double>(binomial_draw(rng, pt.p, pt.t)) >= level;
    });
    check(f, pt.beta / pt.m);
  }
  return {pass, fmt("%d parameter points x 1e5 trials, worst (observed - bound - 3 sigma) = %.2e",
                    checks, worst_excess)};
}

// Every coordinate active in round r has p_j <= u_r.
bool honest(const PartitionTrace& trace, const ProductDistribution& P) {
  for (const auto& round : trace.rounds) {
    for (std::size_t j : round.active) {
      if (P[j] > round.u) return false;
    }
  }
  return true;
}

Outcome ac08_no_truncation() {
  const auto start = Clock::now();
  // Staircase: two marginals at each of 1/2 and 1/4, four at 1/8, eight at 1/16.
  std::vector<double> means{0.5, 0.5, 0.25, 0.25};
  means.insert(means.end(), 4, 0.125);
  means.insert(means.end(), 8, 0.0625);
  const ProductDistribution P(means);
  const auto cfg = full_scale_config(16, 0.25, ClippedLaplaceLearner::kId);
  std::size_t clean = 0;
  std::size_t honest_runs = 0;
  for (std::size_t run = 0; run < 100; ++run) {
    const auto report = run_estimate(P, cfg, 8008, run);
    honest_runs += honest(report.trace, P);
    clean += report.trace.truncations() == 0;
  }
  const double secs = seconds_since(start);
  return {clean >= 95 && secs < 600.0,
          fmt("%zu/100 runs truncation-free (>= 95), %zu/100 with honest bounds, %.1f s",
              clean, honest_runs, secs)};
}

Outcome ac09_threshold_bounds() {
  const auto cfg = full_scale_config(16, 0.25, ClippedLaplaceLearner::kId);
  const auto P = gen_distribution(MarginalProfile::mixed(16, 2, 0.5, 0.01), 9009);
  std::size_t violating = 0;
  std::size_t filtered = 0;
  for (std::size_t run = 0; run < 100; ++run) {
    const auto report = run_estimate(P, cfg, 9009, run);
    bool bad = false;
    for (const auto& round : report.trace.rounds) {
      for (std::size_t j : round.filtered) {
        bad = bad || P[j] < 15.0 * round.tau / 17.0;
        ++filtered;
      }
      for (std::size_t k = 0; k < round.active.size(); ++k) {
        const std::size_t j = round.active[k];
        const bool survived = std::find(round.filtered.begin(), round.filtered.end(),
                                        j) == round.filtered.end();
        if (survived) bad = bad || P[j] > round.u / 2.0;
      }
    }
    violating += bad;
  }
  return {violating <= 5,
          fmt("%zu/100 runs with a violation (<= 5), %zu filtered coordinates checked",
              violating, filtered)};
}

Outcome ac10_end_to_end() {
  const auto start = Clock::now();
  auto cfg = full_scale_config(8, 0.3, ClippedLaplaceLearner::kId);
  cfg.seed = 1010;
  const auto report = run_experiment(cfg, MarginalProfile::uniform(8, 0.2),
                                     "uniform:0.2", 20, {0, true});
  std::size_t wins = 0;
  for (const auto& t : report.trials) wins += t.tv_exact.value() <= cfg.alpha;
  const double secs = seconds_since(start);
  return {wins >= 16 && secs < 900.0,
          fmt("%zu/20 trials with exact TV <= 0.3 (>= 16), median TV %.4f, %.1f s",
              wins, report.aggregate.median_tv, secs)};
}

Outcome ac11_scaling_round_trip() {
  auto cfg = full_scale_config(16, 0.25, OracleLearner::kId);
  cfg.c_scale = 1.0 / 64;
  const auto P = gen_distribution(MarginalProfile::powerlaw(16, 1.0, 0.5), 1111);
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t groups = 0;
  for (std::size_t run = 0; run < 50; ++run) {
    BinaryMatrix X;
    const auto report = run_estimate(P, cfg, 1111, run, &X);
    const auto split = split_dataset(X, report.params);
    const auto z_means = column_means(split.learner_block);
    for (std::size_t j : report.trace.learner_set) {
      worst = std::max(worst, std::abs(report.q[j] - z_means[j]));
      ++checked;
    }
    for (const auto& round : report.trace.rounds) groups += !round.filtered.empty();
  }
  return {checked > 0 && worst <= 1e-12,
          fmt("50 runs, %zu coordinates in %zu round groups, max |q - mean(Z)| = %.2e",
              checked, groups, worst)};
}

// Expected l1 sensitivity per block, recomputed from the trace.
std::map<std::string, double> expected_sensitivities(const EstimateRun& run) {
  const auto& cfg = run.cfg;
  const auto& rep = run.report;
  const auto& p = rep.params;
  std::map<std::string, double> out;
  for (const auto& round : rep.trace.rounds) {
    out[round_block_id(round.r)] =
        tmean_sensitivity(TruncationRadius(round.radius), p.m,
                          static_cast<double>(round.active.size()));
  }
  if (!rep.trace.final_set.empty()) {
    out[kFinalBlockId] = tmean_sensitivity(
        TruncationRadius(final_round_radius(p.m1, cfg.beta)), p.m1,
        static_cast<double>(rep.trace.final_set.size()));
  }
  if (!rep.trace.learner_set.empty()) {
    if (cfg.learner == ClippedLaplaceLearner::kId) {
      LearnerRequest req;
      req.data.rows = p.m0;
      req.beta = cfg.beta;
      req.columns = rep.trace.learner_set;
      req.marginal_bounds = rep.trace.learner_u;
      for (double u : rep.trace.learner_u) req.scales.push_back(1.0 / std::sqrt(u));
      out[kLearnerBlockId] = tmean_sensitivity(
          TruncationRadius(ClippedLaplaceLearner::clip_radius(req)), p.m0,
          coordinate_cap(req.dim(), req.scales));
    } else {
      out[kLearnerBlockId] = 0.0;
    }
  }
  if (cfg.flip_preprocess) {
    const double d = static_cast<double>(cfg.d);
    out[kFlipBlockId] = tmean_sensitivity(TruncationRadius(d), p.m_flip, d);
  }
  return out;
}

Outcome ac12_privacy_structure() {
  // Extra runs with flipping on, so the flip block is covered as well.
  for (std::size_t run = 0; run < 20; ++run) {
    auto cfg = full_scale_config(16, 0.25, ClippedLaplaceLearner::kId);
    cfg.c_scale = 1.0 / 64;
    cfg.flip_preprocess = run % 2 == 0;
    std::vector<double> means(16, 0.02);
    means[3] = 0.85;
    means[9] = 0.4;
    run_estimate(ProductDistribution(means), cfg, 1212, run);
  }
  std::size_t bad_runs = 0;
  std::size_t records = 0;
  for (const auto& run : g_runs) {
    const auto expected = expected_sensitivities(run);
    std::map<std::string, int> uses;
    bool ok = true;
    for (const auto& rec : run.report.audit) {
      ++uses[rec.block];
      ++records;
      const auto it = expected.find(rec.block);
      ok = ok && it != expected.end() && rec.sensitivity == it->second &&
           rec.epsilon == run.cfg.epsilon &&
           rec.scale == rec.sensitivity / rec.epsilon;
    }
    ok = ok && uses.size() == expected.size();
    for (const auto& [block, count] : uses) ok = ok && count == 1;
    bad_runs += !ok;
  }
  return {bad_runs == 0,
          fmt("%zu estimate runs, %zu audit records, %zu runs with a structural mismatch",
              g_runs.size(), records, bad_runs)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac13_determinism(const char* cli) {
  EstimatorConfig cfg;
  cfg.d = 8;
  cfg.epsilon = 0.5;
  cfg.alpha = 0.3;
  cfg.beta = 0.1;
  cfg.c_scale = 0.0625;
  cfg.seed = 20240611;
  const auto profile = MarginalProfile::parse("mixed:2,0.4,0.05", 8);
  const std::string a = to_json(run_experiment(cfg, profile, "mixed:2,0.4,0.05", 3, {0, true}));
  const std::string b = to_json(run_experiment(cfg, profile, "mixed:2,0.4,0.05", 3, {0, true}));
  bool pass = a == b;
  std::string detail = fmt("library: %zu bytes, %s", a.size(), a == b ? "identical" : "differ");
  if (cli != nullptr) {
    const auto dir = std::filesystem::temp_directory_path();
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / ("purdest_ac13_" + std::to_string(k) + ".json");
      const std::string cmd =
          std::string("\"") + cli +
          "\" experiment --d 8 --eps 0.5 --alpha 0.3 --beta 0.1 --c-scale 0.0625"
          " --learner clipped-laplace --seed 20240611 --profile mixed:2,0.4,0.05"
          " --trials 3 --format json --redact-timing --out \"" +
          path.string() + "\" > /dev/null 2>&1";
      pass = pass && std::system(cmd.c_str()) == 0;
      outs[k] = slurp(path);
      std::filesystem::remove(path);
    }
    const bool same = !outs[0].empty() && outs[0] == outs[1];
    pass = pass && same && outs[0] == a;
    detail += fmt("; CLI: %zu bytes, %s", outs[0].size(),
                  same ? (outs[0] == a ? "identical, equal to library"
                                       : "identical, differs from library")
                       : "differ");
  } else {
    detail += "; CLI not given, library path only";
  }
  return {pass, detail};
}

Outcome ac14_efficiency() {
  auto cfg = full_scale_config(64, 0.25, ClippedLaplaceLearner::kId);
  cfg.c_scale = 1.0 / 16;
  const auto P = gen_distribution(MarginalProfile::mixed(64, 4, 0.4, 0.01), 1414);
  const auto report = run_estimate(P, cfg, 1414, 0);
  return {report.wall_ms > 0.0 && report.wall_ms < 600000.0,
          fmt("d=64, n_total=%zu, wall time %.1f ms recorded (< 10 min), TV upper %.4f",
              report.params.n_total, report.wall_ms, tv_product_upper(P, report.q))};
}

}  // namespace
}  // namespace purdest

int main(int argc, char** argv) {
  using namespace purdest;
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC01 divergence chain 2TV^2 <= KL <= chi2", ac01_divergence_chain},
      {"AC02 chi2 Bernoulli bound", ac02_chi2_bound},
      {"AC03 KL additivity vs enumeration", ac03_kl_additivity},
      {"AC04 TV sub-additivity", ac04_tv_subadditivity},
      {"AC05 truncated-mean sensitivity <= B/m", ac05_tmean_sensitivity},
      {"AC06 Laplace sampler", ac06_laplace},
      {"AC07 tail-bound soundness", ac07_tail_bounds},
      {"AC08 no truncation in partitioning rounds", ac08_no_truncation},
      {"AC09 threshold filtering bounds", ac09_threshold_bounds},
      {"AC10 end-to-end guarantee regime", ac10_end_to_end},
      {"AC11 scaling round-trip identity", ac11_scaling_round_trip},
      {"AC12 privacy structure of the audit trail", ac12_privacy_structure},
      {"AC13 byte-identical experiment JSON", [cli] { return ac13_determinism(cli); }},
      {"AC14 efficiency at d=64", ac14_efficiency},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
