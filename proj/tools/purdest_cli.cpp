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

// Command-line front end: estimation runs, repeated experiments, the
// truncated-mean sensitivity audit, and divergence evaluation.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "purdest/purdest.hpp"

namespace {

struct RunFlags {
  purdest::EstimatorConfig cfg;
  std::string profile = "uniform:0.2";
  std::string out;
  std::string format = "json";
  std::size_t trials = 1;
  bool redact_timing = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--d", f.cfg.d, "Dimension")->required();
  app->add_option("--eps", f.cfg.epsilon, "Privacy parameter epsilon")->required();
  app->add_option("--alpha", f.cfg.alpha, "Target TV accuracy")->required();
  app->add_option("--beta", f.cfg.beta, "Failure probability")->required();
  app->add_option("--c-scale", f.cfg.c_scale, "Multiplier on sample-size constants")
      ->capture_default_str();
  app->add_option("--c-alpha", f.cfg.c_alpha, "Learner sample-size factor")
      ->capture_default_str();
  app->add_option("--learner", f.cfg.learner, "oracle | clipped-laplace")
      ->capture_default_str();
  app->add_flag("--flip", f.cfg.flip_preprocess,
                "Privately flip coordinates with mean above 1/2 first");
  app->add_option("--seed", f.cfg.seed, "Master seed")->required();
  app->add_option("--profile", f.profile,
                  "uniform:P | powerlaw:EXP,PMAX | mixed:H,PH,PL | explicit:P1,P2,..")
      ->required();
  app->add_option("--out", f.out, "Report path")->required();
  app->add_option("--format", f.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_flag("--redact-timing", f.redact_timing,
                "Write wall_ms as 0 so identical runs give identical bytes");
}

int run(const RunFlags& f) {
  const auto profile = purdest::MarginalProfile::parse(f.profile, f.cfg.d);
  purdest::ExperimentOptions options;
  options.redact_timing = f.redact_timing;
  const auto report =
      purdest::run_experiment(f.cfg, profile, f.profile, f.trials, options);
  purdest::emit_report(report, purdest::parse_format(f.format), f.out);

  const auto& p = report.params;
  std::printf("params: R=%zu m=%zu m1=%zu m0=%zu n_total=%zu\n", p.R, p.m, p.m1,
              p.m0, p.n_total);
  std::printf("trials=%zu success_rate=%.4f mean_tv=%.6f median_tv=%.6f (%s)\n",
              report.trials.size(), report.aggregate.success_rate,
              report.aggregate.mean_tv, report.aggregate.median_tv,
              report.tv_kind.c_str());
  for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("report written to %s\n", f.out.c_str());
  return 0;
}

purdest::ProductDistribution parse_marginals(const std::string& text) {
  std::vector<double> means;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      means.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw purdest::InvalidConfig("bad marginal '" + item + "'");
    }
  }
  return purdest::ProductDistribution(std::move(means));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-DP estimation of binary product distributions"};
  app.require_subcommand(1);

  RunFlags estimate_flags;
  auto* estimate_cmd = app.add_subcommand("estimate", "Run one estimate");
  add_run_flags(estimate_cmd, estimate_flags);

  RunFlags experiment_flags;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Run repeated seeded estimation trials");
  add_run_flags(experiment_cmd, experiment_flags);
  experiment_cmd->add_option("--trials", experiment_flags.trials, "Trial count")
      ->required()
      ->check(CLI::PositiveNumber);

  std::size_t audit_m = 100;
  std::size_t audit_dim = 16;
  double audit_radius = 4.0;
  std::size_t audit_pairs = 1000;
  std::uint64_t audit_seed = 0;
  auto* audit_cmd =
      app.add_subcommand("audit", "Check the truncated-mean l1 sensitivity");
  audit_cmd->add_option("--m", audit_m, "Rows per dataset")->capture_default_str();
  audit_cmd->add_option("--dim", audit_dim, "Columns")->capture_default_str();
  audit_cmd->add_option("--radius", audit_radius, "Truncation radius B")
      ->capture_default_str();
  audit_cmd->add_option("--pairs", audit_pairs, "Neighbouring pairs")
      ->capture_default_str();
  audit_cmd->add_option("--seed", audit_seed, "Seed")->capture_default_str();

  std::vector<std::string> tv_args;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "Divergences between two product distributions");
  metrics_cmd->add_option("--exact-tv", tv_args, "Two comma-separated marginal lists")
      ->expected(2)
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate_cmd) {
      estimate_flags.trials = 1;
      return run(estimate_flags);
    }
    if (*experiment_cmd) return run(experiment_flags);
    if (*audit_cmd) {
      const auto audit = purdest::audit_sensitivity(audit_m, audit_dim,
                                                    audit_radius, audit_pairs,
                                                    audit_seed);
      std::printf("{\"m\": %zu, \"dim\": %zu, \"radius\": %s, \"pairs\": %zu, "
                  "\"max_l1_diff\": %s, \"bound\": %s, \"holds\": %s, "
                  "\"b_over_m\": %s, \"within_b_over_m\": %s}\n",
                  audit.m, audit.d, purdest::format_double(audit.radius).c_str(),
                  audit.pairs, purdest::format_double(audit.max_diff).c_str(),
                  purdest::format_double(audit.bound).c_str(),
                  audit.holds() ? "true" : "false",
                  purdest::format_double(audit.claimed_bound).c_str(),
                  audit.holds_claimed() ? "true" : "false");
      return audit.holds() ? 0 : 1;
    }
    if (*metrics_cmd) {
      const auto P = parse_marginals(tv_args.at(0));
      const auto Q = parse_marginals(tv_args.at(1));
      const double upper = purdest::tv_product_upper(P, Q);
      const double kl = purdest::kl_product(P, Q);
      std::printf("tv_exact: %s\n", purdest::format_double(
                                        purdest::tv_product_exact(P, Q)).c_str());
      std::printf("tv_upper: %s\n", purdest::format_double(upper).c_str());
      std::printf("kl: %s\n", std::isfinite(kl) ? purdest::format_double(kl).c_str()
                                                 : "inf");
      std::printf("pinsker_tv_bound: %s\n",
                  std::isfinite(kl)
                      ? purdest::format_double(purdest::pinsker_tv_bound(kl)).c_str()
                      : "inf");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
