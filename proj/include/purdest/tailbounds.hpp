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

// Closed-form tail bounds for sums of independent Bernoulli variables and for
// Laplace noise. These are used as oracles when checking the sampling and
// noise behaviour of the estimator.

#ifndef PURDEST_TAILBOUNDS_HPP_
#define PURDEST_TAILBOUNDS_HPP_

#include <cmath>
#include <cstdint>
#include <string>

#include "purdest/errors.hpp"
#include "purdest/metrics.hpp"

namespace purdest {

struct TailQuery {
  double p;
  std::uint64_t m;
  double deviation;

  TailQuery(double mean, std::uint64_t samples, double dev)
      : p(mean), m(samples), deviation(dev) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("tail query needs p in (0, 1]");
    if (m < 1) throw DomainError("tail query needs m >= 1");
    if (!(deviation >= 0.0)) throw DomainError("deviation must be nonnegative");
  }
};

// Pr[mean of m Ber(p) >= p + eps] <= exp(-KL(p + eps || p) * m).
inline double bernstein_upper_tail(const TailQuery& query) {
  const double shifted = query.p + query.deviation;
  if (shifted > 1.0) {
    throw DomainError("p + deviation exceeds 1 (" + std::to_string(shifted) +
                      ")");
  }
  const double kl = kl_bernoulli(BernoulliPair(shifted, query.p));
  return std::exp(-kl * static_cast<double>(query.m));
}

// Pr[mean of m Ber(p) <= p - eps] <= exp(-KL(p - eps || p) * m).
// Deviations past p leave an empty event.
inline double bernstein_lower_tail(const TailQuery& query) {
  const double shifted = query.p - query.deviation;
  if (shifted < 0.0) return 0.0;
  const double kl = kl_bernoulli(BernoulliPair(shifted, query.p));
  return std::exp(-kl * static_cast<double>(query.m));
}

// Pr[sum of m Ber(p) >= (1 + delta) p m] <= exp(-delta^2 p m / (2 + delta)).
inline double chernoff_mult_tail(const TailQuery& query) {
  const double delta = query.deviation;
  return std::exp(-delta * delta * query.p * static_cast<double>(query.m) /
                  (2.0 + delta));
}

// Norm level that a row of t coordinates, each with mean at most p, exceeds
// with probability at most beta / m:
//   p t (1 + 2 ln(m / beta))   when p t >= 1,
//   4 ln(m / beta)             otherwise.
// `t` may be fractional when coordinates carry weights (scaled rows).
inline double row_norm_threshold(double p, double t, double m, double beta) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("row norm bound needs p in (0, 1]");
  if (!(t >= 1.0)) throw DomainError("row norm bound needs t >= 1");
  if (!(m >= 1.0)) throw DomainError("row norm bound needs m >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("row norm bound needs beta in (0, 1)");
  }
  const double ratio = m / beta;
  if (!(ratio > 1.0)) throw DomainError("row norm bound needs m / beta > 1");
  const double log_ratio = std::log(ratio);
  const double pt = p * t;
  if (pt >= 1.0) return pt * (1.0 + 2.0 * log_ratio);
  return 4.0 * log_ratio;
}

// |Z| exceeds scale * ln(1/beta) with probability at most beta for
// Z ~ Lap(scale).
inline double laplace_tail_threshold(double scale, double beta) {
  if (!(scale > 0.0)) throw DomainError("Laplace scale must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  return scale * std::log(1.0 / beta);
}

}  // namespace purdest

#endif  // PURDEST_TAILBOUNDS_HPP_
