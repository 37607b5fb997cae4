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

// Divergences between Bernoulli distributions and binary product
// distributions over {0,1}^d.
//
// Closed forms are provided for the per-coordinate quantities together with
// brute-force enumeration over the 2^d outcomes for small d. All logarithms
// are natural.

#ifndef PURDEST_METRICS_HPP_
#define PURDEST_METRICS_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "purdest/errors.hpp"

namespace purdest {

// Largest dimension for which the 2^d enumeration oracles will run.
inline constexpr std::size_t kMaxEnumerationDim = 24;

// Returned by KL and chi-squared when the support of the first argument is not
// contained in the support of the second.
inline constexpr double kInfiniteDivergence =
    std::numeric_limits<double>::infinity();

struct BernoulliPair {
  double p;
  double q;

  BernoulliPair(double p_mean, double q_mean) : p(p_mean), q(q_mean) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
      throw DomainError("Bernoulli means must lie in [0, 1], got p=" +
                        std::to_string(p) + " q=" + std::to_string(q));
    }
  }
};

// Mean vector of a product of Bernoulli distributions.
class ProductDistribution {
 public:
  explicit ProductDistribution(std::vector<double> means)
      : means_(std::move(means)) {
    if (means_.empty()) {
      throw DomainError("product distribution needs at least one coordinate");
    }
    for (std::size_t j = 0; j < means_.size(); ++j) {
      if (!(means_[j] >= 0.0 && means_[j] <= 1.0)) {
        throw DomainError("marginal " + std::to_string(j) + " = " +
                          std::to_string(means_[j]) + " is outside [0, 1]");
      }
    }
  }

  std::size_t dim() const { return means_.size(); }
  double operator[](std::size_t j) const { return means_[j]; }
  std::span<const double> means() const { return means_; }

  friend bool operator==(const ProductDistribution&,
                         const ProductDistribution&) = default;

 private:
  std::vector<double> means_;
};

inline double tv_bernoulli(const BernoulliPair& pair) {
  return std::abs(pair.p - pair.q);
}

// (p-q)^2/q + (p-q)^2/(1-q). Zero whenever p == q; +inf when q is on the
// boundary and p differs from it.
inline double chi2_bernoulli(const BernoulliPair& pair) {
  if (pair.p == pair.q) return 0.0;
  if (pair.q <= 0.0 || pair.q >= 1.0) return kInfiniteDivergence;
  const double diff = pair.p - pair.q;
  const double sq = diff * diff;
  return sq / pair.q + sq / (1.0 - pair.q);
}

// p ln(p/q) + (1-p) ln((1-p)/(1-q)) with 0 ln 0 = 0.
inline double kl_bernoulli(const BernoulliPair& pair) {
  const double p = pair.p;
  const double q = pair.q;
  if (p == q) return 0.0;
  if ((p > 0.0 && q <= 0.0) || (p < 1.0 && q >= 1.0)) {
    return kInfiniteDivergence;
  }
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  // Rounding can push tiny divergences a hair below zero.
  return kl < 0.0 ? 0.0 : kl;
}

namespace internal {

inline void require_same_dim(const ProductDistribution& a,
                             const ProductDistribution& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

// Probabilities of all 2^k outcomes over coordinates [begin, begin + k).
// Bit i of the outcome index is coordinate begin + i.
inline std::vector<double> outcome_masses(std::span<const double> means) {
  std::vector<double> mass{1.0};
  mass.reserve(std::size_t{1} << means.size());
  for (double p : means) {
    const std::size_t half = mass.size();
    mass.resize(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
      mass[half + i] = mass[i] * p;
      mass[i] *= 1.0 - p;
    }
  }
  return mass;
}

}  // namespace internal

// Sub-additive upper bound sum_j |p_j - q_j| on the product TV distance.
inline double tv_product_upper(const ProductDistribution& P,
                               const ProductDistribution& Q) {
  internal::require_same_dim(P, Q);
  double total = 0.0;
  for (std::size_t j = 0; j < P.dim(); ++j) total += std::abs(P[j] - Q[j]);
  return total;
}

// Exact TV distance, 1/2 sum_x |P(x) - Q(x)| over all of {0,1}^d.
//
// The outcome space is split into a low and a high half so only 2 * 2^(d/2)
// masses are materialized per distribution.
inline double tv_product_exact(const ProductDistribution& P,
                               const ProductDistribution& Q) {
  internal::require_same_dim(P, Q);
  const std::size_t d = P.dim();
  if (d > kMaxEnumerationDim) {
    throw DimensionTooLarge("exact TV enumeration is capped at d=" +
                            std::to_string(kMaxEnumerationDim) + ", got d=" +
                            std::to_string(d));
  }
  const std::size_t low = d / 2;
  const auto p_lo = internal::outcome_masses(P.means().first(low));
  const auto p_hi = internal::outcome_masses(P.means().subspan(low));
  const auto q_lo = internal::outcome_masses(Q.means().first(low));
  const auto q_hi = internal::outcome_masses(Q.means().subspan(low));
  double total = 0.0;
  for (std::size_t h = 0; h < p_hi.size(); ++h) {
    const double ph = p_hi[h];
    const double qh = q_hi[h];
    double row = 0.0;
    for (std::size_t l = 0; l < p_lo.size(); ++l) {
      row += std::abs(ph * p_lo[l] - qh * q_lo[l]);
    }
    total += row;
  }
  return 0.5 * total;
}

// KL divergence of product distributions; exact by additivity.
inline double kl_product(const ProductDistribution& P,
                         const ProductDistribution& Q) {
  internal::require_same_dim(P, Q);
  double total = 0.0;
  for (std::size_t j = 0; j < P.dim(); ++j) {
    total += kl_bernoulli(BernoulliPair(P[j], Q[j]));
  }
  return total;
}

// Sum of per-coordinate chi-squared divergences. This dominates the summed KL
// divergences coordinate by coordinate; it is not an upper bound on the
// chi-squared divergence of the products (see chi2_product_exact).
inline double chi2_product_sum(const ProductDistribution& P,
                               const ProductDistribution& Q) {
  internal::require_same_dim(P, Q);
  double total = 0.0;
  for (std::size_t j = 0; j < P.dim(); ++j) {
    total += chi2_bernoulli(BernoulliPair(P[j], Q[j]));
  }
  return total;
}

// Chi-squared divergence of the product distributions via the identity
// 1 + chi2(P||Q) = prod_j (1 + chi2(P_j||Q_j)).
inline double chi2_product_exact(const ProductDistribution& P,
                                 const ProductDistribution& Q) {
  internal::require_same_dim(P, Q);
  double prod = 1.0;
  for (std::size_t j = 0; j < P.dim(); ++j) {
    prod *= 1.0 + chi2_bernoulli(BernoulliPair(P[j], Q[j]));
  }
  return prod - 1.0;
}

// Pinsker: TV <= sqrt(KL / 2).
inline double pinsker_tv_bound(double kl_value) {
  if (!(kl_value >= 0.0)) {
    throw DomainError("KL divergence must be nonnegative");
  }
  return std::sqrt(kl_value / 2.0);
}

}  // namespace purdest

#endif  // PURDEST_METRICS_HPP_
