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

// Privacy primitives: l1 truncation, truncated means, and the Laplace
// mechanism with an audit trail of every noise draw.

#ifndef PURDEST_MECHANISMS_HPP_
#define PURDEST_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "purdest/dataset.hpp"
#include "purdest/errors.hpp"
#include "purdest/random.hpp"

namespace purdest {

// Radius of the l1 ball rows are clipped to.
struct TruncationRadius {
  double value;

  explicit TruncationRadius(double b) : value(b) {
    if (!(b >= 0.0)) throw DomainError("truncation radius must be >= 0");
  }
};

struct NoiseSpec {
  double sensitivity;
  double epsilon;

  NoiseSpec(double l1_sensitivity, double eps)
      : sensitivity(l1_sensitivity), epsilon(eps) {
    if (!(sensitivity >= 0.0)) throw DomainError("sensitivity must be >= 0");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  }

  double scale() const { return sensitivity / epsilon; }
};

// One noise-bearing access to a block of rows.
struct AuditRecord {
  std::string block;
  std::string mechanism;  // "laplace" or "oracle-nonprivate"
  double sensitivity = 0.0;
  double epsilon = 0.0;
  double scale = 0.0;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

using AuditTrail = std::vector<AuditRecord>;

inline constexpr const char* kLaplaceMechanism = "laplace";
inline constexpr const char* kNonPrivateMechanism = "oracle-nonprivate";

// x if ||x||_1 <= B, else (B / ||x||_1) x.
inline std::vector<double> trunc(std::span<const double> x,
                                 TruncationRadius radius) {
  double norm = 0.0;
  for (double v : x) norm += std::abs(v);
  std::vector<double> out(x.begin(), x.end());
  if (norm <= radius.value) return out;
  const double factor = radius.value / norm;
  for (double& v : out) v *= factor;
  return out;
}

struct TruncatedMean {
  std::vector<double> mean;
  std::size_t truncated_rows = 0;
};

// Mean of the rows of `block`, restricted to `columns` and with column k
// multiplied by scales[k], after clipping every restricted row to l1 radius B.
// An empty `scales` means unit scales.
inline TruncatedMean tmean(const BlockView& block,
                           std::span<const std::size_t> columns,
                           std::span<const double> scales,
                           TruncationRadius radius) {
  if (block.rows == 0) throw EmptyDataset("truncated mean of an empty block");
  if (!scales.empty() && scales.size() != columns.size()) {
    throw DimensionMismatch("one scale per selected column is required");
  }
  const std::size_t k = columns.size();
  const double bound = radius.value;
  auto scale_of = [&](std::size_t c) { return scales.empty() ? 1.0 : scales[c]; };

  // Rows that fit the ball are tallied exactly as integer counts.
  std::vector<std::uint64_t> counts(k, 0);
  std::vector<double> clipped(k, 0.0);
  TruncatedMean result;
  for (std::size_t i = 0; i < block.rows; ++i) {
    const auto row = block.row(i);
    double norm = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (row[columns[c]]) norm += scale_of(c);
    }
    if (norm <= bound) {
      for (std::size_t c = 0; c < k; ++c) counts[c] += row[columns[c]];
    } else {
      ++result.truncated_rows;
      const double factor = bound / norm;
      for (std::size_t c = 0; c < k; ++c) {
        if (row[columns[c]]) clipped[c] += factor * scale_of(c);
      }
    }
  }
  const double m = static_cast<double>(block.rows);
  result.mean.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    result.mean[c] =
        (scale_of(c) * static_cast<double>(counts[c]) + clipped[c]) / m;
  }
  return result;
}

// Truncated mean over every column at unit scale.
inline TruncatedMean tmean(const BlockView& block, TruncationRadius radius) {
  std::vector<std::size_t> all(block.dim);
  for (std::size_t j = 0; j < block.dim; ++j) all[j] = j;
  return tmean(block, all, {}, radius);
}

// l1 sensitivity of tmean_B over m rows when one row is replaced. The two
// clipped rows can have disjoint supports, so the bound is 2B/m; when every
// coordinate k of a row lies in [0, s_k], it is also at most sum_k s_k / m.
// `coordinate_cap` carries that sum (unbounded by default).
inline double tmean_sensitivity(TruncationRadius radius, std::size_t m,
                                double coordinate_cap = INFINITY) {
  if (m < 1) throw EmptyDataset("sensitivity needs m >= 1");
  return std::min(2.0 * radius.value, coordinate_cap) / static_cast<double>(m);
}

// sum_k s_k for the selected columns (unit scales when `scales` is empty).
inline double coordinate_cap(std::size_t columns, std::span<const double> scales) {
  if (scales.empty()) return static_cast<double>(columns);
  double total = 0.0;
  for (double s : scales) total += s;
  return total;
}

// One draw from Lap(scale) by inverting the CDF of a uniform on (-1/2, 1/2).
template <class URBG>
double laplace_sample(double scale, URBG& rng) {
  if (!(scale > 0.0)) throw DomainError("Laplace scale must be positive");
  const double u = uniform_open01(rng) - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

// value + Lap(sensitivity / epsilon) independently per coordinate. A zero
// sensitivity adds nothing. When `audit` is given a record for `block` is
// appended.
template <class URBG>
std::vector<double> laplace_mechanism(std::span<const double> value,
                                      const NoiseSpec& spec, URBG& rng,
                                      AuditTrail* audit = nullptr,
                                      std::string block = {}) {
  const double scale = spec.scale();
  std::vector<double> out(value.begin(), value.end());
  if (scale > 0.0) {
    for (double& v : out) v += laplace_sample(scale, rng);
  }
  if (audit != nullptr) {
    audit->push_back(AuditRecord{std::move(block), kLaplaceMechanism,
                                 spec.sensitivity, spec.epsilon, scale});
  }
  return out;
}

}  // namespace purdest

#endif  // PURDEST_MECHANISMS_HPP_
