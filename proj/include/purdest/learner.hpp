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

// Mean learners invoked on the rescaled heavy coordinates.
//
// The estimator needs an epsilon-DP learner that returns an l2-accurate mean
// for a distribution with covariance bounded by the identity. Two reference
// implementations sit behind the MeanLearner interface:
//   * "oracle"           exact empirical mean, not private, for tests;
//   * "clipped-laplace"  l1-clipped mean plus Laplace noise, epsilon-DP.

#ifndef PURDEST_LEARNER_HPP_
#define PURDEST_LEARNER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "purdest/dataset.hpp"
#include "purdest/errors.hpp"
#include "purdest/mechanisms.hpp"
#include "purdest/random.hpp"
#include "purdest/tailbounds.hpp"

namespace purdest {

// Rows of `data` restricted to `columns`; column k is read in scaled units
// (entries in {0, scales[k]}). marginal_bounds[k] bounds the unscaled mean
// of column k.
struct LearnerRequest {
  BlockView data;
  std::vector<std::size_t> columns;
  std::vector<double> scales;
  std::vector<double> marginal_bounds;
  double epsilon = 1.0;
  double alpha = 0.1;
  double beta = 0.1;
  double norm_bound = 1.0;
  std::string block = "Z";

  std::size_t dim() const { return columns.size(); }

  void validate() const {
    auto unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!(epsilon > 0.0 && epsilon <= 1.0) || !unit(alpha) || !unit(beta)) {
      throw InvalidConfig("learner needs epsilon in (0, 1], alpha and beta in (0, 1)");
    }
    if (!(norm_bound > 0.0)) throw InvalidConfig("learner norm bound must be > 0");
    if (scales.size() != columns.size() ||
        marginal_bounds.size() != columns.size()) {
      throw DimensionMismatch("learner request needs one scale and bound per column");
    }
    for (std::size_t c : columns) {
      if (c >= data.dim) throw DimensionMismatch("learner column out of range");
    }
  }
};

struct LearnerResult {
  std::vector<double> mu_hat;
  std::string learner_id;
  bool is_private = true;
};

class MeanLearner {
 public:
  virtual ~MeanLearner() = default;
  virtual std::string id() const = 0;
  virtual bool is_private() const = 0;
  // Appends exactly one record to `audit` per call with a nonempty request.
  virtual LearnerResult learn(const LearnerRequest& request, Rng& rng,
                              AuditTrail& audit) const = 0;
};

class OracleLearner final : public MeanLearner {
 public:
  static constexpr const char* kId = "oracle";

  std::string id() const override { return kId; }
  bool is_private() const override { return false; }

  LearnerResult learn(const LearnerRequest& request, Rng& /*rng*/,
                      AuditTrail& audit) const override {
    LearnerResult result{{}, kId, false};
    if (request.dim() == 0) return result;
    request.validate();
    if (request.data.rows == 0) throw EmptyDataset("oracle learner needs rows");
    // An infinite radius never clips, so this is the plain scaled mean.
    result.mu_hat = tmean(request.data, request.columns, request.scales,
                          TruncationRadius(INFINITY))
                        .mean;
    audit.push_back(AuditRecord{request.block, kNonPrivateMechanism, 0.0,
                                request.epsilon, 0.0});
    return result;
  }
};

// Clips rows at B_L and releases the clipped mean plus Laplace noise at its
// replacement sensitivity. B_L is the row-norm tail level for m rows with weighted
// coordinate count sum_k scales[k] and per-coordinate mean bound
// max_k marginal_bounds[k].
class ClippedLaplaceLearner final : public MeanLearner {
 public:
  static constexpr const char* kId = "clipped-laplace";

  std::string id() const override { return kId; }
  bool is_private() const override { return true; }

  static double clip_radius(const LearnerRequest& request) {
    double weight = 0.0;
    double bound = 0.0;
    for (std::size_t k = 0; k < request.dim(); ++k) {
      weight += request.scales[k];
      bound = std::max(bound, request.marginal_bounds[k]);
    }
    return row_norm_threshold(bound, std::max(weight, 1.0),
                              static_cast<double>(request.data.rows),
                              request.beta);
  }

  LearnerResult learn(const LearnerRequest& request, Rng& rng,
                      AuditTrail& audit) const override {
    LearnerResult result{{}, kId, true};
    if (request.dim() == 0) return result;
    request.validate();
    if (request.data.rows == 0) {
      throw EmptyDataset("clipped-Laplace learner needs rows");
    }
    const TruncationRadius radius(clip_radius(request));
    const auto clipped =
        tmean(request.data, request.columns, request.scales, radius);
    const NoiseSpec spec(
        tmean_sensitivity(radius, request.data.rows,
                          coordinate_cap(request.dim(), request.scales)),
        request.epsilon);
    result.mu_hat =
        laplace_mechanism(clipped.mean, spec, rng, &audit, request.block);
    return result;
  }
};

// Learners by selection string.
inline std::unique_ptr<MeanLearner> make_learner(const std::string& id) {
  static const std::map<std::string,
                        std::function<std::unique_ptr<MeanLearner>()>>
      registry{
          {OracleLearner::kId, [] { return std::make_unique<OracleLearner>(); }},
          {ClippedLaplaceLearner::kId,
           [] { return std::make_unique<ClippedLaplaceLearner>(); }},
      };
  const auto it = registry.find(id);
  if (it == registry.end()) {
    throw InvalidConfig("unknown learner '" + id +
                        "' (expected oracle or clipped-laplace)");
  }
  return it->second();
}

}  // namespace purdest

#endif  // PURDEST_LEARNER_HPP_
