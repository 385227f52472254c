// Copyright 2026 The TBS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Predictors and Monte Carlo helpers for checking sampler behaviour.

#ifndef TBS_ANALYSIS_HPP_
#define TBS_ANALYSIS_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "tbs/decay.hpp"
#include "tbs/samplers.hpp"
#include "tbs/types.hpp"

namespace tbs {

// Half-widths are this many standard errors.
inline constexpr double kSigmas = 3.0;
inline constexpr double kChiSquareLevel = 0.01;
inline constexpr std::size_t kMinInclusionRuns = 10000;
inline constexpr double kMinExpectedCell = 5.0;

struct InclusionEstimate {
  ItemId item = 0;
  std::size_t runs = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double ci_half_width = 0.0;

  static InclusionEstimate from_counts(ItemId item, std::size_t hits,
                                       std::size_t runs);
  bool covers(double p) const;
};

enum class Quantity {
  kTtbsMean,
  kTtbsVarLimit,
  kRtbsExpInclusion,
  kBtbsInclusion,
  kEquilibriumSize
};

struct Prediction {
  Quantity quantity;
  double value;
};

// E[C_k] for ttbs: n * F_{k-1} / F_inf.
double ttbs_mean(std::int64_t k, double n, const DecayConstants& c);
// lim Var[C_k] for ttbs with q = n * gamma / b: b q F_inf - b q^2 F2_inf.
double ttbs_var_limit(double n, double b, const DecayConstants& c);
// P(x in S_k) for rtbs-exp: min(1, n / W_k) * f(age).
double rtbs_exp_inclusion(double n, double W, double f_age);

// W_1, ..., W_K for the given batch sizes.
std::vector<double> total_weights(const DecayFn& fn,
                                  const std::vector<std::size_t>& sizes);

// Produces the final sample of replica r.
using ReplicaFn = std::function<std::vector<ItemId>(std::uint64_t replica)>;

// Runs replicas 0..runs-1 and counts how often each target appears. Throws
// TestDesignError if runs < kMinInclusionRuns.
std::vector<InclusionEstimate> estimate_inclusion(
    const ReplicaFn& replica, const std::vector<ItemId>& targets,
    std::size_t runs);
// Same for a sampler fed `batches` (the horizon is batches.size()).
std::vector<InclusionEstimate> estimate_inclusion(
    const SamplerConfig& config, const std::vector<Batch>& batches,
    const std::vector<ItemId>& targets, std::size_t runs, std::uint64_t seed);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double critical = 0.0;
  double p_value = 1.0;
  bool pass = false;
};

// Pearson test of observed counts against expected cell probabilities.
// Throws TestDesignError if any expected count is below kMinExpectedCell.
ChiSquareResult chi_square_test(const std::vector<std::size_t>& observed,
                                const std::vector<double>& probabilities,
                                double level = kChiSquareLevel);
ChiSquareResult chi_square_uniformity(const std::vector<std::size_t>& observed,
                                      double level = kChiSquareLevel);

// f(age) up to alpha_star, then f(alpha_star) * exp(-lambda (age - alpha_star)).
double modified_decay(const DecayFn& fn, double lambda_consol,
                      double alpha_star, double age);

struct RatioEstimate {
  double ratio = 0.0;
  double ci_half_width = 0.0;
};

// p1 / p2 with a delta-method interval that treats the estimates as
// independent.
RatioEstimate ratio_estimate(const InclusionEstimate& p1,
                             const InclusionEstimate& p2);

}  // namespace tbs

#endif  // TBS_ANALYSIS_HPP_
