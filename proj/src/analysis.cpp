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

#include "tbs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

namespace tbs {

InclusionEstimate InclusionEstimate::from_counts(ItemId item, std::size_t hits,
                                                 std::size_t runs) {
  if (runs == 0 || hits > runs) throw DomainError("bad inclusion counts");
  InclusionEstimate e;
  e.item = item;
  e.runs = runs;
  e.hits = hits;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(runs);
  e.ci_half_width =
      kSigmas * std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(runs));
  return e;
}

bool InclusionEstimate::covers(double p) const {
  return std::fabs(p_hat - p) <= ci_half_width;
}

double ttbs_mean(std::int64_t k, double n, const DecayConstants& c) {
  if (k < 1) throw DomainError("ttbs_mean needs k >= 1");
  return n * c.partial_sum(k - 1) / c.f_inf;
}

double ttbs_var_limit(double n, double b, const DecayConstants& c) {
  const double q = n * c.gamma / b;
  if (!(q <= 1.0 + 1e-12)) throw DomainError("ttbs_var_limit needs b >= n gamma");
  return b * q * c.f_inf - b * q * q * c.f2_inf;
}

double rtbs_exp_inclusion(double n, double W, double f_age) {
  return (W > 0.0 ? std::min(1.0, n / W) : 1.0) * f_age;
}

std::vector<double> total_weights(const DecayFn& fn,
                                  const std::vector<std::size_t>& sizes) {
  std::vector<double> out;
  out.reserve(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    double w = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      w += static_cast<double>(sizes[i]) * fn.at(static_cast<std::int64_t>(k - i));
    }
    out.push_back(w);
  }
  return out;
}

std::vector<InclusionEstimate> estimate_inclusion(
    const ReplicaFn& replica, const std::vector<ItemId>& targets,
    std::size_t runs) {
  if (runs < kMinInclusionRuns) {
    throw TestDesignError("inclusion estimates need at least " +
                          std::to_string(kMinInclusionRuns) + " runs, got " +
                          std::to_string(runs));
  }
  std::vector<std::size_t> hits(targets.size(), 0);
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<ItemId> s = replica(r);
    std::sort(s.begin(), s.end());
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (std::binary_search(s.begin(), s.end(), targets[t])) ++hits[t];
    }
  }
  std::vector<InclusionEstimate> out;
  out.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    out.push_back(InclusionEstimate::from_counts(targets[t], hits[t], runs));
  }
  return out;
}

std::vector<InclusionEstimate> estimate_inclusion(
    const SamplerConfig& config, const std::vector<Batch>& batches,
    const std::vector<ItemId>& targets, std::size_t runs, std::uint64_t seed) {
  config.validate();
  return estimate_inclusion(
      [&](std::uint64_t r) {
        auto sampler = make_sampler(config, seed, r);
        for (const auto& b : batches) sampler->step(b);
        return sampler->sample();
      },
      targets, runs);
}

ChiSquareResult chi_square_test(const std::vector<std::size_t>& observed,
                                const std::vector<double>& probabilities,
                                double level) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw DomainError("chi-square needs matching cells, at least two");
  }
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    if (e < kMinExpectedCell) {
      throw TestDesignError("expected count " + std::to_string(e) +
                            " in cell " + std::to_string(i) + " is below " +
                            std::to_string(kMinExpectedCell));
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
  }
  r.dof = observed.size() - 1;
  const boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.critical = boost::math::quantile(boost::math::complement(dist, level));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  r.pass = r.statistic <= r.critical;
  return r;
}

ChiSquareResult chi_square_uniformity(const std::vector<std::size_t>& observed,
                                      double level) {
  const std::vector<double> p(observed.size(),
                              1.0 / static_cast<double>(observed.size()));
  return chi_square_test(observed, p, level);
}

double modified_decay(const DecayFn& fn, double lambda_consol,
                      double alpha_star, double age) {
  if (!(alpha_star >= 0.0)) throw DomainError("alpha_star must be >= 0");
  if (age <= alpha_star) return fn.eval(age);
  return fn.eval(alpha_star) * std::exp(-lambda_consol * (age - alpha_star));
}

RatioEstimate ratio_estimate(const InclusionEstimate& p1,
                             const InclusionEstimate& p2) {
  if (!(p2.p_hat > 0.0)) throw DomainError("ratio with zero denominator");
  RatioEstimate r;
  r.ratio = p1.p_hat / p2.p_hat;
  const double v1 = p1.p_hat * (1.0 - p1.p_hat) / static_cast<double>(p1.runs);
  const double v2 = p2.p_hat * (1.0 - p2.p_hat) / static_cast<double>(p2.runs);
  const double rel = (p1.p_hat > 0.0 ? v1 / (p1.p_hat * p1.p_hat) : 0.0) +
                     v2 / (p2.p_hat * p2.p_hat);
  r.ci_half_width = kSigmas * r.ratio * std::sqrt(rel);
  return r;
}

}  // namespace tbs
