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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tbs/decay.hpp"
#include "tbs/random.hpp"
#include "tbs/samplers.hpp"
#include "tbs/types.hpp"

namespace tbs {
namespace {

TEST(AnalysisTest, TtbsMeanExample) {
  const auto c = DecayConstants::compute(DecayFn::shifted_polynomial(2.0, 0), 100);
  // Oracle: partial sum of 1/j^2 over zeta(2).
  const double want = 100.0 * (1.0 + 1.0 / 4 + 1.0 / 9 + 1.0 / 16 + 1.0 / 25) /
                      (std::numbers::pi * std::numbers::pi / 6.0);
  EXPECT_NEAR(ttbs_mean(5, 100.0, c), want, 1e-9);
  EXPECT_NEAR(ttbs_mean(5, 100.0, c), 88.9769, 1e-4);
  EXPECT_NEAR(ttbs_mean(1, 100.0, c), 100.0 / c.f_inf, 1e-12);
  EXPECT_THROW(ttbs_mean(0, 100.0, c), DomainError);
}

TEST(AnalysisTest, TtbsVarianceLimit) {
  const double lambda = 0.1;
  const auto c = DecayConstants::compute(DecayFn::exponential(lambda));
  // q = 1: b F_inf - b F2_inf with geometric sums.
  const double g = 1.0 - std::exp(-lambda);
  const double b = 1000.0 * g;
  const double want = b / g - b / (1.0 - std::exp(-2.0 * lambda));
  EXPECT_NEAR(ttbs_var_limit(1000.0, b, c), want, 1e-6 * want);
  // q = 1/2.
  const double half = 2.0 * b;
  EXPECT_NEAR(ttbs_var_limit(1000.0, half, c),
              half * 0.5 / g - half * 0.25 / (1.0 - std::exp(-2.0 * lambda)), 1e-6);
  EXPECT_THROW(ttbs_var_limit(1000.0, b / 2.0, c), DomainError);
}

TEST(AnalysisTest, RtbsExpInclusionAndWeights) {
  EXPECT_DOUBLE_EQ(rtbs_exp_inclusion(10.0, 40.0, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(rtbs_exp_inclusion(10.0, 5.0, 0.5), 0.5);
  const auto w = total_weights(DecayFn::exponential(std::log(2.0)), {4, 0, 2});
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[0], 4.0, 1e-12);
  EXPECT_NEAR(w[1], 2.0, 1e-12);
  EXPECT_NEAR(w[2], 3.0, 1e-12);
}

TEST(AnalysisTest, InclusionEstimateOnBernoulliReplicas) {
  // Item 1 appears with probability 0.3, item 2 always.
  const ReplicaFn replica = [](std::uint64_t r) {
    RandomStream rng(77, r);
    std::vector<ItemId> out;
    if (rng.uniform() < 0.3) out.push_back(1);
    out.push_back(2);
    return out;
  };
  const auto est = estimate_inclusion(replica, {1, 2, 3}, 20000);
  EXPECT_TRUE(est[0].covers(0.3)) << est[0].p_hat;
  EXPECT_EQ(est[1].hits, 20000u);
  EXPECT_EQ(est[2].hits, 0u);
  EXPECT_THROW(estimate_inclusion(replica, {1}, 9999), TestDesignError);
  SamplerConfig config;
  config.decay = DecayFn::exponential(0.1);
  config.n = 5;
  EXPECT_THROW(estimate_inclusion(config, batches_from_sizes({3}), {1}, 100, 1),
               TestDesignError);
}

TEST(AnalysisTest, ChiSquare) {
  RandomStream rng(9, 0);
  std::vector<std::size_t> counts(10, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.index(10)];
  const auto ok = chi_square_uniformity(counts);
  EXPECT_TRUE(ok.pass) << ok.statistic;
  EXPECT_EQ(ok.dof, 9u);
  EXPECT_NEAR(ok.critical, 21.666, 1e-3);
  counts[3] *= 2;
  EXPECT_FALSE(chi_square_uniformity(counts).pass);
  EXPECT_THROW(chi_square_test({1, 2}, {0.5, 0.5}), TestDesignError);
  EXPECT_THROW(chi_square_test({10, 20}, {0.5}), DomainError);
}

TEST(AnalysisTest, ModifiedDecayIsContinuous) {
  const DecayFn fn = DecayFn::shifted_polynomial(2.0, 10);
  const double a = 50.0;
  EXPECT_DOUBLE_EQ(modified_decay(fn, 0.03, a, 20.0), fn.eval(20.0));
  EXPECT_NEAR(modified_decay(fn, 0.03, a, a + 1e-9), fn.eval(a), 1e-12);
  EXPECT_NEAR(modified_decay(fn, 0.03, a, a + 10.0), fn.eval(a) * std::exp(-0.3),
              1e-15);
}

TEST(AnalysisTest, RatioEstimate) {
  const auto p1 = InclusionEstimate::from_counts(1, 1000, 10000);
  const auto p2 = InclusionEstimate::from_counts(2, 5000, 10000);
  const auto r = ratio_estimate(p1, p2);
  EXPECT_DOUBLE_EQ(r.ratio, 0.2);
  const double rel = std::sqrt(0.09 / 10000 / 0.01 + 0.25 / 10000 / 0.25);
  EXPECT_NEAR(r.ci_half_width, kSigmas * 0.2 * rel, 1e-12);
  EXPECT_THROW(ratio_estimate(p1, InclusionEstimate::from_counts(3, 0, 10000)),
               DomainError);
}

}  // namespace
}  // namespace tbs
