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

#include "tbs/samplers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "tbs/analysis.hpp"
#include "tbs/streams.hpp"

namespace tbs {
namespace {

SamplerConfig make(Algorithm alg, const std::string& decay, std::size_t n) {
  SamplerConfig c;
  c.algorithm = alg;
  c.decay = DecayFn::parse(decay);
  c.n = n;
  return c;
}

std::vector<Batch> constant_batches(std::size_t count, std::size_t size) {
  return batches_from_sizes(std::vector<std::size_t>(count, size));
}

std::vector<Batch> uniform_batches(std::int64_t count, std::int64_t lo,
                                   std::int64_t hi, std::uint64_t seed) {
  RandomStream rng = size_stream(seed);
  return batches_from_sizes(
      StreamSpec::parse("uniform:" + std::to_string(lo) + ":" +
                        std::to_string(hi))
          .sizes(count, rng));
}

// Test-side total weight: direct sum over all arrivals.
double direct_weight(const DecayFn& fn, const std::vector<Batch>& batches,
                     std::size_t upto) {
  double w = 0.0;
  for (std::size_t i = 0; i < upto; ++i) {
    w += static_cast<double>(batches[i].size()) *
         fn.eval(static_cast<double>(upto - 1 - i));
  }
  return w;
}

TEST(SamplerConfigTest, Validation) {
  EXPECT_THROW(make(Algorithm::kBtbs, "poly:2:0", 10).validate(), ConfigError);
  EXPECT_THROW(make(Algorithm::kRtbsExp, "poly:2:0", 10).validate(), ConfigError);
  EXPECT_THROW(make(Algorithm::kRtbsExp, "exp:0.1", 0).validate(), ConfigError);
  EXPECT_THROW(make(Algorithm::kTtbs, "exp:0.1", 10).validate(), ConfigError);
  SamplerConfig t = make(Algorithm::kTtbs, "exp:0.1", 100);
  t.b = 5.0;  // below n * gamma
  EXPECT_THROW(t.validate(), ConfigError);
  t.b = 100.0;
  EXPECT_NO_THROW(t.validate());
  EXPECT_THROW(make(Algorithm::kTtbs, "const", 10).validate(), ConfigError);
  SamplerConfig g = make(Algorithm::kRtbsGen, "poly:2:10", 100);
  g.n_prime = 50.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g.n_prime = 200.0;
  g.delta1 = 1.5;
  EXPECT_THROW(g.validate(), ConfigError);
  g.delta1 = 1e-3;
  g.lambda_consol = 1e-9;
  EXPECT_THROW(g.validate(), ConfigError);
  g.lambda_consol.reset();
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(parse_algorithm("rtbs-gen"), Algorithm::kRtbsGen);
  EXPECT_EQ(algorithm_name(Algorithm::kBchao), "bchao");
  EXPECT_THROW(parse_algorithm("rtbs"), ConfigError);
}

TEST(SamplerTest, SameSeedSameRun) {
  const auto batches = uniform_batches(200, 0, 40, 3);
  for (Algorithm alg : {Algorithm::kBtbs, Algorithm::kBrs, Algorithm::kRtbsExp,
                        Algorithm::kBchao}) {
    const SamplerConfig c = make(alg, "exp:0.1", 50);
    auto a = make_sampler(c, 9);
    auto b = make_sampler(c, 9);
    auto other = make_sampler(c, 9, 1);
    bool differs = false;
    for (const auto& batch : batches) {
      a->step(batch);
      b->step(batch);
      other->step(batch);
      ASSERT_EQ(a->sample(), b->sample());
      differs = differs || a->sample() != other->sample();
    }
    EXPECT_TRUE(differs) << algorithm_name(alg);
  }
}

TEST(SamplerTest, RejectsOutOfOrderBatches) {
  auto s = make_sampler(make(Algorithm::kRtbsExp, "exp:0.1", 5), 1);
  EXPECT_THROW(s->step(make_batch(2, 3)), DomainError);
}

TEST(RtbsExpTest, SizeAndWeightInvariants) {
  const SamplerConfig c = make(Algorithm::kRtbsExp, "exp:0.05", 100);
  const auto batches = uniform_batches(600, 0, 30, 5);
  auto s = make_sampler(c, 2);
  for (std::size_t k = 1; k <= batches.size(); ++k) {
    s->step(batches[k - 1]);
    const auto r = s->record();
    const double W = direct_weight(c.decay, batches, k);
    ASSERT_NEAR(r.W, W, 1e-9 * std::max(1.0, W));
    ASSERT_NEAR(r.C, std::min(100.0, W), 1e-6 * std::max(1.0, W));
    const auto sample = s->sample();
    ASSERT_LE(sample.size(), 100u);
    ASSERT_TRUE(sample.size() == std::floor(r.C + 1e-9) ||
                sample.size() == std::ceil(r.C - 1e-9));
    ASSERT_EQ(std::set<ItemId>(sample.begin(), sample.end()).size(), sample.size());
    ASSERT_LE(r.footprint_items, 101u);
  }
}

TEST(RtbsExpTest, InclusionProbabilities) {
  const SamplerConfig c = make(Algorithm::kRtbsExp, "exp:0.2", 8);
  const auto batches = constant_batches(12, 4);
  const std::vector<ItemId> targets = {make_item_id(12, 0), make_item_id(10, 3),
                                       make_item_id(5, 1)};
  const auto est = estimate_inclusion(c, batches, targets, 20000, 17);
  const double W = direct_weight(c.decay, batches, 12);
  for (const auto& e : est) {
    const double p = std::min(1.0, 8.0 / W) *
                     std::exp(-0.2 * static_cast<double>(12 - arrival_index(e.item)));
    EXPECT_TRUE(e.covers(p)) << e.item << ": " << e.p_hat << " vs " << p;
  }
}

TEST(RtbsExpTest, ClassicReservoirWithoutDecay) {
  const SamplerConfig c = make(Algorithm::kRtbsExp, "exp:0", 3);
  const auto batches = constant_batches(10, 1);
  const auto est = estimate_inclusion(
      c, batches, {make_item_id(1, 0), make_item_id(6, 0), make_item_id(10, 0)},
      20000, 4);
  for (const auto& e : est) EXPECT_TRUE(e.covers(0.3)) << e.p_hat;
}

TEST(BtbsTest, InclusionIsTheDecay) {
  const SamplerConfig c = make(Algorithm::kBtbs, "exp:0.5", 10);
  const auto batches = constant_batches(6, 3);
  const auto est = estimate_inclusion(
      c, batches, {make_item_id(6, 0), make_item_id(4, 2), make_item_id(1, 1)},
      20000, 6);
  for (const auto& e : est) {
    EXPECT_TRUE(e.covers(std::exp(-0.5 * static_cast<double>(6 - arrival_index(e.item)))))
        << e.p_hat;
  }
}

TEST(BrsTest, UniformOverAllArrivals) {
  const SamplerConfig c = make(Algorithm::kBrs, "exp:0", 5);
  const std::vector<Batch> batches = batches_from_sizes({3, 4, 3});
  auto s = make_sampler(c, 1);
  std::size_t seen = 0;
  for (const auto& b : batches) {
    s->step(b);
    seen += b.size();
    EXPECT_EQ(s->sample().size(), std::min<std::size_t>(5, seen));
  }
  std::vector<ItemId> all;
  for (const auto& b : batches) all.insert(all.end(), b.items.begin(), b.items.end());
  for (const auto& e : estimate_inclusion(c, batches, all, 20000, 2)) {
    EXPECT_TRUE(e.covers(0.5)) << e.item << ' ' << e.p_hat;
  }
}

TEST(TtbsTest, MeanSizeTracksFormula) {
  SamplerConfig c = make(Algorithm::kTtbs, "exp:0.1", 50);
  c.b = 50.0;
  const auto batches = constant_batches(25, 50);
  const std::int64_t ks[] = {1, 5, 25};
  std::vector<double> sum(3, 0.0), sum2(3, 0.0);
  const int runs = 4000;
  for (int r = 0; r < runs; ++r) {
    auto s = make_sampler(c, 8, static_cast<std::uint64_t>(r));
    std::size_t next = 0;
    for (std::int64_t k = 1; k <= 25; ++k) {
      s->step(batches[static_cast<std::size_t>(k - 1)]);
      if (next < 3 && ks[next] == k) {
        const double x = static_cast<double>(s->sample().size());
        sum[next] += x;
        sum2[next] += x * x;
        ++next;
      }
    }
  }
  // Oracle: n * (1 - e^{-lambda k}), the ratio of the partial geometric sum
  // to its limit.
  for (int i = 0; i < 3; ++i) {
    const double mean = sum[i] / runs;
    const double var = sum2[i] / runs - mean * mean;
    const double want = 50.0 * (1.0 - std::exp(-0.1 * static_cast<double>(ks[i])));
    EXPECT_NEAR(mean, want, kSigmas * std::sqrt(var / runs) + 1e-9) << ks[i];
  }
}

TEST(RtbsGenTest, StructuralInvariants) {
  SamplerConfig c = make(Algorithm::kRtbsGen, "poly:2:10", 200);
  c.n_prime = 400.0;
  c.audit = true;
  RandomStream rng = size_stream(3);
  const auto batches =
      batches_from_sizes(StreamSpec::parse("periodic:20:60:300").sizes(1200, rng));
  auto s = make_sampler(c, 3);
  for (const auto& b : batches) {
    s->step(b);
    const auto st = s->gen_status();
    ASSERT_TRUE(st.has_value());
    const auto r = s->record();
    ASSERT_GT(st->rho, 0.0);
    ASSERT_LE(st->rho, 1.0);
    ASSERT_LE(r.C, 400.0 + 1e-6);
    ASSERT_LE(static_cast<double>(s->sample().size()), std::ceil(r.C - 1e-9));
    ASSERT_LE(st->k - st->m, st->lag_bound);
    ASSERT_NEAR(st->total_C, r.C, 1e-6 * std::max(1.0, r.C));
    ASSERT_LE(st->W, st->W_max + 1e-9);
  }
  EXPECT_FALSE(s->chao_diagnostics().has_value());
}

TEST(RtbsGenTest, ExponentialDecayAgreesWithRtbsExp) {
  SamplerConfig gen = make(Algorithm::kRtbsGen, "exp:0.1", 30);
  const SamplerConfig exp = make(Algorithm::kRtbsExp, "exp:0.1", 30);
  const auto batches = uniform_batches(300, 0, 20, 11);
  auto a = make_sampler(gen, 5);
  auto b = make_sampler(exp, 5);
  for (const auto& batch : batches) {
    a->step(batch);
    b->step(batch);
    ASSERT_NEAR(a->record().W, b->record().W, 1e-9 * std::max(1.0, b->record().W));
    ASSERT_NEAR(a->record().C, b->record().C, 1e-6 * std::max(1.0, b->record().C));
  }
}

TEST(BchaoTest, UniformWithoutDecay) {
  const SamplerConfig c = make(Algorithm::kBchao, "exp:0", 4);
  const auto batches = constant_batches(3, 4);
  std::vector<ItemId> all;
  for (const auto& b : batches) all.insert(all.end(), b.items.begin(), b.items.end());
  for (const auto& e : estimate_inclusion(c, batches, all, 20000, 12)) {
    EXPECT_TRUE(e.covers(1.0 / 3.0)) << e.item << ' ' << e.p_hat;
  }
}

TEST(BchaoTest, NeverExceedsCapacity) {
  const SamplerConfig c = make(Algorithm::kBchao, "exp:0.3", 20);
  auto s = make_sampler(c, 4);
  for (const auto& b : uniform_batches(500, 0, 60, 6)) {
    s->step(b);
    ASSERT_LE(s->sample().size(), 20u);
    ASSERT_TRUE(s->chao_diagnostics().has_value());
  }
}

}  // namespace
}  // namespace tbs
