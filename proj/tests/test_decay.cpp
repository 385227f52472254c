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

#include "tbs/decay.hpp"

#include <gsl/gsl_sf_zeta.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tbs/analysis.hpp"
#include "tbs/types.hpp"

namespace tbs {
namespace {

// Oracle: sum_{j >= n} (1 + d)^s / (1 + d + j)^s via the Hurwitz zeta function.
double poly_tail(double s, int d, std::int64_t n) {
  return std::pow(1.0 + d, s) *
         gsl_sf_hzeta(s, 1.0 + d + static_cast<double>(n));
}

TEST(DecayTest, EvaluatesEachFamily) {
  EXPECT_DOUBLE_EQ(DecayFn::exponential(0.1).eval(3.0), std::exp(-0.3));
  EXPECT_DOUBLE_EQ(DecayFn::shifted_polynomial(2.0, 0).eval(1.0), 0.25);
  EXPECT_DOUBLE_EQ(DecayFn::shifted_polynomial(2.0, 10).eval(11.0), 0.25);
  EXPECT_DOUBLE_EQ(DecayFn::constant().eval(1e6), 1.0);
  EXPECT_DOUBLE_EQ(DecayFn::exponential(0.5, 2.0).at(3), std::exp(-3.0));
  EXPECT_THROW(DecayFn::exponential(0.1).eval(-1.0), DomainError);
}

TEST(DecayTest, ParsesSpecStrings) {
  const DecayFn e = DecayFn::parse("exp:0.07");
  EXPECT_EQ(e.kind(), DecayKind::kExponential);
  EXPECT_DOUBLE_EQ(e.lambda(), 0.07);
  const DecayFn p = DecayFn::parse("poly:2:10");
  EXPECT_EQ(p.kind(), DecayKind::kShiftedPolynomial);
  EXPECT_DOUBLE_EQ(p.s(), 2.0);
  EXPECT_EQ(p.d(), 10);
  EXPECT_EQ(DecayFn::parse("const").kind(), DecayKind::kConstant);
  EXPECT_EQ(DecayFn::parse(e.to_string()).lambda(), e.lambda());
  for (const char* bad : {"", "exp", "exp:-1", "exp:x", "poly:2", "poly:1:0",
                          "poly:2:-1", "poly:2:1.5", "linear:1", "const:1"}) {
    EXPECT_THROW(DecayFn::parse(bad), DomainError) << bad;
  }
}

TEST(DecayTest, RetentionRatios) {
  const DecayFn e = DecayFn::exponential(0.3);
  EXPECT_NEAR(e.step_ratio(0), std::exp(-0.3), 1e-15);
  EXPECT_NEAR(e.step_ratio(1000), std::exp(-0.3), 1e-15);
  const DecayFn p = DecayFn::shifted_polynomial(2.0, 0);
  EXPECT_DOUBLE_EQ(p.step_ratio(0), 0.25);
  EXPECT_NEAR(p.retention_ratio(3.0, 1.0), 0.25, 1e-15);
  EXPECT_THROW(p.retention_ratio(1.0, 3.0), DomainError);
  // Far out both values underflow but the ratio is still exact.
  EXPECT_NEAR(DecayFn::exponential(1.0).retention_ratio(2001.0, 2000.0),
              std::exp(-1.0), 1e-15);
}

TEST(DecayTest, Monotonicity) {
  EXPECT_TRUE(DecayFn::exponential(0.1).strictly_decreasing());
  EXPECT_FALSE(DecayFn::exponential(0.0).strictly_decreasing());
  EXPECT_TRUE(DecayFn::shifted_polynomial(2.0, 10).strictly_decreasing());
  EXPECT_FALSE(DecayFn::constant().summable());
  EXPECT_FALSE(DecayFn::exponential(0.0).summable());
  EXPECT_TRUE(DecayFn::shifted_polynomial(1.5, 0).summable());
}

TEST(DecayTest, GammaMatchesClosedForms) {
  EXPECT_NEAR(gamma(DecayFn::exponential(0.1)), 1.0 - std::exp(-0.1), 1e-15);
  EXPECT_NEAR(gamma(DecayFn::shifted_polynomial(2.0, 0)),
              6.0 / (std::numbers::pi * std::numbers::pi), 1e-12);
  EXPECT_THROW(gamma(DecayFn::constant()), UnsupportedDecay);
}

TEST(DecayTest, TailSumsMatchHurwitzZeta) {
  for (double s : {1.5, 2.0, 3.0}) {
    for (int d : {0, 1, 10}) {
      const DecayFn fn = DecayFn::shifted_polynomial(s, d);
      for (std::int64_t n : {0, 1, 5, 63, 64, 65, 100, 10000}) {
        const double want = poly_tail(s, d, n);
        EXPECT_NEAR(tail_sum(fn, n), want, 1e-10 * want) << s << ' ' << d << ' ' << n;
        const double want2 = poly_tail(2.0 * s, d, n);
        EXPECT_NEAR(squared_tail_sum(fn, n), want2, 1e-10 * want2);
      }
    }
  }
  const DecayFn e = DecayFn::exponential(0.2);
  EXPECT_NEAR(tail_sum(e, 7), std::exp(-1.4) / (1.0 - std::exp(-0.2)), 1e-12);
  EXPECT_THROW(tail_sum(DecayFn::constant(), 0), UnsupportedDecay);
}

TEST(DecayTest, ConsolidationSizingExample) {
  const DecayFn fn = DecayFn::shifted_polynomial(2.0, 0);
  // Brute force: smallest n with sum_{j >= n} 1/(j+1)^2 <= 0.01.
  std::int64_t n = 1;
  while (poly_tail(2.0, 0, n) > 0.01) ++n;
  EXPECT_EQ(tail_index(fn, 0.01), n);
  EXPECT_EQ(n, 100);
  EXPECT_GE(n + 2, 95);
  EXPECT_LE(n + 2, 110);
  // f_j = 1/(j+1)^2 < 1e-4 first at j = 100.
  EXPECT_EQ(first_index_below(fn, 1e-4), 100);
}

TEST(DecayTest, ConsolidationLambdaBoundsTheRatio) {
  for (int d : {0, 10}) {
    const DecayFn fn = DecayFn::shifted_polynomial(2.0, d);
    const double delta1 = 1e-3;
    const double a_star = consolidation_age(fn, delta1);
    EXPECT_LE(fn.eval(a_star), delta1 * (1.0 + 1e-9));
    const double lambda = consolidation_lambda(fn, delta1);
    for (int j = 0; j < 5000; ++j) {
      const double a = a_star + j;
      EXPECT_LE(std::exp(-lambda), fn.retention_ratio(a + 1.0, a) * (1.0 + 1e-12));
      // The modified decay never strays more than delta1 from f.
      EXPECT_LE(std::fabs(fn.eval(a) - modified_decay(fn, lambda, a_star, a)),
                delta1);
    }
  }
  EXPECT_THROW(consolidation_lambda(DecayFn::exponential(0.1), 1e-3),
               DomainError);
}

TEST(DecayTest, DecayConstantsPartialSums) {
  const DecayFn fn = DecayFn::shifted_polynomial(2.0, 0);
  const auto c = DecayConstants::compute(fn, 10);
  EXPECT_NEAR(c.partial_sum(4), 1.0 + 0.25 + 1.0 / 9 + 1.0 / 16 + 0.04, 1e-15);
  EXPECT_NEAR(c.f_inf, std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
  EXPECT_NEAR(c.partial_sum(1000), c.f_inf - poly_tail(2.0, 0, 1001), 1e-12);
  EXPECT_NEAR(c.f2_inf, std::pow(std::numbers::pi, 4) / 90.0, 1e-12);
  EXPECT_THROW(c.partial_sum(-1), DomainError);
}

}  // namespace
}  // namespace tbs
