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

// Decay functions f(age) and the constants derived from them.
//
// Batches arrive at t_k = k * delta, so an item of batch i has age
// (k - i) * delta at step k. f_j below is shorthand for f(j * delta).

#ifndef TBS_DECAY_HPP_
#define TBS_DECAY_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tbs {

enum class DecayKind { kExponential, kShiftedPolynomial, kConstant };

class DecayFn {
 public:
  // f(a) = exp(-lambda * a), lambda >= 0.
  static DecayFn exponential(double lambda, double delta = 1.0);
  // f(a) = (1 + d)^s / (1 + d + a)^s, s > 1, d a nonnegative integer.
  static DecayFn shifted_polynomial(double s, int d, double delta = 1.0);
  // f == 1. Only meaningful for uniform reservoir sampling.
  static DecayFn constant(double delta = 1.0);
  // "exp:<lambda>", "poly:<s>:<d>" or "const".
  static DecayFn parse(std::string_view spec, double delta = 1.0);

  DecayKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double s() const { return s_; }
  int d() const { return d_; }
  double delta() const { return delta_; }
  // True when F_inf is finite.
  bool summable() const;
  // True when f(a2) < f(a1) for all a1 < a2.
  bool strictly_decreasing() const;

  double eval(double age) const;
  // f_j.
  double at(std::int64_t j) const { return eval(static_cast<double>(j) * delta_); }
  // f(age_new) / f(age_old), evaluated in closed form so it stays accurate
  // when both values underflow.
  double retention_ratio(double age_new, double age_old) const;
  // retention_ratio for one batch interval at lag j: f_{j+1} / f_j.
  double step_ratio(std::int64_t j) const;

  std::string to_string() const;

 private:
  DecayFn(DecayKind kind, double lambda, double s, int d, double delta);

  DecayKind kind_;
  double lambda_;
  double s_;
  int d_;
  double delta_;
};

// sum_{i >= from_index} f_i. Throws UnsupportedDecay if the series diverges.
double tail_sum(const DecayFn& fn, std::int64_t from_index);
// sum_{i >= from_index} f_i^2.
double squared_tail_sum(const DecayFn& fn, std::int64_t from_index);
// 1 / F_inf.
double gamma(const DecayFn& fn);

// Smallest age a >= 0 with f(a) < delta1, as an infimum over real ages.
double consolidation_age(const DecayFn& fn, double delta1);
// Smallest lambda with exp(-lambda * delta) <= f(a + delta) / f(a) for every
// age a past consolidation_age. Only defined for shifted polynomial decay.
// The result is checked on the ages consolidation_age + j * delta for
// j = 0..horizon (0 selects 10 * ceil(1 / gamma)).
double consolidation_lambda(const DecayFn& fn, double delta1,
                            std::int64_t horizon = 0);

// min{ n >= 1 : tail_sum(fn, n) <= bound }.
std::int64_t tail_index(const DecayFn& fn, double bound);
// min{ j >= 0 : f_j < delta1 }.
std::int64_t first_index_below(const DecayFn& fn, double delta1);

struct DecayConstants {
  // f_table[k] = F_k = f_0 + ... + f_k for k = 0..horizon.
  std::vector<double> f_table;
  double f_inf = 0.0;
  double f2_inf = 0.0;
  double gamma = 0.0;

  // horizon = 0 selects 10 * ceil(1 / gamma).
  static DecayConstants compute(const DecayFn& fn, std::int64_t horizon = 0);

  std::int64_t horizon() const {
    return static_cast<std::int64_t>(f_table.size()) - 1;
  }
  // F_k for any k >= 0; past the horizon it is derived from the tail sum.
  double partial_sum(std::int64_t k) const;

 private:
  DecayFn fn_ = DecayFn::constant();
};

}  // namespace tbs

#endif  // TBS_DECAY_HPP_
