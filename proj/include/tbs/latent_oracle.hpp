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

// Exact outcome distributions of downsampling and union.
//
// The uniform draw is split into its branch intervals and every subset and
// pick is enumerated, all in exact rational arithmetic. Weights are never
// snapped. Inputs are limited to kMaxOracleItems full items.

#ifndef TBS_LATENT_ORACLE_HPP_
#define TBS_LATENT_ORACLE_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbs/types.hpp"

namespace tbs {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kMaxOracleItems = 6;

Rational rational_floor(const Rational& x);
Rational rational_frc(const Rational& x);

struct ExactLatent {
  std::vector<ItemId> full;  // kept sorted
  std::optional<ItemId> partial;
  Rational weight;

  // Sorts `full`; throws InvariantViolation if the structure is inconsistent.
  static ExactLatent make(std::vector<ItemId> full,
                          std::optional<ItemId> partial, Rational weight);

  bool operator<(const ExactLatent& o) const;
  bool operator==(const ExactLatent& o) const;
  std::string to_string() const;
};

using OutcomeMap = std::map<ExactLatent, Rational>;

OutcomeMap enumerate_downsample(const ExactLatent& l, const Rational& theta);
OutcomeMap enumerate_union(const ExactLatent& l1, const ExactLatent& l2);
// Unions applied left to right, as unite_all does.
OutcomeMap enumerate_union_all(const std::vector<ExactLatent>& samples);
// Pushes a distribution over inputs through downsampling.
OutcomeMap enumerate_downsample(const OutcomeMap& inputs,
                                const Rational& theta);

// P(x in realized sample) for every item that can appear.
std::map<ItemId, Rational> inclusion_probabilities(const ExactLatent& l);
std::map<ItemId, Rational> inclusion_probabilities(const OutcomeMap& outcomes);

Rational total_probability(const OutcomeMap& outcomes);

}  // namespace tbs

#endif  // TBS_LATENT_ORACLE_HPP_
