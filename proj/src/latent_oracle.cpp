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

#include "tbs/latent_oracle.hpp"

#include <algorithm>
#include <bit>
#include <tuple>
#include <utility>

namespace tbs {

namespace {

// P(U > t) for U uniform on (0, 1].
Rational prob_above(const Rational& t) {
  if (t <= 0) return Rational(1);
  if (t >= 1) return Rational(0);
  return Rational(1) - t;
}

void add(OutcomeMap& out, ExactLatent l, const Rational& p) {
  if (p == 0) return;
  std::sort(l.full.begin(), l.full.end());
  out[std::move(l)] += p;
}

std::vector<std::vector<ItemId>> subsets(const std::vector<ItemId>& a,
                                         std::size_t r) {
  std::vector<std::vector<ItemId>> out;
  const unsigned n = static_cast<unsigned>(a.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != r) continue;
    std::vector<ItemId> s;
    for (unsigned i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(a[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Swap1 or Move1 applied with every possible pick; each pick has
// probability p / |full|.
void pick_each(OutcomeMap& out, const ExactLatent& base, bool swap,
               bool clear_full, bool drop_partial, const Rational& p) {
  const std::size_t n = base.full.size();
  if (n == 0) throw InvariantViolation("oracle: pick from an empty set");
  for (std::size_t i = 0; i < n; ++i) {
    ExactLatent l = base;
    const ItemId picked = l.full[i];
    l.full.erase(l.full.begin() + static_cast<std::ptrdiff_t>(i));
    if (swap && l.partial) l.full.push_back(*l.partial);
    l.partial = picked;
    if (clear_full) l.full.clear();
    if (drop_partial) l.partial.reset();
    add(out, std::move(l), p / static_cast<long long>(n));
  }
}

void check_capacity(const ExactLatent& l) {
  if (l.full.size() > kMaxOracleItems) {
    throw CapacityError("oracle input has too many full items");
  }
}

}  // namespace

Rational rational_floor(const Rational& x) {
  using boost::multiprecision::cpp_int;
  const cpp_int num = boost::multiprecision::numerator(x);
  const cpp_int den = boost::multiprecision::denominator(x);
  cpp_int q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return Rational(q);
}

Rational rational_frc(const Rational& x) { return x - rational_floor(x); }

ExactLatent ExactLatent::make(std::vector<ItemId> full,
                              std::optional<ItemId> partial, Rational weight) {
  ExactLatent l{std::move(full), partial, std::move(weight)};
  std::sort(l.full.begin(), l.full.end());
  if (l.weight < 0 || Rational(static_cast<long long>(l.full.size())) !=
                          rational_floor(l.weight)) {
    throw InvariantViolation("oracle latent: |A| != floor(C)");
  }
  if (l.partial.has_value() != (rational_frc(l.weight) > 0)) {
    throw InvariantViolation("oracle latent: partial item mismatch");
  }
  return l;
}

bool ExactLatent::operator<(const ExactLatent& o) const {
  return std::tie(full, partial, weight) <
         std::tie(o.full, o.partial, o.weight);
}

bool ExactLatent::operator==(const ExactLatent& o) const {
  return full == o.full && partial == o.partial && weight == o.weight;
}

std::string ExactLatent::to_string() const {
  std::string out = "C=" + weight.str() + ";A=[";
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(full[i]);
  }
  out += "];pi=";
  out += partial ? std::to_string(*partial) : std::string("-");
  return out;
}

OutcomeMap enumerate_downsample(const ExactLatent& l, const Rational& theta) {
  check_capacity(l);
  if (theta <= 0 || theta >= 1) {
    throw DomainError("downsampling factor must lie in (0, 1)");
  }
  if (l.weight <= 0) throw DomainError("cannot downsample an empty sample");
  OutcomeMap out;
  const Rational c = l.weight;
  const Rational c_new = theta * c;
  const Rational fc = rational_frc(c);
  const Rational floor_new = rational_floor(c_new);
  const bool integral = rational_frc(c_new) == 0;
  ExactLatent base = l;
  base.weight = c_new;

  if (floor_new == 0) {
    const Rational p_swap = prob_above(fc / c);
    if (p_swap > 0) pick_each(out, base, true, true, integral, p_swap);
    ExactLatent keep = base;
    keep.full.clear();
    if (integral) keep.partial.reset();
    add(out, std::move(keep), Rational(1) - p_swap);
  } else if (floor_new == rational_floor(c)) {
    const Rational p_swap =
        prob_above((Rational(1) - theta * fc) / (Rational(1) - rational_frc(c_new)));
    if (p_swap > 0) pick_each(out, base, true, false, integral, p_swap);
    ExactLatent keep = base;
    if (integral) keep.partial.reset();
    add(out, std::move(keep), Rational(1) - p_swap);
  } else {
    const auto r = static_cast<std::size_t>(floor_new.convert_to<long long>());
    const Rational p_first = std::min(Rational(1), Rational(theta * fc));
    if (p_first > 0) {
      const auto subs = subsets(l.full, r);
      for (const auto& s : subs) {
        ExactLatent b = base;
        b.full = s;
        pick_each(out, b, true, false, integral,
                  p_first / static_cast<long long>(subs.size()));
      }
    }
    const Rational p_second = Rational(1) - p_first;
    if (p_second > 0) {
      const auto subs = subsets(l.full, r + 1);
      for (const auto& s : subs) {
        ExactLatent b = base;
        b.full = s;
        pick_each(out, b, false, false, integral,
                  p_second / static_cast<long long>(subs.size()));
      }
    }
  }
  return out;
}

OutcomeMap enumerate_union(const ExactLatent& l1, const ExactLatent& l2) {
  check_capacity(l1);
  check_capacity(l2);
  OutcomeMap out;
  const Rational f1 = rational_frc(l1.weight);
  const Rational f2 = rational_frc(l2.weight);
  const Rational s = f1 + f2;
  ExactLatent base;
  base.weight = l1.weight + l2.weight;
  base.full = l1.full;
  base.full.insert(base.full.end(), l2.full.begin(), l2.full.end());

  if (s == 0) {
    add(out, base, Rational(1));
  } else if (s < 1) {
    const Rational p1 = f1 / s;
    ExactLatent a = base;
    a.partial = l1.partial;
    add(out, std::move(a), p1);
    ExactLatent b = base;
    b.partial = l2.partial;
    add(out, std::move(b), Rational(1) - p1);
  } else if (s == 1) {
    ExactLatent a = base;
    a.full.push_back(*l1.partial);
    add(out, std::move(a), f1);
    ExactLatent b = base;
    b.full.push_back(*l2.partial);
    add(out, std::move(b), Rational(1) - f1);
  } else {
    const Rational p1 = (1 - f1) / ((1 - f1) + (1 - f2));
    ExactLatent a = base;
    a.partial = l1.partial;
    a.full.push_back(*l2.partial);
    add(out, std::move(a), p1);
    ExactLatent b = base;
    b.partial = l2.partial;
    b.full.push_back(*l1.partial);
    add(out, std::move(b), Rational(1) - p1);
  }
  return out;
}

OutcomeMap enumerate_union_all(const std::vector<ExactLatent>& samples) {
  OutcomeMap acc;
  if (samples.empty()) {
    acc[ExactLatent{}] = Rational(1);
    return acc;
  }
  acc[samples.front()] = Rational(1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    OutcomeMap next;
    for (const auto& [l, p] : acc) {
      for (const auto& [r, q] : enumerate_union(l, samples[i])) {
        next[r] += p * q;
      }
    }
    acc = std::move(next);
  }
  return acc;
}

OutcomeMap enumerate_downsample(const OutcomeMap& inputs,
                                const Rational& theta) {
  OutcomeMap out;
  for (const auto& [l, p] : inputs) {
    for (const auto& [r, q] : enumerate_downsample(l, theta)) {
      out[r] += p * q;
    }
  }
  return out;
}

std::map<ItemId, Rational> inclusion_probabilities(const ExactLatent& l) {
  std::map<ItemId, Rational> out;
  for (ItemId x : l.full) out[x] = Rational(1);
  if (l.partial) out[*l.partial] = rational_frc(l.weight);
  return out;
}

std::map<ItemId, Rational> inclusion_probabilities(
    const OutcomeMap& outcomes) {
  std::map<ItemId, Rational> out;
  for (const auto& [l, p] : outcomes) {
    for (const auto& [x, q] : inclusion_probabilities(l)) out[x] += p * q;
  }
  return out;
}

Rational total_probability(const OutcomeMap& outcomes) {
  Rational total = 0;
  for (const auto& [l, p] : outcomes) total += p;
  return total;
}

}  // namespace tbs
