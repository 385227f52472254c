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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <system_error>

#include "tbs/types.hpp"

namespace tbs {

namespace {

// Direct summation stops once a term is this small relative to the sum, or
// after kMaxDirectTerms terms; the remainder is an Euler-Maclaurin tail.
constexpr double kTermRatioStop = 1e-15;
constexpr std::int64_t kMaxDirectTerms = 64;

// sum_{i >= from} (base / (base + i * delta))^p for p > 1.
double power_tail(double p, double base, double delta, std::int64_t from) {
  double sum = 0.0;
  std::int64_t i = from;
  for (; i < from + kMaxDirectTerms; ++i) {
    const double term = std::pow(base / (base + static_cast<double>(i) * delta), p);
    sum += term;
    if (term <= kTermRatioStop * sum) {
      ++i;
      break;
    }
  }
  // Euler-Maclaurin remainder for sum_{j >= i} g(j), g(x) = (base/(base+x*delta))^p.
  const double a = base + static_cast<double>(i) * delta;
  const double g = std::pow(base / a, p);
  const double integral = g * a / ((p - 1.0) * delta);
  const double g1 = -p * delta * g / a;
  const double g3 = -p * (p + 1.0) * (p + 2.0) * delta * delta * delta * g /
                    (a * a * a);
  return sum + integral + g / 2.0 - g1 / 12.0 + g3 / 720.0;
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DomainError("bad " + std::string(what) + " in decay spec: '" +
                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

DecayFn::DecayFn(DecayKind kind, double lambda, double s, int d, double delta)
    : kind_(kind), lambda_(lambda), s_(s), d_(d), delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("batch interval must be positive");
  }
}

DecayFn DecayFn::exponential(double lambda, double delta) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("exponential decay rate must be finite and >= 0");
  }
  return DecayFn(DecayKind::kExponential, lambda, 0.0, 0, delta);
}

DecayFn DecayFn::shifted_polynomial(double s, int d, double delta) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw DomainError("polynomial decay exponent must exceed 1");
  }
  if (d < 0) throw DomainError("polynomial decay shift must be >= 0");
  return DecayFn(DecayKind::kShiftedPolynomial, 0.0, s, d, delta);
}

DecayFn DecayFn::constant(double delta) {
  return DecayFn(DecayKind::kConstant, 0.0, 0.0, 0, delta);
}

DecayFn DecayFn::parse(std::string_view spec, double delta) {
  if (spec == "const") return constant(delta);
  if (spec.starts_with("exp:")) {
    return exponential(parse_number(spec.substr(4), "rate"), delta);
  }
  if (spec.starts_with("poly:")) {
    const auto rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw DomainError("poly decay needs poly:<s>:<d>");
    }
    const double s = parse_number(rest.substr(0, colon), "exponent");
    const double d = parse_number(rest.substr(colon + 1), "shift");
    if (d != std::floor(d) || d < 0 || d > 1e9) {
      throw DomainError("poly decay shift must be a nonnegative integer");
    }
    return shifted_polynomial(s, static_cast<int>(d), delta);
  }
  throw DomainError("unknown decay spec '" + std::string(spec) + "'");
}

bool DecayFn::summable() const {
  switch (kind_) {
    case DecayKind::kExponential:
      return lambda_ > 0.0;
    case DecayKind::kShiftedPolynomial:
      return true;
    case DecayKind::kConstant:
      return false;
  }
  return false;
}

bool DecayFn::strictly_decreasing() const { return summable(); }

double DecayFn::eval(double age) const {
  if (!(age >= 0.0)) throw DomainError("decay evaluated at negative age");
  switch (kind_) {
    case DecayKind::kExponential:
      return std::exp(-lambda_ * age);
    case DecayKind::kShiftedPolynomial: {
      const double base = 1.0 + d_;
      return std::pow(base / (base + age), s_);
    }
    case DecayKind::kConstant:
      return 1.0;
  }
  return 1.0;
}

double DecayFn::retention_ratio(double age_new, double age_old) const {
  if (!(age_old >= 0.0) || !(age_new >= age_old)) {
    throw DomainError("retention ratio needs age_new >= age_old >= 0");
  }
  switch (kind_) {
    case DecayKind::kExponential:
      return std::exp(-lambda_ * (age_new - age_old));
    case DecayKind::kShiftedPolynomial: {
      const double base = 1.0 + d_;
      return std::pow((base + age_old) / (base + age_new), s_);
    }
    case DecayKind::kConstant:
      return 1.0;
  }
  return 1.0;
}

double DecayFn::step_ratio(std::int64_t j) const {
  return retention_ratio(static_cast<double>(j + 1) * delta_,
                         static_cast<double>(j) * delta_);
}

std::string DecayFn::to_string() const {
  char buf[64];
  switch (kind_) {
    case DecayKind::kExponential:
      std::snprintf(buf, sizeof buf, "exp:%g", lambda_);
      return buf;
    case DecayKind::kShiftedPolynomial:
      std::snprintf(buf, sizeof buf, "poly:%g:%d", s_, d_);
      return buf;
    case DecayKind::kConstant:
      return "const";
  }
  return "?";
}

double tail_sum(const DecayFn& fn, std::int64_t from_index) {
  if (from_index < 0) throw DomainError("tail_sum index must be >= 0");
  if (!fn.summable()) throw UnsupportedDecay("decay series diverges");
  if (fn.kind() == DecayKind::kExponential) {
    const double x = fn.lambda() * fn.delta();
    return std::exp(-x * static_cast<double>(from_index)) / -std::expm1(-x);
  }
  return power_tail(fn.s(), 1.0 + fn.d(), fn.delta(), from_index);
}

double squared_tail_sum(const DecayFn& fn, std::int64_t from_index) {
  if (from_index < 0) throw DomainError("tail_sum index must be >= 0");
  if (!fn.summable()) throw UnsupportedDecay("decay series diverges");
  if (fn.kind() == DecayKind::kExponential) {
    const double x = 2.0 * fn.lambda() * fn.delta();
    return std::exp(-x * static_cast<double>(from_index)) / -std::expm1(-x);
  }
  return power_tail(2.0 * fn.s(), 1.0 + fn.d(), fn.delta(), from_index);
}

double gamma(const DecayFn& fn) {
  if (!fn.summable()) throw UnsupportedDecay("gamma needs a summable decay");
  if (fn.kind() == DecayKind::kExponential) {
    return -std::expm1(-fn.lambda() * fn.delta());
  }
  return 1.0 / tail_sum(fn, 0);
}

double consolidation_age(const DecayFn& fn, double delta1) {
  if (!(delta1 > 0.0 && delta1 < 1.0)) {
    throw DomainError("delta1 must lie in (0, 1)");
  }
  switch (fn.kind()) {
    case DecayKind::kExponential:
      if (fn.lambda() <= 0.0) throw UnsupportedDecay("decay never drops");
      return -std::log(delta1) / fn.lambda();
    case DecayKind::kShiftedPolynomial: {
      const double base = 1.0 + fn.d();
      return base * (std::pow(delta1, -1.0 / fn.s()) - 1.0);
    }
    case DecayKind::kConstant:
      break;
  }
  throw UnsupportedDecay("decay never drops below delta1");
}

double consolidation_lambda(const DecayFn& fn, double delta1,
                            std::int64_t horizon) {
  if (fn.kind() != DecayKind::kShiftedPolynomial) {
    throw DomainError(
        "consolidation_lambda applies to shifted polynomial decay only");
  }
  const double age = consolidation_age(fn, delta1);
  const double base = 1.0 + fn.d();
  const double step = fn.delta();
  const double lambda =
      fn.s() * std::log((base + age + step) / (base + age)) / step;
  if (horizon <= 0) {
    horizon = 10 * static_cast<std::int64_t>(std::ceil(1.0 / gamma(fn)));
  }
  const double bound = std::exp(-lambda * step);
  for (std::int64_t j = 0; j <= horizon; ++j) {
    const double a = age + static_cast<double>(j) * step;
    if (bound > fn.retention_ratio(a + step, a) * (1.0 + 1e-12)) {
      throw InvariantViolation("consolidation rate fails at age " +
                               std::to_string(a));
    }
  }
  return lambda;
}

std::int64_t tail_index(const DecayFn& fn, double bound) {
  if (!(bound > 0.0)) throw DomainError("tail bound must be positive");
  std::int64_t hi = 1;
  while (tail_sum(fn, hi) > bound) {
    if (hi > (std::int64_t{1} << 50)) {
      throw CapacityError("tail bound unreachable");
    }
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // tail_sum(lo) > bound, or lo == 0
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail_sum(fn, mid) <= bound) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::int64_t first_index_below(const DecayFn& fn, double delta1) {
  const double age = consolidation_age(fn, delta1);
  auto j = static_cast<std::int64_t>(std::floor(age / fn.delta())) - 1;
  if (j < 0) j = 0;
  while (fn.at(j) >= delta1) ++j;
  while (j > 0 && fn.at(j - 1) < delta1) --j;
  return j;
}

DecayConstants DecayConstants::compute(const DecayFn& fn,
                                       std::int64_t horizon) {
  DecayConstants c;
  c.fn_ = fn;
  c.gamma = tbs::gamma(fn);
  c.f_inf = fn.kind() == DecayKind::kExponential ? 1.0 / c.gamma
                                                 : tail_sum(fn, 0);
  c.f2_inf = squared_tail_sum(fn, 0);
  if (horizon <= 0) {
    horizon = 10 * static_cast<std::int64_t>(std::ceil(1.0 / c.gamma));
  }
  c.f_table.resize(static_cast<std::size_t>(horizon) + 1);
  double acc = 0.0;
  for (std::int64_t k = 0; k <= horizon; ++k) {
    acc += fn.at(k);
    c.f_table[static_cast<std::size_t>(k)] = acc;
  }
  return c;
}

double DecayConstants::partial_sum(std::int64_t k) const {
  if (k < 0) throw DomainError("partial sum index must be >= 0");
  if (k <= horizon()) return f_table[static_cast<std::size_t>(k)];
  return f_inf - tail_sum(fn_, k + 1);
}

}  // namespace tbs
