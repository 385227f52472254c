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

#include "tbs/latent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

namespace tbs {

double frc(double x) { return x - std::floor(x); }

double snap_weight(double c) {
  const double r = std::round(c);
  return std::fabs(c - r) < kWeightSnap ? r : c;
}

LatentSample LatentSample::from_items(std::vector<ItemId> items) {
  LatentSample l;
  l.weight = static_cast<double>(items.size());
  l.full = std::move(items);
  return l;
}

void LatentSample::check() const {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InvariantViolation("latent weight must be finite and >= 0");
  }
  if (static_cast<double>(full.size()) != std::floor(weight)) {
    throw InvariantViolation("latent sample: |A| != floor(C) in " +
                             to_string());
  }
  if (partial.has_value() != (frc(weight) > 0.0)) {
    throw InvariantViolation("latent sample: partial item mismatch in " +
                             to_string());
  }
  std::vector<ItemId> ids(full);
  if (partial) ids.push_back(*partial);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvariantViolation("latent sample holds a duplicate item");
  }
}

std::string LatentSample::to_string() const {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, weight);
  std::string out = "C=" + std::string(buf, res.ptr) + ";A=[";
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(full[i]);
  }
  out += "];pi=";
  out += partial ? std::to_string(*partial) : std::string("-");
  return out;
}

DownsampleDecision decide_downsample(std::size_t full_count, bool has_partial,
                                     double weight, double theta, double u) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("downsampling factor must lie in (0, 1)");
  }
  if (!(weight > 0.0)) throw DomainError("cannot downsample an empty sample");
  (void)has_partial;
  DownsampleDecision d;
  d.weight = snap_weight(theta * weight);
  d.retain = full_count;
  const double fc = frc(weight);
  const auto new_floor = static_cast<std::size_t>(std::floor(d.weight));
  if (new_floor == 0) {
    if (u > fc / weight) d.op = PartialOp::kSwap1;
    d.clear_full = true;
  } else if (new_floor == full_count) {
    if (u > (1.0 - theta * fc) / (1.0 - frc(d.weight))) {
      d.op = PartialOp::kSwap1;
    }
  } else if (u <= theta * fc) {
    d.retain = new_floor;
    d.op = PartialOp::kSwap1;
  } else {
    d.retain = new_floor + 1;
    d.op = PartialOp::kMove1;
  }
  d.drop_partial = frc(d.weight) == 0.0;
  return d;
}

UnionDecision decide_union(double w1, bool has_p1, double w2, bool has_p2,
                           double u) {
  UnionDecision d;
  d.weight = snap_weight(w1 + w2);
  const double f1 = has_p1 ? frc(w1) : 0.0;
  const double f2 = has_p2 ? frc(w2) : 0.0;
  const double s = f1 + f2;
  if (s == 0.0) return d;
  const auto absent_or = [](bool present, PartialFate fate) {
    return present ? fate : PartialFate::kAbsent;
  };
  if (std::fabs(s - 1.0) < kWeightSnap) {
    const bool first = u <= f1;
    d.first = absent_or(has_p1, first ? PartialFate::kPromote
                                      : PartialFate::kDiscard);
    d.second = absent_or(has_p2, first ? PartialFate::kDiscard
                                       : PartialFate::kPromote);
  } else if (s < 1.0) {
    const bool first = u <= f1 / s;
    d.first = absent_or(has_p1, first ? PartialFate::kKeep
                                      : PartialFate::kDiscard);
    d.second = absent_or(has_p2, first ? PartialFate::kDiscard
                                       : PartialFate::kKeep);
  } else {
    const bool first = u <= (1.0 - f1) / ((1.0 - f1) + (1.0 - f2));
    d.first = first ? PartialFate::kKeep : PartialFate::kPromote;
    d.second = first ? PartialFate::kPromote : PartialFate::kKeep;
  }
  return d;
}

std::vector<ItemId> realize(const LatentSample& l, RandomStream& rng) {
  std::vector<ItemId> out;
  out.reserve(l.footprint());
  out = l.full;
  if (l.partial && decide_include_partial(l.weight, rng.uniform_pos())) {
    out.push_back(*l.partial);
  }
  return out;
}

void apply_downsample(const DownsampleDecision& d, std::vector<ItemId>& full,
                      std::optional<ItemId>& partial, RandomStream& select) {
  retain_random(full, d.retain, select);
  if (d.op != PartialOp::kNone) {
    if (full.empty()) throw InvariantViolation("Swap1/Move1 on empty set");
    const std::size_t pos = select.index(full.size());
    const ItemId picked = full[pos];
    full.erase(full.begin() + static_cast<std::ptrdiff_t>(pos));
    if (d.op == PartialOp::kSwap1 && partial) full.push_back(*partial);
    partial = picked;
  }
  if (d.clear_full) full.clear();
  if (d.drop_partial) partial.reset();
}

LatentSample downsample(LatentSample l, double theta, RandomStream& decide,
                        RandomStream& select) {
  const DownsampleDecision d =
      decide_downsample(l.full.size(), l.partial.has_value(), l.weight, theta,
                        decide.uniform_pos());
  apply_downsample(d, l.full, l.partial, select);
  l.weight = d.weight;
  return l;
}

LatentSample unite(LatentSample l1, LatentSample l2, RandomStream& rng) {
  const UnionDecision d =
      decide_union(l1.weight, l1.partial.has_value(), l2.weight,
                   l2.partial.has_value(), rng.uniform_pos());
  LatentSample out;
  out.weight = d.weight;
  out.full = std::move(l1.full);
  out.full.insert(out.full.end(), l2.full.begin(), l2.full.end());
  if (d.first == PartialFate::kPromote) out.full.push_back(*l1.partial);
  if (d.second == PartialFate::kPromote) out.full.push_back(*l2.partial);
  if (d.first == PartialFate::kKeep) out.partial = l1.partial;
  if (d.second == PartialFate::kKeep) out.partial = l2.partial;
  return out;
}

LatentSample unite_all(std::vector<LatentSample> samples, RandomStream& rng) {
  if (samples.empty()) return {};
  LatentSample acc = std::move(samples.front());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    acc = unite(std::move(acc), std::move(samples[i]), rng);
  }
  return acc;
}

}  // namespace tbs
