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

// Latent fractional samples.
//
// A latent sample (A, pi, C) holds floor(C) full items and, when C is not an
// integer, one partial item. Realizing it yields A plus the partial item with
// probability frc(C).
//
// Each operation is split into a pure decision, which consumes exactly one
// uniform and returns what to do, and an executor that applies the decision
// to a concrete store. The partitioned layer reuses the decisions with its
// own executors.

#ifndef TBS_LATENT_HPP_
#define TBS_LATENT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tbs/random.hpp"
#include "tbs/types.hpp"

namespace tbs {

// Weights within this distance of an integer are snapped to it.
inline constexpr double kWeightSnap = 1e-9;

double frc(double x);
double snap_weight(double c);

struct LatentSample {
  std::vector<ItemId> full;
  std::optional<ItemId> partial;
  double weight = 0.0;

  // All items full, weight = number of items.
  static LatentSample from_items(std::vector<ItemId> items);

  std::size_t footprint() const { return full.size() + (partial ? 1 : 0); }
  // Throws InvariantViolation when the structure is inconsistent.
  void check() const;
  // "C=<weight>;A=[id,id];pi=<id|->".
  std::string to_string() const;
};

enum class PartialOp { kNone, kSwap1, kMove1 };

// Downsampling plan. Executors apply, in order: keep a uniform subset of
// `retain` full items; apply `op` (pick one full item uniformly; Swap1 returns
// the old partial to the full set, Move1 discards it; the pick becomes the
// partial); clear the full set if `clear_full`; drop the partial if
// `drop_partial`. The result has weight `weight`.
struct DownsampleDecision {
  double weight = 0.0;
  std::size_t retain = 0;
  PartialOp op = PartialOp::kNone;
  bool clear_full = false;
  bool drop_partial = false;
};

// u is uniform on (0, 1]. Requires 0 < theta < 1 and weight > 0.
DownsampleDecision decide_downsample(std::size_t full_count, bool has_partial,
                                     double weight, double theta, double u);

enum class PartialFate { kAbsent, kKeep, kPromote, kDiscard };

// Union plan: full items are concatenated, then the partial items are kept,
// promoted to full (first input before second), or discarded.
struct UnionDecision {
  double weight = 0.0;
  PartialFate first = PartialFate::kAbsent;
  PartialFate second = PartialFate::kAbsent;
};

UnionDecision decide_union(double w1, bool has_p1, double w2, bool has_p2,
                           double u);

// True when the partial item of a sample with this weight is included.
inline bool decide_include_partial(double weight, double u) {
  return u <= frc(weight);
}

// Full items followed by the partial item when it is included.
std::vector<ItemId> realize(const LatentSample& l, RandomStream& rng);

// Decisions come from `decide`, subset and Swap1/Move1 picks from `select`.
LatentSample downsample(LatentSample l, double theta, RandomStream& decide,
                        RandomStream& select);
inline LatentSample downsample(LatentSample l, double theta,
                               RandomStream& rng) {
  return downsample(std::move(l), theta, rng, rng);
}

// The inputs must be disjoint. Only the union decision is random.
LatentSample unite(LatentSample l1, LatentSample l2, RandomStream& rng);
// Left fold of unite; an empty list yields the empty sample.
LatentSample unite_all(std::vector<LatentSample> samples, RandomStream& rng);

// Applies a downsampling plan to (full, partial) using `select` for picks.
void apply_downsample(const DownsampleDecision& d, std::vector<ItemId>& full,
                      std::optional<ItemId>& partial, RandomStream& select);

}  // namespace tbs

#endif  // TBS_LATENT_HPP_
