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

// In-process simulation of a reservoir spread over m workers.
//
// Each incoming batch arrives split into m contiguous blocks, block j on
// worker j. Every latent sample keeps its full items in per-worker vectors
// next to the block they came from; the coordinator only sees counts and the
// location of the partial item. Deletions are planned either centrally
// (coordinator picks global slots) or distributedly (coordinator picks
// per-worker counts, workers pick victims on their own streams).
//
// Randomness: the coordinator uses lane 0 for decisions and lane 1 for
// centralized selection; worker j uses lane 1 + j. With m = 1 both
// strategies consume exactly the streams of the single-node sampler.

#ifndef TBS_PARTITIONED_HPP_
#define TBS_PARTITIONED_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "tbs/random.hpp"
#include "tbs/samplers.hpp"
#include "tbs/types.hpp"

namespace tbs {

enum class Strategy { kCentralized, kDistributed };
// Key-value: items live in a shared store addressed by key, so only the
// coordinator can locate victims. Co-partitioned: items stay on the worker
// that received them.
enum class Layout { kCoPartitioned, kKeyValue };

Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);

struct PartitionConfig {
  std::size_t partitions = 1;
  Strategy strategy = Strategy::kCentralized;
  Layout layout = Layout::kCoPartitioned;

  void validate() const;
};

struct PartialLocation {
  std::size_t partition = 0;
  ItemId item = 0;
};

struct PartitionedLatent {
  std::vector<std::vector<ItemId>> parts;  // full items per worker
  std::vector<std::size_t> counts;         // coordinator's view of parts
  std::optional<PartialLocation> partial;
  double weight = 0.0;

  std::size_t full_count() const;
  std::size_t footprint() const { return full_count() + (partial ? 1 : 0); }
  // Per-arrival-index item counts for each partition.
  std::map<std::int64_t, std::vector<std::size_t>> arrival_counts() const;
};

// Deletions for one latent sample. Centralized plans also carry the sorted
// local positions to delete on each worker.
struct DecisionPlan {
  std::vector<std::size_t> deletes;
  std::vector<std::size_t> inserts;
  std::vector<std::vector<std::size_t>> positions;

  std::size_t total_deletes() const;
};

// Draws `deletes` global slots uniformly without replacement and maps them to
// (partition, position).
DecisionPlan plan_centralized(const std::vector<std::size_t>& counts,
                              std::size_t deletes, RandomStream& coordinator);
// Draws only the per-partition delete counts (multivariate hypergeometric).
DecisionPlan plan_distributed(const std::vector<std::size_t>& counts,
                              std::size_t deletes, RandomStream& coordinator);

// Executes a plan locally on each worker and updates the coordinator counts.
// `incoming` (may be empty) holds per-worker items to insert afterwards.
// Throws InvariantViolation if the coordinator counts drifted from the
// workers' stores, DomainError if the plan does not fit the counts.
void apply_plan(PartitionedLatent& latent, const DecisionPlan& plan,
                const std::vector<std::vector<ItemId>>& incoming,
                std::vector<RandomStream>& workers);

// Start of block j when `size` items are split into m contiguous blocks.
std::size_t block_start(std::size_t size, std::size_t m, std::size_t j);
// Worker that receives item `offset` of a batch of `size` items.
std::size_t home_partition(std::uint64_t offset, std::size_t size,
                           std::size_t m);

// Latent-sample backend over m simulated workers; see rtbs_core.hpp.
class PartitionedBackend {
 public:
  using Latent = PartitionedLatent;

  PartitionedBackend(const PartitionConfig& config, std::uint64_t seed,
                     std::uint64_t replica);

  Latent empty() const;
  Latent ingest(const Batch& batch);
  void downsample(Latent& l, double theta);
  Latent unite(Latent a, Latent b);
  std::vector<ItemId> realize(const Latent& l);
  static double weight(const Latent& l) { return l.weight; }
  static std::size_t stored(const Latent& l) { return l.footprint(); }

  // Items placed on a worker other than the one that received them.
  std::size_t cross_partition_moves() const { return moves_; }
  // Recounts every item's worker; returns the number of misplaced items.
  std::size_t misplaced(const Latent& l) const;

 private:
  void place(std::vector<ItemId>& part, std::size_t j, ItemId item);
  std::size_t pick_partition_slot(const Latent& l, std::size_t slot) const;

  PartitionConfig config_;
  RandomStream decide_;
  RandomStream coordinator_;
  std::vector<RandomStream> workers_;
  std::map<std::int64_t, std::size_t> batch_sizes_;
  std::size_t moves_ = 0;
};

// R-TBS (exponential or general decay) over a partitioned reservoir.
class PartitionedSampler : public Sampler {
 public:
  virtual std::size_t cross_partition_moves() const = 0;
};

std::unique_ptr<PartitionedSampler> make_partitioned_sampler(
    const SamplerConfig& config, const PartitionConfig& partitions,
    std::uint64_t seed, std::uint64_t replica = 0);

struct PartitionedRun {
  std::vector<TrajectoryRecord> trajectory;
  std::vector<ItemId> realized;
  std::size_t cross_partition_moves = 0;
};

PartitionedRun run_partitioned_rtbs(const SamplerConfig& config,
                                    const PartitionConfig& partitions,
                                    const std::vector<Batch>& batches,
                                    std::uint64_t seed,
                                    std::uint64_t replica = 0);

}  // namespace tbs

#endif  // TBS_PARTITIONED_HPP_
