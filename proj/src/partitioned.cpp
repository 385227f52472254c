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

#include "tbs/partitioned.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>

#include "tbs/latent.hpp"
#include "tbs/rtbs_core.hpp"

namespace tbs {

Strategy parse_strategy(std::string_view name) {
  if (name == "centralized") return Strategy::kCentralized;
  if (name == "distributed") return Strategy::kDistributed;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) {
  return s == Strategy::kCentralized ? "centralized" : "distributed";
}

void PartitionConfig::validate() const {
  if (partitions == 0) throw ConfigError("need at least one partition");
  if (layout == Layout::kKeyValue && strategy == Strategy::kDistributed) {
    throw ConfigError(
        "the key-value layout supports only centralized decisions");
  }
}

std::size_t PartitionedLatent::full_count() const {
  std::size_t c = 0;
  for (const auto& p : parts) c += p.size();
  return c;
}

std::map<std::int64_t, std::vector<std::size_t>>
PartitionedLatent::arrival_counts() const {
  std::map<std::int64_t, std::vector<std::size_t>> out;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    for (ItemId x : parts[j]) {
      auto& row = out[arrival_index(x)];
      row.resize(parts.size(), 0);
      ++row[j];
    }
  }
  return out;
}

std::size_t DecisionPlan::total_deletes() const {
  std::size_t t = 0;
  for (auto d : deletes) t += d;
  return t;
}

namespace {

std::size_t sum(const std::vector<std::size_t>& v) {
  std::size_t t = 0;
  for (auto x : v) t += x;
  return t;
}

// Maps a global slot to (partition, local position).
std::pair<std::size_t, std::size_t> locate(
    const std::vector<std::size_t>& counts, std::size_t slot) {
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (slot < counts[j]) return {j, slot};
    slot -= counts[j];
  }
  throw DomainError("slot beyond the reservoir");
}

}  // namespace

DecisionPlan plan_centralized(const std::vector<std::size_t>& counts,
                              std::size_t deletes, RandomStream& coordinator) {
  const std::size_t total = sum(counts);
  if (deletes > total) throw DomainError("plan deletes more items than exist");
  DecisionPlan plan;
  plan.deletes.assign(counts.size(), 0);
  plan.inserts.assign(counts.size(), 0);
  plan.positions.assign(counts.size(), {});
  // Slots come back sorted, so local positions are sorted per partition.
  for (std::size_t slot : coordinator.select_positions(total, deletes)) {
    const auto [j, pos] = locate(counts, slot);
    plan.positions[j].push_back(pos);
    ++plan.deletes[j];
  }
  return plan;
}

DecisionPlan plan_distributed(const std::vector<std::size_t>& counts,
                              std::size_t deletes, RandomStream& coordinator) {
  if (deletes > sum(counts)) {
    throw DomainError("plan deletes more items than exist");
  }
  std::vector<std::uint64_t> sizes(counts.begin(), counts.end());
  const auto split = coordinator.multivariate_hypergeometric(deletes, sizes);
  DecisionPlan plan;
  plan.deletes.assign(split.begin(), split.end());
  plan.inserts.assign(counts.size(), 0);
  return plan;
}

void apply_plan(PartitionedLatent& latent, const DecisionPlan& plan,
                const std::vector<std::vector<ItemId>>& incoming,
                std::vector<RandomStream>& workers) {
  const std::size_t m = latent.parts.size();
  if (latent.counts.size() != m || plan.deletes.size() != m ||
      workers.size() < m || (!incoming.empty() && incoming.size() != m)) {
    throw DomainError("plan does not match the partition count");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (latent.counts[j] != latent.parts[j].size()) {
      throw InvariantViolation("coordinator count drifted on partition " +
                               std::to_string(j));
    }
    if (plan.deletes[j] > latent.counts[j]) {
      throw DomainError("plan deletes more items than partition " +
                        std::to_string(j) + " holds");
    }
  }
  const bool centralized = !plan.positions.empty();
  for (std::size_t j = 0; j < m; ++j) {
    if (centralized) {
      erase_positions(latent.parts[j], plan.positions[j]);
    } else {
      erase_positions(latent.parts[j],
                      workers[j].select_positions(latent.parts[j].size(),
                                                  plan.deletes[j]));
    }
    if (!incoming.empty()) {
      latent.parts[j].insert(latent.parts[j].end(), incoming[j].begin(),
                             incoming[j].end());
    }
    latent.counts[j] = latent.counts[j] - plan.deletes[j] +
                       (incoming.empty() ? 0 : incoming[j].size());
  }
}

std::size_t block_start(std::size_t size, std::size_t m, std::size_t j) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(size) * j) / m);
}

std::size_t home_partition(std::uint64_t offset, std::size_t size,
                           std::size_t m) {
  if (offset >= size) throw DomainError("offset outside the batch");
  std::size_t j = std::min<std::size_t>(
      m - 1, static_cast<std::size_t>(
                 (static_cast<unsigned __int128>(offset) * m) / size));
  while (j > 0 && block_start(size, m, j) > offset) --j;
  while (j + 1 < m && block_start(size, m, j + 1) <= offset) ++j;
  return j;
}

PartitionedBackend::PartitionedBackend(const PartitionConfig& config,
                                       std::uint64_t seed,
                                       std::uint64_t replica)
    : config_(config),
      decide_(replica_stream(seed, replica, 0)),
      coordinator_(replica_stream(seed, replica, 1)) {
  config_.validate();
  workers_.reserve(config_.partitions);
  for (std::size_t j = 0; j < config_.partitions; ++j) {
    workers_.push_back(replica_stream(seed, replica, 1 + j));
  }
}

PartitionedLatent PartitionedBackend::empty() const {
  PartitionedLatent l;
  l.parts.assign(config_.partitions, {});
  l.counts.assign(config_.partitions, 0);
  return l;
}

void PartitionedBackend::place(std::vector<ItemId>& part, std::size_t j,
                               ItemId item) {
  const auto it = batch_sizes_.find(arrival_index(item));
  if (it == batch_sizes_.end() ||
      home_partition(arrival_offset(item), it->second, config_.partitions) != j) {
    ++moves_;
  }
  part.push_back(item);
}

PartitionedLatent PartitionedBackend::ingest(const Batch& batch) {
  const std::size_t m = config_.partitions;
  batch_sizes_[batch.index] = batch.size();
  PartitionedLatent l = empty();
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t lo = block_start(batch.size(), m, j);
    const std::size_t hi = block_start(batch.size(), m, j + 1);
    l.parts[j].reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) place(l.parts[j], j, batch.items[i]);
    l.counts[j] = hi - lo;
  }
  l.weight = static_cast<double>(batch.size());
  return l;
}

std::size_t PartitionedBackend::pick_partition_slot(const Latent& l,
                                                    std::size_t slot) const {
  return locate(l.counts, slot).first;
}

void PartitionedBackend::downsample(Latent& l, double theta) {
  const std::size_t total = l.full_count();
  const DownsampleDecision d = decide_downsample(
      total, l.partial.has_value(), l.weight, theta, decide_.uniform_pos());
  const std::size_t deletes = d.retain < total ? total - d.retain : 0;
  const DecisionPlan plan =
      config_.strategy == Strategy::kCentralized
          ? plan_centralized(l.counts, deletes, coordinator_)
          : plan_distributed(l.counts, deletes, decide_);
  apply_plan(l, plan, {}, workers_);

  if (d.op != PartialOp::kNone) {
    const std::size_t left = l.full_count();
    if (left == 0) throw InvariantViolation("Swap1/Move1 on empty set");
    std::size_t j = 0;
    std::size_t pos = 0;
    if (config_.strategy == Strategy::kCentralized) {
      std::tie(j, pos) = locate(l.counts, coordinator_.index(left));
    } else {
      j = config_.partitions > 1 ? pick_partition_slot(l, decide_.index(left))
                                 : 0;
      pos = workers_[j].index(l.counts[j]);
    }
    auto& part = l.parts[j];
    const ItemId picked = part[pos];
    part.erase(part.begin() + static_cast<std::ptrdiff_t>(pos));
    --l.counts[j];
    if (d.op == PartialOp::kSwap1 && l.partial) {
      place(l.parts[l.partial->partition], l.partial->partition,
            l.partial->item);
      ++l.counts[l.partial->partition];
    }
    l.partial = PartialLocation{j, picked};
  }
  if (d.clear_full) {
    for (auto& p : l.parts) p.clear();
    std::fill(l.counts.begin(), l.counts.end(), 0);
  }
  if (d.drop_partial) l.partial.reset();
  l.weight = d.weight;
}

PartitionedLatent PartitionedBackend::unite(Latent a, Latent b) {
  const UnionDecision d =
      decide_union(a.weight, a.partial.has_value(), b.weight,
                   b.partial.has_value(), decide_.uniform_pos());
  Latent out = std::move(a);
  out.weight = d.weight;
  for (std::size_t j = 0; j < out.parts.size(); ++j) {
    out.parts[j].insert(out.parts[j].end(), b.parts[j].begin(),
                        b.parts[j].end());
    out.counts[j] += b.counts[j];
  }
  const auto first = out.partial;
  out.partial.reset();
  if (d.first == PartialFate::kPromote) {
    place(out.parts[first->partition], first->partition, first->item);
    ++out.counts[first->partition];
  }
  if (d.second == PartialFate::kPromote) {
    place(out.parts[b.partial->partition], b.partial->partition,
          b.partial->item);
    ++out.counts[b.partial->partition];
  }
  if (d.first == PartialFate::kKeep) out.partial = first;
  if (d.second == PartialFate::kKeep) out.partial = b.partial;
  return out;
}

std::vector<ItemId> PartitionedBackend::realize(const Latent& l) {
  std::vector<ItemId> out;
  out.reserve(l.footprint());
  for (const auto& p : l.parts) out.insert(out.end(), p.begin(), p.end());
  if (l.partial && decide_include_partial(l.weight, decide_.uniform_pos())) {
    out.push_back(l.partial->item);
  }
  return out;
}

std::size_t PartitionedBackend::misplaced(const Latent& l) const {
  std::size_t bad = 0;
  const auto check = [&](ItemId x, std::size_t j) {
    const auto it = batch_sizes_.find(arrival_index(x));
    if (it == batch_sizes_.end() ||
        home_partition(arrival_offset(x), it->second, config_.partitions) != j) {
      ++bad;
    }
  };
  for (std::size_t j = 0; j < l.parts.size(); ++j) {
    for (ItemId x : l.parts[j]) check(x, j);
  }
  if (l.partial) check(l.partial->item, l.partial->partition);
  return bad;
}

namespace {

template <typename Core>
class PartitionedRtbs final : public PartitionedSampler {
 public:
  PartitionedRtbs(const SamplerConfig& c, PartitionedBackend backend)
      : core_(c, std::move(backend)) {}

  void step(const Batch& batch) override { core_.step(batch); }
  std::vector<ItemId> sample() const override { return core_.realized(); }
  TrajectoryRecord record() const override { return core_.record(); }
  std::optional<RtbsGenStatus> gen_status() const override {
    if constexpr (std::is_same_v<Core, RtbsGenCore<PartitionedBackend>>) {
      return core_.status();
    } else {
      return std::nullopt;
    }
  }
  std::size_t cross_partition_moves() const override {
    return core_.backend().cross_partition_moves();
  }

 private:
  Core core_;
};

}  // namespace

std::unique_ptr<PartitionedSampler> make_partitioned_sampler(
    const SamplerConfig& config, const PartitionConfig& partitions,
    std::uint64_t seed, std::uint64_t replica) {
  config.validate();
  partitions.validate();
  PartitionedBackend backend(partitions, seed, replica);
  switch (config.algorithm) {
    case Algorithm::kRtbsExp:
      return std::make_unique<PartitionedRtbs<RtbsExpCore<PartitionedBackend>>>(
          config, std::move(backend));
    case Algorithm::kRtbsGen:
      return std::make_unique<PartitionedRtbs<RtbsGenCore<PartitionedBackend>>>(
          config, std::move(backend));
    default:
      throw ConfigError("partitioned runs support only rtbs-exp and rtbs-gen");
  }
}

PartitionedRun run_partitioned_rtbs(const SamplerConfig& config,
                                    const PartitionConfig& partitions,
                                    const std::vector<Batch>& batches,
                                    std::uint64_t seed, std::uint64_t replica) {
  auto sampler = make_partitioned_sampler(config, partitions, seed, replica);
  PartitionedRun out;
  out.trajectory = run(*sampler, batches);
  out.realized = sampler->sample();
  out.cross_partition_moves = sampler->cross_partition_moves();
  return out;
}

}  // namespace tbs
