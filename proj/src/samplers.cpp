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

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "tbs/latent.hpp"
#include "tbs/random.hpp"
#include "tbs/rtbs_core.hpp"

namespace tbs {

namespace {

class LocalBackend {
 public:
  using Latent = LatentSample;

  explicit LocalBackend(SamplerRng rng) : rng_(std::move(rng)) {}

  Latent empty() const { return {}; }
  Latent ingest(const Batch& b) { return LatentSample::from_items(b.items); }
  void downsample(Latent& l, double theta) {
    l = tbs::downsample(std::move(l), theta, rng_.decide, rng_.select);
  }
  Latent unite(Latent a, Latent b) {
    return tbs::unite(std::move(a), std::move(b), rng_.decide);
  }
  std::vector<ItemId> realize(const Latent& l) {
    return tbs::realize(l, rng_.decide);
  }
  static double weight(const Latent& l) { return l.weight; }
  static std::size_t stored(const Latent& l) { return l.footprint(); }

 private:
  SamplerRng rng_;
};

void require_exponential(const SamplerConfig& c) {
  if (c.decay.kind() != DecayKind::kExponential) {
    throw ConfigError(std::string(algorithm_name(c.algorithm)) +
                      " needs exponential decay");
  }
}

void check_order(std::int64_t last, const Batch& b) {
  if (b.index != last + 1) throw DomainError("batches must arrive in order");
}

class BtbsSampler final : public Sampler {
 public:
  BtbsSampler(const SamplerConfig& c, SamplerRng rng)
      : p_(std::exp(-c.decay.lambda() * c.decay.delta())), rng_(std::move(rng)) {}

  void step(const Batch& batch) override {
    check_order(k_, batch);
    k_ = batch.index;
    const auto keep = rng_.decide.binomial(s_.size(), p_);
    retain_random(s_, keep, rng_.select);
    s_.insert(s_.end(), batch.items.begin(), batch.items.end());
    W_ = p_ * W_ + static_cast<double>(batch.size());
  }
  std::vector<ItemId> sample() const override { return s_; }
  TrajectoryRecord record() const override {
    return {k_, W_, static_cast<double>(s_.size()), 1.0, s_.size(), s_.size(), 1};
  }

 private:
  double p_;
  SamplerRng rng_;
  std::vector<ItemId> s_;
  std::int64_t k_ = 0;
  double W_ = 0.0;
};

class BrsSampler final : public Sampler {
 public:
  BrsSampler(const SamplerConfig& c, SamplerRng rng)
      : n_(c.n), rng_(std::move(rng)) {}

  void step(const Batch& batch) override {
    check_order(k_, batch);
    k_ = batch.index;
    const std::uint64_t b = batch.size();
    const std::uint64_t c = std::min<std::uint64_t>(n_, W_ + b);
    const std::uint64_t m = rng_.decide.hypergeometric(c, b, W_);
    retain_random(s_, std::min<std::size_t>(n_ - m, s_.size()), rng_.select);
    const auto fresh = sample_without_replacement(rng_.select, batch.items, m);
    s_.insert(s_.end(), fresh.begin(), fresh.end());
    W_ += b;
  }
  std::vector<ItemId> sample() const override { return s_; }
  TrajectoryRecord record() const override {
    const double w = static_cast<double>(W_);
    const double rho = w > 0.0 ? std::min(1.0, static_cast<double>(n_) / w) : 1.0;
    return {k_, w, static_cast<double>(s_.size()), rho, s_.size(), s_.size(), 1};
  }

 private:
  std::size_t n_;
  SamplerRng rng_;
  std::vector<ItemId> s_;
  std::int64_t k_ = 0;
  std::uint64_t W_ = 0;
};

class TtbsSampler final : public Sampler {
 public:
  TtbsSampler(const SamplerConfig& c, SamplerRng rng)
      : fn_(c.decay),
        q_(static_cast<double>(c.n) * gamma(c.decay) / c.b),
        rng_(std::move(rng)) {}

  void step(const Batch& batch) override {
    check_order(k_, batch);
    k_ = batch.index;
    for (auto it = groups_.begin(); it != groups_.end();) {
      const double p = fn_.step_ratio(k_ - 1 - it->first);
      const auto keep = rng_.decide.binomial(it->second.size(), p);
      if (keep == 0) {
        it = groups_.erase(it);
        continue;
      }
      retain_random(it->second, keep, rng_.select);
      ++it;
    }
    const auto l = rng_.decide.binomial(batch.size(), q_);
    if (l > 0) {
      groups_.emplace(k_, sample_without_replacement(rng_.select, batch.items, l));
    }
    sizes_.push_back(batch.size());
  }

  std::vector<ItemId> sample() const override {
    std::vector<ItemId> out;
    for (const auto& [i, h] : groups_) out.insert(out.end(), h.begin(), h.end());
    return out;
  }

  TrajectoryRecord record() const override {
    double w = 0.0;
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
      if (sizes_[j] == 0) continue;
      w += static_cast<double>(sizes_[j]) *
           fn_.at(k_ - static_cast<std::int64_t>(j) - 1);
    }
    std::size_t items = 0;
    for (const auto& [i, h] : groups_) items += h.size();
    return {k_, w, static_cast<double>(items), q_, items, items, groups_.size()};
  }

 private:
  DecayFn fn_;
  double q_;
  SamplerRng rng_;
  std::map<std::int64_t, std::vector<ItemId>> groups_;
  std::vector<std::size_t> sizes_;
  std::int64_t k_ = 0;
};

class RtbsExpSampler final : public Sampler {
 public:
  RtbsExpSampler(const SamplerConfig& c, SamplerRng rng)
      : core_(c, LocalBackend(std::move(rng))) {}

  void step(const Batch& batch) override { core_.step(batch); }
  std::vector<ItemId> sample() const override { return core_.realized(); }
  TrajectoryRecord record() const override { return core_.record(); }

 private:
  RtbsExpCore<LocalBackend> core_;
};

class RtbsGenSampler final : public Sampler {
 public:
  RtbsGenSampler(const SamplerConfig& c, SamplerRng rng)
      : core_(c, LocalBackend(std::move(rng))) {}

  void step(const Batch& batch) override { core_.step(batch); }
  std::vector<ItemId> sample() const override { return core_.realized(); }
  TrajectoryRecord record() const override { return core_.record(); }
  std::optional<RtbsGenStatus> gen_status() const override {
    return core_.status();
  }

 private:
  RtbsGenCore<LocalBackend> core_;
};

// S holds non-overweight sample items, V overweight items with their
// weights, and W the aggregate weight of all non-overweight items seen.
class BchaoSampler final : public Sampler {
 public:
  BchaoSampler(const SamplerConfig& c, SamplerRng rng)
      : n_(c.n),
        theta_(std::exp(-c.decay.lambda() * c.decay.delta())),
        rng_(std::move(rng)) {}

  void step(const Batch& batch) override {
    check_order(k_, batch);
    k_ = batch.index;
    W_ *= theta_;
    for (auto& [z, w] : V_) w *= theta_;
    // Items are taken from the batch in random order.
    std::vector<ItemId> items = batch.items;
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[rng_.select.index(i)]);
    }
    for (ItemId x : items) insert(x);
    diag_.overweight = V_.size();
  }

  std::vector<ItemId> sample() const override {
    std::vector<ItemId> out = S_;
    for (const auto& [z, w] : V_) out.push_back(z);
    return out;
  }

  TrajectoryRecord record() const override {
    const std::size_t size = S_.size() + V_.size();
    return {k_, W_, static_cast<double>(size), 1.0, size, size, 1};
  }

  std::optional<ChaoDiagnostics> chao_diagnostics() const override {
    return diag_;
  }

 private:
  using Weighted = std::pair<ItemId, double>;

  bool overweight(std::size_t d, double w) const {
    if (W_ <= 0.0) return true;
    const double slots = static_cast<double>(n_) - static_cast<double>(d);
    return slots * w / W_ > 1.0;
  }

  // Splits V into items that stay overweight (returned as the new V) and
  // newly non-overweight items A; returns the inclusion probability of x.
  double normalize(ItemId x, std::vector<Weighted>& A) {
    for (const auto& [z, w] : V_) W_ += w;
    W_ += 1.0;
    if (static_cast<double>(n_) / W_ <= 1.0) {
      A = std::move(V_);
      V_.clear();
      return static_cast<double>(n_) / W_;
    }
    W_ -= 1.0;
    std::vector<Weighted> D{{x, 1.0}};
    while (!V_.empty()) {
      auto best = V_.begin();
      for (auto it = V_.begin(); it != V_.end(); ++it) {
        if (it->second > best->second ||
            (it->second == best->second && it->first < best->first)) {
          best = it;
        }
      }
      const Weighted z = *best;
      V_.erase(best);
      if (overweight(D.size(), z.second)) {
        D.push_back(z);
        W_ -= z.second;
      } else {
        A.push_back(z);
        break;
      }
    }
    A.insert(A.end(), V_.begin(), V_.end());
    V_ = std::move(D);
    return 1.0;
  }

  void insert(ItemId x) {
    if (S_.size() + V_.size() < n_) {
      S_.push_back(x);
      W_ += 1.0;
      return;
    }
    std::vector<Weighted> A;
    const double pi = normalize(x, A);
    if (rng_.decide.uniform_pos() <= pi) {
      evict(A, pi, x);
      const bool x_overweight = std::any_of(
          V_.begin(), V_.end(), [x](const Weighted& v) { return v.first == x; });
      if (!x_overweight) S_.push_back(x);
    }
    for (const auto& [z, w] : A) S_.push_back(z);
  }

  void evict(std::vector<Weighted>& A, double pi, ItemId x) {
    const double u = rng_.decide.uniform_pos();
    const double slots = static_cast<double>(n_) - static_cast<double>(V_.size());
    double alpha = 0.0;
    bool clamped = false;
    for (auto it = A.begin(); it != A.end(); ++it) {
      alpha += (1.0 - slots * it->second / W_) / pi;
      if (alpha > 1.0 && !clamped) {
        clamped = true;
        ++diag_.alpha_clamps;
        alpha = 1.0;
      }
      if (u <= alpha) {
        A.erase(it);
        return;
      }
    }
    if (!S_.empty()) {
      const std::size_t pos = rng_.select.index(S_.size());
      S_[pos] = S_.back();
      S_.pop_back();
      return;
    }
    if (!A.empty()) {
      A.erase(A.begin() + static_cast<std::ptrdiff_t>(rng_.select.index(A.size())));
      return;
    }
    // Every sample item is overweight: drop the lightest one other than x.
    ++diag_.overweight_evictions;
    auto victim = V_.end();
    for (auto it = V_.begin(); it != V_.end(); ++it) {
      if (it->first == x) continue;
      if (victim == V_.end() || it->second < victim->second ||
          (it->second == victim->second && it->first < victim->first)) {
        victim = it;
      }
    }
    if (victim == V_.end()) throw InvariantViolation("bchao found no victim");
    V_.erase(victim);
  }

  std::size_t n_;
  double theta_;
  SamplerRng rng_;
  std::vector<ItemId> S_;
  std::vector<Weighted> V_;
  double W_ = 0.0;
  std::int64_t k_ = 0;
  ChaoDiagnostics diag_;
};

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "btbs") return Algorithm::kBtbs;
  if (name == "brs") return Algorithm::kBrs;
  if (name == "ttbs") return Algorithm::kTtbs;
  if (name == "rtbs-exp") return Algorithm::kRtbsExp;
  if (name == "rtbs-gen") return Algorithm::kRtbsGen;
  if (name == "bchao") return Algorithm::kBchao;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kBtbs:
      return "btbs";
    case Algorithm::kBrs:
      return "brs";
    case Algorithm::kTtbs:
      return "ttbs";
    case Algorithm::kRtbsExp:
      return "rtbs-exp";
    case Algorithm::kRtbsGen:
      return "rtbs-gen";
    case Algorithm::kBchao:
      return "bchao";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (n == 0) throw ConfigError("n must be positive");
  switch (algorithm) {
    case Algorithm::kBtbs:
    case Algorithm::kRtbsExp:
    case Algorithm::kBchao:
      require_exponential(*this);
      break;
    case Algorithm::kBrs:
      break;
    case Algorithm::kTtbs: {
      if (!decay.summable()) {
        throw ConfigError("ttbs needs a decay with finite total weight");
      }
      if (!(b > 0.0)) throw ConfigError("ttbs needs the mean batch size b");
      const double need = static_cast<double>(n) * gamma(decay);
      if (b < need) {
        throw ConfigError("ttbs needs b >= n * gamma = " + std::to_string(need));
      }
      break;
    }
    case Algorithm::kRtbsGen: {
      if (!decay.summable()) {
        throw ConfigError("rtbs-gen needs a decay with finite total weight");
      }
      if (effective_n_prime() < static_cast<double>(n)) {
        throw ConfigError("n' must be >= n");
      }
      if (!(delta1 > 0.0 && delta1 < 1.0)) {
        throw ConfigError("delta1 must lie in (0, 1)");
      }
      if (!(delta2 > 0.0)) throw ConfigError("delta2 must be positive");
      if (lambda_consol) {
        const double need = decay.kind() == DecayKind::kExponential
                                ? decay.lambda()
                                : consolidation_lambda(decay, delta1);
        if (!(*lambda_consol >= need * (1.0 - 1e-12))) {
          throw ConfigError("consolidation rate below the minimum " +
                            std::to_string(need));
        }
      }
      break;
    }
  }
}

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config,
                                      std::uint64_t seed,
                                      std::uint64_t replica) {
  config.validate();
  SamplerRng rng = SamplerRng::for_replica(seed, replica);
  switch (config.algorithm) {
    case Algorithm::kBtbs:
      return std::make_unique<BtbsSampler>(config, std::move(rng));
    case Algorithm::kBrs:
      return std::make_unique<BrsSampler>(config, std::move(rng));
    case Algorithm::kTtbs:
      return std::make_unique<TtbsSampler>(config, std::move(rng));
    case Algorithm::kRtbsExp:
      return std::make_unique<RtbsExpSampler>(config, std::move(rng));
    case Algorithm::kRtbsGen:
      return std::make_unique<RtbsGenSampler>(config, std::move(rng));
    case Algorithm::kBchao:
      return std::make_unique<BchaoSampler>(config, std::move(rng));
  }
  throw ConfigError("unknown algorithm");
}

std::vector<TrajectoryRecord> run(Sampler& sampler,
                                  const std::vector<Batch>& batches,
                                  const StepObserver& observer) {
  std::vector<TrajectoryRecord> out;
  out.reserve(batches.size());
  for (const auto& b : batches) {
    sampler.step(b);
    out.push_back(sampler.record());
    if (observer) observer(out.back(), sampler);
  }
  return out;
}

std::vector<TrajectoryRecord> run(const SamplerConfig& config,
                                  const std::vector<Batch>& batches,
                                  std::uint64_t seed, std::uint64_t replica,
                                  const StepObserver& observer) {
  auto sampler = make_sampler(config, seed, replica);
  return run(*sampler, batches, observer);
}

}  // namespace tbs
