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

// Reservoir time-biased sampling state machines, generic over where latent
// samples live.
//
// A Backend provides:
//   using Latent = ...;
//   Latent empty();
//   Latent ingest(const Batch&);                 // all items full
//   void downsample(Latent&, double theta);      // 0 < theta < 1
//   Latent unite(Latent, Latent);
//   std::vector<ItemId> realize(const Latent&);
//   static double weight(const Latent&);
//   static std::size_t stored(const Latent&);    // full + partial items
//
// The single-node backend stores LatentSample values; the partitioned layer
// spreads each latent sample over simulated workers. Both run the same
// decision sequence, so a one-partition run reproduces the single node.

#ifndef TBS_RTBS_CORE_HPP_
#define TBS_RTBS_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tbs/decay.hpp"
#include "tbs/samplers.hpp"
#include "tbs/types.hpp"

namespace tbs {

// Relative slack for downsampling factors that should be <= 1.
inline constexpr double kFactorSlack = 1e-9;
// Tolerance of the C = rho * W bookkeeping check.
inline constexpr double kWeightCheckTol = 1e-6;
// rtbs-gen recomputes W from per-batch weights this often.
inline constexpr std::int64_t kWeightRefreshSteps = 1000;

namespace internal {

inline void check_factor(double factor, const char* what) {
  if (factor > 1.0 + kFactorSlack) {
    throw InvariantViolation(std::string("inclusion probability would grow: ") +
                             what + " factor " + std::to_string(factor));
  }
}

inline void check_weight(double c, double rho_w, const char* who) {
  if (std::fabs(c - rho_w) > kWeightCheckTol * std::max(rho_w, 1.0)) {
    throw InvariantViolation(std::string(who) + ": C=" + std::to_string(c) +
                             " but rho*W=" + std::to_string(rho_w));
  }
}

}  // namespace internal

template <typename Backend>
class RtbsExpCore {
 public:
  using Latent = typename Backend::Latent;

  RtbsExpCore(const SamplerConfig& config, Backend backend)
      : n_(static_cast<double>(config.n)),
        theta_(std::exp(-config.decay.lambda() * config.decay.delta())),
        backend_(std::move(backend)),
        latent_(backend_.empty()) {}

  void step(const Batch& batch) {
    if (batch.index != k_ + 1) throw DomainError("batches must arrive in order");
    k_ = batch.index;
    W_ = theta_ * W_ + static_cast<double>(batch.size());
    const double rho_prev = rho_;
    rho_ = W_ > 0.0 ? std::min(1.0, n_ / W_) : 1.0;
    if (Backend::weight(latent_) > 0.0) {
      const double factor = (rho_ / rho_prev) * theta_;
      internal::check_factor(factor, "rtbs-exp");
      if (factor < 1.0) backend_.downsample(latent_, factor);
    }
    Latent fresh = backend_.ingest(batch);
    if (rho_ < 1.0 && batch.size() > 0) backend_.downsample(fresh, rho_);
    latent_ = backend_.unite(std::move(fresh), std::move(latent_));
    const double c = Backend::weight(latent_);
    internal::check_weight(c, rho_ * W_, "rtbs-exp");
    realized_ = backend_.realize(latent_);
    if (static_cast<double>(realized_.size()) > n_) {
      throw InvariantViolation("rtbs-exp sample exceeds n");
    }
  }

  const std::vector<ItemId>& realized() const { return realized_; }
  const Latent& latent() const { return latent_; }
  Backend& backend() { return backend_; }
  const Backend& backend() const { return backend_; }

  TrajectoryRecord record() const {
    TrajectoryRecord r;
    r.k = k_;
    r.W = W_;
    r.C = Backend::weight(latent_);
    r.rho = rho_;
    r.size = realized_.size();
    r.footprint_items = Backend::stored(latent_);
    r.footprint_samples = 1;
    return r;
  }

 private:
  double n_;
  double theta_;
  Backend backend_;
  Latent latent_;
  std::int64_t k_ = 0;
  double W_ = 0.0;
  double rho_ = 1.0;
  std::vector<ItemId> realized_;
};

template <typename Backend>
class RtbsGenCore {
 public:
  using Latent = typename Backend::Latent;

  RtbsGenCore(const SamplerConfig& config, Backend backend)
      : fn_(config.decay),
        n_(static_cast<double>(config.n)),
        n_prime_(config.effective_n_prime()),
        delta1_(config.delta1),
        delta2_(config.delta2),
        audit_(config.audit),
        backend_(std::move(backend)),
        consolidated_(backend_.empty()) {
    if (!fn_.summable()) {
      throw ConfigError("rtbs-gen needs a decay with finite total weight");
    }
    if (config.lambda_consol) {
      lambda_c_ = *config.lambda_consol;
    } else if (fn_.kind() == DecayKind::kExponential) {
      lambda_c_ = fn_.lambda();
    } else {
      lambda_c_ = consolidation_lambda(fn_, delta1_);
    }
    theta_c_ = std::exp(-lambda_c_ * fn_.delta());
    j_hat_ = first_index_below(fn_, delta1_);
  }

  void step(const Batch& batch) {
    if (batch.index != k_ + 1) throw DomainError("batches must arrive in order");
    k_ = batch.index;
    b_star_ = std::max(b_star_, batch.size());
    const double rho_prev = rho_;

    // Decay the total weight; ratios r_i = f(a_{i,k}) / f(a_{i,k-1}).
    ratios_.resize(live_.size());
    for (std::size_t j = 0; j < live_.size(); ++j) {
      ratios_[j] = fn_.step_ratio(k_ - 1 - live_[j].index);
      W_ -= (1.0 - ratios_[j]) * (Backend::weight(live_[j].latent) / rho_prev);
    }
    if (m_ > 1) {
      W_ -= (1.0 - theta_c_) * (Backend::weight(consolidated_) / rho_prev);
      Wc_ *= theta_c_;
    }
    W_ += static_cast<double>(batch.size());
    if (k_ % kWeightRefreshSteps == 0) refresh_weight(batch.size());
    W_max_ = std::max(W_max_, W_);

    rho_star_ = std::numeric_limits<double>::infinity();
    for (double r : ratios_) rho_star_ = std::min(rho_star_, rho_prev / r);
    if (m_ > 1) rho_star_ = std::min(rho_star_, rho_prev / theta_c_);
    const double cap = W_ > 0.0 ? std::min(1.0, n_prime_ / W_) : 1.0;
    rho_ = std::min(cap, rho_star_);
    rho_star_binding_ = rho_star_ < cap;

    for (std::size_t j = 0; j < live_.size(); ++j) {
      shrink(live_[j].latent, rho_ * ratios_[j] / rho_prev);
    }
    if (m_ > 1) shrink(consolidated_, (rho_ / rho_prev) * theta_c_);

    Latent fresh = backend_.ingest(batch);
    if (rho_ < 1.0 && batch.size() > 0) backend_.downsample(fresh, rho_);
    live_.push_back({k_, batch.size(), std::move(fresh)});

    consolidate();
    check_invariants(rho_prev);
    emit();
  }

  const std::vector<ItemId>& realized() const { return realized_; }
  Backend& backend() { return backend_; }
  const Backend& backend() const { return backend_; }
  double lambda_consol() const { return lambda_c_; }

  RtbsGenStatus status() const {
    RtbsGenStatus s;
    s.k = k_;
    s.m = m_;
    s.W = W_;
    s.W_max = W_max_;
    s.rho = rho_;
    s.rho_prev = rho_prev_;
    s.rho_star = rho_star_;
    s.rho_star_binding = rho_star_binding_;
    s.live = live_.size();
    s.b_star = b_star_;
    s.consolidated_weight = Wc_;
    s.total_C = total_weight();
    s.lag_bound = lag_bound();
    return s;
  }

  // Batch indices and sizes of the per-batch latent samples, oldest first.
  std::vector<std::pair<std::int64_t, std::size_t>> live_batches() const {
    std::vector<std::pair<std::int64_t, std::size_t>> out;
    for (const auto& e : live_) out.emplace_back(e.index, e.size);
    return out;
  }

  TrajectoryRecord record() const {
    TrajectoryRecord r;
    r.k = k_;
    r.W = W_;
    r.C = total_weight();
    r.rho = rho_;
    r.size = realized_.size();
    std::size_t items = Backend::stored(consolidated_);
    for (const auto& e : live_) items += Backend::stored(e.latent);
    r.footprint_items = items;
    r.footprint_samples = live_.size() + 1;
    return r;
  }

 private:
  struct Entry {
    std::int64_t index;
    std::size_t size;
    Latent latent;
  };

  void shrink(Latent& l, double factor) {
    internal::check_factor(factor, "rtbs-gen");
    if (Backend::weight(l) > 0.0 && factor < 1.0) backend_.downsample(l, factor);
  }

  double tail(std::int64_t j) {
    while (static_cast<std::int64_t>(tail_cache_.size()) <= j) {
      tail_cache_.push_back(
          tail_sum(fn_, static_cast<std::int64_t>(tail_cache_.size())));
    }
    return tail_cache_[static_cast<std::size_t>(j)];
  }

  // Merges the oldest per-batch samples into the consolidated sample while
  // their decay weight is below delta1 and the weight left outside the
  // per-batch samples stays below delta2 / B*. The second test uses the lag
  // after the merge, so the bound holds for the new m.
  void consolidate() {
    const double bound = b_star_ > 0
                             ? delta2_ / static_cast<double>(b_star_)
                             : std::numeric_limits<double>::infinity();
    while (!live_.empty() && live_.front().index < k_) {
      const std::int64_t lag = k_ - live_.front().index;
      if (!(fn_.at(lag) < delta1_ && tail(lag) < bound)) break;
      Entry e = std::move(live_.front());
      live_.pop_front();
      consolidated_ = backend_.unite(std::move(consolidated_), std::move(e.latent));
      Wc_ += static_cast<double>(e.size) * fn_.at(lag);
      if (audit_) merged_.emplace_back(e.index, e.size);
      m_ = e.index + 1;
    }
  }

  // Replaces the incrementally updated W by its exact value.
  void refresh_weight(std::size_t incoming) {
    double w = Wc_ + static_cast<double>(incoming);
    for (const auto& e : live_) {
      w += static_cast<double>(e.size) * fn_.at(k_ - e.index);
    }
    W_ = w;
  }

  double total_weight() const {
    double c = Backend::weight(consolidated_);
    for (const auto& e : live_) c += Backend::weight(e.latent);
    return c;
  }

  std::int64_t lag_bound() const {
    if (b_star_ != cached_b_star_) {
      cached_b_star_ = b_star_;
      cached_n_ = b_star_ > 0
                      ? tail_index(fn_, delta2_ / static_cast<double>(b_star_))
                      : 0;
    }
    return std::max(cached_n_, j_hat_ - 1);
  }

  void check_invariants(double rho_prev) {
    rho_prev_ = rho_prev;
    internal::check_weight(total_weight(), rho_ * W_, "rtbs-gen");
    if (k_ - m_ > lag_bound()) {
      throw InvariantViolation("rtbs-gen keeps too many per-batch samples");
    }
    if (audit_) {
      double perturbed = 0.0;
      for (const auto& [i, size] : merged_) {
        perturbed += static_cast<double>(size) * fn_.at(k_ - i);
      }
      if (!(perturbed < delta2_)) {
        throw InvariantViolation("rtbs-gen perturbed weight reaches delta2");
      }
    }
    if (W_max_ <= n_prime_ && rho_ != 1.0) {
      throw InvariantViolation("rho below 1 before W exceeded n'");
    }
    if (W_max_ > n_prime_ && rho_ < (n_prime_ / W_max_) * (1.0 - 1e-12)) {
      throw InvariantViolation("rho below n' / max W");
    }
    if (fn_.strictly_decreasing() && rho_star_binding_ && k_ > 1 &&
        !(rho_ > rho_prev)) {
      throw InvariantViolation("rho failed to recover while rho* binds");
    }
  }

  // Output path: works on copies so the stored samples are untouched.
  void emit() {
    Latent out = backend_.empty();
    bool first = true;
    for (auto it = live_.rbegin(); it != live_.rend(); ++it) {
      if (first) {
        out = it->latent;
        first = false;
      } else {
        out = backend_.unite(std::move(out), Latent(it->latent));
      }
    }
    out = first ? Latent(consolidated_)
                : backend_.unite(std::move(out), Latent(consolidated_));
    const double c = Backend::weight(out);
    if (c > n_) backend_.downsample(out, n_ / c);
    realized_ = backend_.realize(out);
    if (static_cast<double>(realized_.size()) > n_) {
      throw InvariantViolation("rtbs-gen sample exceeds n");
    }
  }

  DecayFn fn_;
  double n_;
  double n_prime_;
  double delta1_;
  double delta2_;
  bool audit_;
  double lambda_c_ = 0.0;
  double theta_c_ = 1.0;
  std::int64_t j_hat_ = 0;
  Backend backend_;

  std::deque<Entry> live_;
  Latent consolidated_;
  std::vector<double> ratios_;
  std::vector<double> tail_cache_;
  std::vector<std::pair<std::int64_t, std::size_t>> merged_;
  std::int64_t k_ = 0;
  std::int64_t m_ = 1;
  std::size_t b_star_ = 0;
  double W_ = 0.0;
  double Wc_ = 0.0;
  double W_max_ = 0.0;
  double rho_ = 1.0;
  double rho_prev_ = 1.0;
  double rho_star_ = std::numeric_limits<double>::infinity();
  bool rho_star_binding_ = false;
  mutable std::size_t cached_b_star_ = 0;
  mutable std::int64_t cached_n_ = 0;
  std::vector<ItemId> realized_;
};

}  // namespace tbs

#endif  // TBS_RTBS_CORE_HPP_
