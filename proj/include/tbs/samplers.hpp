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

// Batch-stream samplers behind one interface.
//
//   btbs      Bernoulli time-biased sampling (exponential decay)
//   brs       batched reservoir sampling (no decay)
//   ttbs      targeted-size time-biased sampling
//   rtbs-exp  reservoir time-biased sampling, exponential decay
//   rtbs-gen  reservoir time-biased sampling, general decay
//   bchao     batched weighted reservoir in the style of Chao
//
// Every sampler owns two random streams derived from (seed, replica), so
// replicas of one experiment are independent and reproducible.

#ifndef TBS_SAMPLERS_HPP_
#define TBS_SAMPLERS_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbs/decay.hpp"
#include "tbs/types.hpp"

namespace tbs {

enum class Algorithm { kBtbs, kBrs, kTtbs, kRtbsExp, kRtbsGen, kBchao };

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

struct SamplerConfig {
  Algorithm algorithm = Algorithm::kRtbsExp;
  DecayFn decay = DecayFn::exponential(0.0);
  std::size_t n = 0;
  // Maximum internal sample weight for rtbs-gen; 0 means n.
  double n_prime = 0.0;
  // Assumed mean batch size for ttbs.
  double b = 0.0;
  double delta1 = 1e-3;
  double delta2 = 10.0;
  // Consolidated-sample decay rate for rtbs-gen; derived when unset.
  std::optional<double> lambda_consol;
  // rtbs-gen: also check the perturbed-weight bound every step (O(k)).
  bool audit = false;

  double effective_n_prime() const {
    return n_prime > 0.0 ? n_prime : static_cast<double>(n);
  }
  // Throws ConfigError for inconsistent settings.
  void validate() const;
};

struct TrajectoryRecord {
  std::int64_t k = 0;
  double W = 0.0;
  double C = 0.0;
  double rho = 1.0;
  std::size_t size = 0;
  std::size_t footprint_items = 0;
  std::size_t footprint_samples = 0;
};

// Per-step view of the general sampler, for tests and diagnostics.
struct RtbsGenStatus {
  std::int64_t k = 0;
  std::int64_t m = 1;  // oldest batch with its own latent sample
  double W = 0.0;
  double W_max = 0.0;  // max W so far
  double rho = 1.0;
  double rho_prev = 1.0;
  double rho_star = std::numeric_limits<double>::infinity();
  bool rho_star_binding = false;  // rho_star < min(1, n' / W)
  std::size_t live = 0;           // per-batch latent samples
  std::size_t b_star = 0;
  double consolidated_weight = 0.0;  // decayed weight of merged batches
  double total_C = 0.0;
  std::int64_t lag_bound = 0;  // max(N(B*), j_hat - 1)
};

// Diagnostics of the bchao sampler.
struct ChaoDiagnostics {
  std::size_t alpha_clamps = 0;          // cumulative victim weight exceeded 1
  std::size_t overweight_evictions = 0;  // no non-overweight victim existed
  std::size_t overweight = 0;            // current |V|
};

class Sampler {
 public:
  virtual ~Sampler() = default;

  // Processes the next batch. Batch indices must be 1, 2, ...
  virtual void step(const Batch& batch) = 0;
  // The sample produced by the last step.
  virtual std::vector<ItemId> sample() const = 0;
  virtual TrajectoryRecord record() const = 0;

  virtual std::optional<RtbsGenStatus> gen_status() const {
    return std::nullopt;
  }
  virtual std::optional<ChaoDiagnostics> chao_diagnostics() const {
    return std::nullopt;
  }
};

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config,
                                      std::uint64_t seed,
                                      std::uint64_t replica = 0);

using StepObserver =
    std::function<void(const TrajectoryRecord&, const Sampler&)>;

// Feeds every batch and returns one record per step.
std::vector<TrajectoryRecord> run(Sampler& sampler,
                                  const std::vector<Batch>& batches,
                                  const StepObserver& observer = {});
std::vector<TrajectoryRecord> run(const SamplerConfig& config,
                                  const std::vector<Batch>& batches,
                                  std::uint64_t seed,
                                  std::uint64_t replica = 0,
                                  const StepObserver& observer = {});

}  // namespace tbs

#endif  // TBS_SAMPLERS_HPP_
