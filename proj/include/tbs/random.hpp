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

// Reproducible random streams.
//
// A stream is Philox4x64-10 keyed by (seed, stream_id) with a 256-bit
// counter starting at zero, so distinct stream ids never share a sequence.
// Binomial and hypergeometric variates come from GSL driven by the stream.

#ifndef TBS_RANDOM_HPP_
#define TBS_RANDOM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tbs {

// One Philox4x64-10 block: exposed for known-answer tests.
std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> ctr,
                                           std::array<std::uint64_t, 2> key);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1]. Comparisons "u <= p" then fire with probability
  // exactly p, including never for p = 0.
  double uniform_pos() { return 1.0 - uniform(); }
  // Uniform on {0, ..., n - 1}; n must be in [1, 2^32 - 1].
  std::size_t index(std::size_t n);

  std::uint64_t binomial(std::uint64_t trials, double p);
  // Number of marked items among k draws without replacement from a marked
  // and b unmarked items.
  std::uint64_t hypergeometric(std::uint64_t k, std::uint64_t a,
                               std::uint64_t b);
  // Counts per partition for `draws` items drawn without replacement from the
  // union of partitions; sequential conditional hypergeometric draws. A
  // single partition consumes no randomness.
  std::vector<std::uint64_t> multivariate_hypergeometric(
      std::uint64_t draws, const std::vector<std::uint64_t>& sizes);

  // Sorted positions of a uniform random d-subset of {0, ..., s - 1}.
  // Uses min(d, s - d) index draws.
  std::vector<std::size_t> select_positions(std::size_t s, std::size_t d);

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_{};
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

// Independent streams for replica `replica` of an experiment: lane 0 drives
// the sampler's decisions, lanes 1.. drive item selection (one per worker in
// the partitioned layer).
RandomStream replica_stream(std::uint64_t seed, std::uint64_t replica,
                            std::uint64_t lane);

// Decision and selection streams of one sampler.
struct SamplerRng {
  RandomStream decide;
  RandomStream select;

  static SamplerRng for_replica(std::uint64_t seed, std::uint64_t replica) {
    return {replica_stream(seed, replica, 0), replica_stream(seed, replica, 1)};
  }
};

// Removes the elements at the given sorted, distinct positions, keeping the
// relative order of the rest.
template <typename T>
void erase_positions(std::vector<T>& v, const std::vector<std::size_t>& pos) {
  if (pos.empty()) return;
  std::size_t out = pos.front();
  std::size_t next = 0;
  for (std::size_t i = pos.front(); i < v.size(); ++i) {
    if (next < pos.size() && pos[next] == i) {
      ++next;
      continue;
    }
    v[out++] = std::move(v[i]);
  }
  v.resize(out);
}

// Sample(A, keep): retains a uniform random subset of min(keep, |v|)
// elements in place.
template <typename T>
void retain_random(std::vector<T>& v, std::size_t keep, RandomStream& rng) {
  if (keep >= v.size()) return;
  erase_positions(v, rng.select_positions(v.size(), v.size() - keep));
}

// Returns a uniform random subset of min(m, |population|) elements, in
// population order.
template <typename T>
std::vector<T> sample_without_replacement(RandomStream& rng,
                                          const std::vector<T>& population,
                                          std::size_t m) {
  std::vector<T> out(population);
  retain_random(out, m, rng);
  return out;
}

}  // namespace tbs

#endif  // TBS_RANDOM_HPP_
