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

// Batch-size generators for synthetic arrival regimes.
//
//   constant:<b>
//   uniform:<lo>:<hi>             i.i.d. sizes on {lo, ..., hi}
//   growing:<b0>:<phi>:<start>    b0 until start, then round(b0 * phi^(k - start))
//   decaying:<b0>:<phi>:<start>   same with phi < 1
//   periodic:<b1>:<b2>:<m>[:<f>]  per period of m steps, the first ceil(f * m)
//                                 steps use b1 and the rest b2 (f = 2/3)

#ifndef TBS_STREAMS_HPP_
#define TBS_STREAMS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tbs/random.hpp"

namespace tbs {

struct StreamSpec {
  enum class Kind { kConstant, kUniform, kGrowing, kDecaying, kPeriodic };

  Kind kind = Kind::kConstant;
  std::int64_t b = 0;  // constant, b0, b1 or lo
  std::int64_t b2 = 0;  // hi or b2
  double phi = 1.0;
  std::int64_t start = 0;
  std::int64_t period = 1;
  double fraction = 2.0 / 3.0;

  static StreamSpec parse(std::string_view text);
  std::string to_string() const;

  // Size of batch k (k >= 1) for the deterministic generators.
  std::size_t size_at(std::int64_t k) const;
  // Sizes of batches 1..horizon. Only "uniform" draws from rng.
  std::vector<std::size_t> sizes(std::int64_t horizon, RandomStream& rng) const;
};

// Stream reserved for drawing batch sizes, disjoint from every replica's
// sampler streams.
inline RandomStream size_stream(std::uint64_t seed) {
  return RandomStream(seed, ~std::uint64_t{0});
}

}  // namespace tbs

#endif  // TBS_STREAMS_HPP_
