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

#include "tbs/random.hpp"

#include <gsl/gsl_randist.h>
#include <gsl/gsl_rng.h>

#include <limits>

#include "tbs/types.hpp"

namespace tbs {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi,
                    std::uint64_t* lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(p >> 64);
  *lo = static_cast<std::uint64_t>(p);
}

// GSL sees the stream through a borrowed pointer held in the state slot.
struct GslState {
  RandomStream* stream;
};

unsigned long gsl_get(void* state) {
  return static_cast<unsigned long>(
      static_cast<GslState*>(state)->stream->next_u64() >> 32);
}

double gsl_get_double(void* state) {
  return static_cast<GslState*>(state)->stream->uniform();
}

void gsl_set(void*, unsigned long) {}

const gsl_rng_type kGslType = {
    "tbs-philox", 0xffffffffUL, 0, sizeof(GslState),
    &gsl_set,     &gsl_get,     &gsl_get_double};

class GslAdapter {
 public:
  explicit GslAdapter(RandomStream* s) : state_{s}, rng_{&kGslType, &state_} {}
  gsl_rng* get() { return &rng_; }

 private:
  GslState state_;
  gsl_rng rng_;
};

constexpr std::uint64_t kGslMaxCount = std::numeric_limits<unsigned int>::max();

}  // namespace

std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> ctr,
                                           std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], &hi0, &lo0);
    mulhilo(kM1, ctr[2], &hi1, &lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{seed, stream_id} {}

std::uint64_t RandomStream::next_u64() {
  if (pos_ == 4) {
    buf_ = philox4x64_10(ctr_, key_);
    for (auto& word : ctr_) {
      if (++word != 0) break;
    }
    pos_ = 0;
  }
  return buf_[pos_++];
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0 || n > kGslMaxCount) {
    throw DomainError("index range must be in [1, 2^32 - 1]");
  }
  if (n == 1) return 0;
  GslAdapter g(this);
  return gsl_rng_uniform_int(g.get(), n);
}

std::uint64_t RandomStream::binomial(std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial p outside [0, 1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (trials > kGslMaxCount) throw CapacityError("binomial trials too large");
  GslAdapter g(this);
  return gsl_ran_binomial(g.get(), p, static_cast<unsigned int>(trials));
}

std::uint64_t RandomStream::hypergeometric(std::uint64_t k, std::uint64_t a,
                                           std::uint64_t b) {
  if (k > a + b) throw DomainError("hypergeometric draws exceed population");
  if (k == 0 || a == 0) return 0;
  if (b == 0) return k;
  if (k == a + b) return a;
  if (a + b > kGslMaxCount) throw CapacityError("hypergeometric too large");
  GslAdapter g(this);
  return gsl_ran_hypergeometric(g.get(), static_cast<unsigned int>(a),
                                static_cast<unsigned int>(b),
                                static_cast<unsigned int>(k));
}

std::vector<std::uint64_t> RandomStream::multivariate_hypergeometric(
    std::uint64_t draws, const std::vector<std::uint64_t>& sizes) {
  std::uint64_t total = 0;
  for (auto s : sizes) total += s;
  if (draws > total) throw DomainError("draws exceed population");
  std::vector<std::uint64_t> out(sizes.size(), 0);
  if (sizes.empty()) return out;
  std::uint64_t left = draws;
  for (std::size_t j = 0; j + 1 < sizes.size() && left > 0; ++j) {
    total -= sizes[j];
    out[j] = hypergeometric(left, sizes[j], total);
    left -= out[j];
  }
  out.back() += left;
  return out;
}

std::vector<std::size_t> RandomStream::select_positions(std::size_t s,
                                                        std::size_t d) {
  if (d > s) throw DomainError("cannot select more positions than exist");
  std::vector<std::size_t> out;
  if (d == 0) return out;
  out.reserve(d);
  if (d == s) {
    for (std::size_t i = 0; i < s; ++i) out.push_back(i);
    return out;
  }
  // Floyd's algorithm on the smaller of the subset and its complement.
  const bool complement = 2 * d > s;
  const std::size_t r = complement ? s - d : d;
  std::vector<char> mark(s, 0);
  for (std::size_t j = s - r; j < s; ++j) {
    const std::size_t t = index(j + 1);
    if (mark[t]) {
      mark[j] = 1;
    } else {
      mark[t] = 1;
    }
  }
  const char want = complement ? 0 : 1;
  for (std::size_t i = 0; i < s; ++i) {
    if (mark[i] == want) out.push_back(i);
  }
  return out;
}

RandomStream replica_stream(std::uint64_t seed, std::uint64_t replica,
                            std::uint64_t lane) {
  return RandomStream(seed, (replica << 16) | lane);
}

}  // namespace tbs
